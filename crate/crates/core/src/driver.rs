//! Command execution and output for the `shelt` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::{Deserialize, Serialize};

use crate::config::{Command, OutputFormat, RunConfig};
use crate::error::Result;
use crate::local_time::{
    bias_normalized_moment, bridge_moment_exact, expected_smoothed_local_time, run_schedule, second_moment_via_density,
};
use crate::mc::collect_replicates;
use crate::process::{PathSampler, ProcessKind};
use crate::report::{
    format_f64, write_document_json, write_records_csv, CsvRecord, ReportDocument, Status, SuiteReport,
};
use crate::verify::{gram_reports, spectral_reports, verify_all};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub replicate: u64,
    pub u: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeRecord {
    pub process: ProcessKind,
    pub epsilon: f64,
    pub z: f64,
    pub replicates: u64,
    pub mean: f64,
    pub standard_error: f64,
    /// Quadrature value of the exact mean.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub process: ProcessKind,
    pub epsilon: f64,
    pub k: usize,
    pub estimate: f64,
    pub standard_error: Option<f64>,
    /// `E V_eps^2` by bivariate-density quadrature (`k = 2`).
    pub density: Option<f64>,
    /// Bridge local-time moment at level 0.
    pub exact: Option<f64>,
    /// Estimate divided by the k-th power of the mean's smoothing bias.
    pub normalized: Option<f64>,
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

impl CsvRecord for PathRecord {
    fn header() -> Vec<&'static str> {
        vec!["replicate", "u", "value"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.replicate.to_string(), format_f64(self.u), format_f64(self.value)]
    }
}

impl CsvRecord for LocalTimeRecord {
    fn header() -> Vec<&'static str> {
        vec![
            "process",
            "epsilon",
            "z",
            "replicates",
            "mean",
            "standard_error",
            "expected",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.process.to_string(),
            format_f64(self.epsilon),
            format_f64(self.z),
            self.replicates.to_string(),
            format_f64(self.mean),
            format_f64(self.standard_error),
            format_f64(self.expected),
        ]
    }
}

impl CsvRecord for MomentRecord {
    fn header() -> Vec<&'static str> {
        vec![
            "process",
            "epsilon",
            "k",
            "estimate",
            "standard_error",
            "density",
            "exact",
            "normalized",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.process.to_string(),
            format_f64(self.epsilon),
            self.k.to_string(),
            format_f64(self.estimate),
            opt(self.standard_error),
            opt(self.density),
            opt(self.exact),
            opt(self.normalized),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandOutput {
    Paths(Vec<PathRecord>),
    LocalTimes(Vec<LocalTimeRecord>),
    Moments(Vec<MomentRecord>),
    Reports(Vec<SuiteReport>),
}

impl CommandOutput {
    /// First failing claim of a report-producing command.
    pub fn first_failure(&self) -> Option<&SuiteReport> {
        match self {
            CommandOutput::Reports(r) => r.iter().find(|r| r.status == Status::Fail),
            _ => None,
        }
    }

    pub fn write<W: Write>(&self, cfg: &RunConfig, out: W) -> Result<()> {
        fn emit<R: Serialize + CsvRecord, W: Write>(cfg: &RunConfig, rows: &[R], out: W) -> Result<()> {
            match cfg.output_format {
                OutputFormat::Csv => write_records_csv(rows, out),
                OutputFormat::Json => write_document_json(
                    &ReportDocument {
                        config: cfg,
                        reports: rows.iter().collect(),
                        version: VERSION.to_string(),
                    },
                    out,
                ),
            }
        }
        match self {
            CommandOutput::Paths(r) => emit(cfg, r, out),
            CommandOutput::LocalTimes(r) => emit(cfg, r, out),
            CommandOutput::Moments(r) => emit(cfg, r, out),
            CommandOutput::Reports(r) => emit(cfg, r, out),
        }
    }

    /// Writes to `cfg.output_path`, or standard output when unset.
    pub fn emit(&self, cfg: &RunConfig) -> Result<()> {
        match &cfg.output_path {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p)?);
                self.write(cfg, &mut w)?;
                w.flush()?;
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                self.write(cfg, &mut w)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn simulate(cfg: &RunConfig) -> Result<Vec<PathRecord>> {
    let sampler = PathSampler::uniform(cfg.process_spec()?, cfg.grid_points)?;
    let paths = collect_replicates(&cfg.plan(), |s| sampler.sample(s))?;
    let pts = sampler.grid().points();
    Ok(paths
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            pts.iter().zip(p).map(move |(&u, &value)| PathRecord {
                replicate: i as u64,
                u,
                value,
            })
        })
        .collect())
}

fn localtime(cfg: &RunConfig) -> Result<Vec<LocalTimeRecord>> {
    let spec = cfg.process_spec()?;
    let stats = run_schedule(&spec, cfg.grid_points, cfg.z, &cfg.epsilon_schedule, &cfg.plan())?;
    stats
        .schedule
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            Ok(LocalTimeRecord {
                process: spec.kind,
                epsilon: e,
                z: cfg.z,
                replicates: stats.replicates,
                mean: stats.mean[i],
                standard_error: stats.mean_se[i],
                expected: expected_smoothed_local_time(&spec, cfg.z, e)?,
            })
        })
        .collect()
}

fn moments(cfg: &RunConfig) -> Result<Vec<MomentRecord>> {
    let spec = cfg.process_spec()?;
    let stats = run_schedule(&spec, cfg.grid_points, cfg.z, &cfg.epsilon_schedule, &cfg.plan())?;
    let bridge_at_zero = spec.kind == ProcessKind::Bridge && cfg.z == 0.0;
    let mut out = Vec::new();
    for (i, &e) in stats.schedule.iter().enumerate() {
        for k in 1..=4usize {
            let estimate = stats.raw_moments[i][k - 1];
            out.push(MomentRecord {
                process: spec.kind,
                epsilon: e,
                k,
                estimate,
                standard_error: match k {
                    1 => Some(stats.mean_se[i]),
                    2 => Some(stats.second_moment_se[i]),
                    _ => None,
                },
                density: if k == 2 {
                    Some(second_moment_via_density(&spec, cfg.z, e, e, spec.interval)?)
                } else {
                    None
                },
                exact: if bridge_at_zero {
                    Some(bridge_moment_exact(k)?)
                } else {
                    None
                },
                normalized: if bridge_at_zero {
                    Some(bias_normalized_moment(k, estimate, e)?)
                } else {
                    None
                },
            });
        }
    }
    Ok(out)
}

/// Validates the configuration and runs its command.
pub fn run(cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    Ok(match cfg.command {
        Command::Simulate => CommandOutput::Paths(simulate(cfg)?),
        Command::Localtime => CommandOutput::LocalTimes(localtime(cfg)?),
        Command::Moments => CommandOutput::Moments(moments(cfg)?),
        Command::Spectral => CommandOutput::Reports(spectral_reports(cfg)?),
        Command::Gram => CommandOutput::Reports(gram_reports(cfg)?),
        Command::Verify => CommandOutput::Reports(verify_all(cfg)?),
    })
}
