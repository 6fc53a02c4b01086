//! Run configuration shared by the library drivers and the command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_time::BANDWIDTH_FLOOR_FACTOR;
use crate::mc::McPlan;
use crate::process::{ProcessKind, ProcessSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Simulate,
    Localtime,
    Moments,
    Spectral,
    Gram,
    Verify,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Localtime => "localtime",
            Command::Moments => "moments",
            Command::Spectral => "spectral",
            Command::Gram => "gram",
            Command::Verify => "verify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

pub const DEFAULT_SCHEDULE: [f64; 5] = [0.08, 0.04, 0.02, 0.01, 0.005];

/// Everything that determines a run's output.
///
/// `jobs`, `output_path` and `record_timings` do not affect the numbers and
/// are left out of the serialized form, so emitted documents are identical
/// for any worker count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Heat-process interval `(U1, U2)`.
    pub interval: (f64, f64),
    /// Second heat interval, longer than `2 sqrt(pi)`.
    pub long_interval: (f64, f64),
    pub grid_points: usize,
    pub epsilon_schedule: Vec<f64>,
    pub replicates: u64,
    pub master_seed: u64,
    pub z: f64,
    pub process: ProcessKind,
    pub output_format: OutputFormat,
    /// Negative control: doubles the heat covariance seen by the
    /// integrator sweep.
    pub corrupt_covariance: bool,
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    #[serde(skip, default = "yes")]
    pub record_timings: bool,
}

fn yes() -> bool {
    true
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Verify,
            interval: (0.0, 2.0),
            long_interval: (0.0, 5.0),
            grid_points: 8192,
            epsilon_schedule: DEFAULT_SCHEDULE.to_vec(),
            replicates: 50_000,
            master_seed: 42,
            z: 0.0,
            process: ProcessKind::Heat,
            output_format: OutputFormat::Json,
            corrupt_covariance: false,
            jobs: 0,
            output_path: None,
            record_timings: true,
        }
    }
}

impl RunConfig {
    pub fn plan(&self) -> McPlan {
        McPlan::new(self.replicates, self.master_seed, self.jobs)
    }

    /// The process selected by `process`: heat on `interval`, the bridge on
    /// `(0, 1)`, motion on `(0, U2)`.
    pub fn process_spec(&self) -> Result<ProcessSpec> {
        match self.process {
            ProcessKind::Heat => ProcessSpec::heat(self.interval.0, self.interval.1),
            ProcessKind::Bridge => Ok(ProcessSpec::bridge()),
            ProcessKind::Motion => ProcessSpec::motion(self.interval.1),
        }
    }

    /// Processes whose grids the bandwidth schedule must respect.
    fn processes_in_use(&self) -> Result<Vec<ProcessSpec>> {
        Ok(match self.command {
            Command::Verify => vec![
                ProcessSpec::bridge(),
                ProcessSpec::heat(self.interval.0, self.interval.1)?,
                ProcessSpec::heat(self.long_interval.0, self.long_interval.1)?,
            ],
            Command::Localtime | Command::Moments => vec![self.process_spec()?],
            _ => Vec::new(),
        })
    }

    /// Invariants checked before any work starts; violations are
    /// configuration errors (exit code 2).
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 points, got {}",
                self.grid_points
            )));
        }
        if self.replicates < 1 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        if !self.z.is_finite() {
            return Err(Error::Config("level z must be finite".into()));
        }
        let s = &self.epsilon_schedule;
        if s.is_empty() || s.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::Config(format!("bandwidths must be positive, got {s:?}")));
        }
        if s.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Config(format!(
                "bandwidth schedule must be decreasing, got {s:?}"
            )));
        }
        for spec in self.processes_in_use()? {
            let floor = BANDWIDTH_FLOOR_FACTOR * spec.length() / (self.grid_points - 1) as f64;
            let smallest = s[s.len() - 1];
            if smallest < floor * (1.0 - 1e-12) {
                return Err(Error::Config(format!(
                    "bandwidth {smallest} is below the floor {floor:.3e} for {} on {:?} with {} points",
                    spec.kind, spec.interval, self.grid_points
                )));
            }
        }
        if self.command != Command::Verify && self.command != Command::Spectral && self.command != Command::Gram {
            self.process_spec()?;
        }
        Ok(())
    }
}
