use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use shelt::config::{Command, OutputFormat, RunConfig, DEFAULT_SCHEDULE};
use shelt::driver;
use shelt::error::Error;
use shelt::process::ProcessKind;

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Simulate,
    Localtime,
    Moments,
    Spectral,
    Gram,
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Process {
    Heat,
    Bridge,
    Motion,
}

/// Local times of the fixed-time stochastic heat equation: simulation and
/// numerical checks.
#[derive(Parser)]
#[command(name = "shelt", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Heat-process interval U1 U2.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    interval: Option<Vec<f64>>,
    #[arg(long = "grid", value_name = "N", default_value_t = 8192)]
    grid: usize,
    /// Decreasing bandwidth schedule.
    #[arg(long = "eps", value_name = "E1,E2,...", value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Replicates; `simulate` defaults to 1, everything else to 50000.
    #[arg(long = "reps", value_name = "R")]
    reps: Option<u64>,
    #[arg(long, value_name = "S", default_value_t = 42)]
    seed: u64,
    /// Worker threads, 0 for all cores.
    #[arg(long, value_name = "J", default_value_t = 0)]
    jobs: usize,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(
        long = "z",
        value_name = "LEVEL",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    z: f64,
    #[arg(long, value_enum, default_value = "heat")]
    process: Process,
    /// Drop runtime_ms from reports.
    #[arg(long)]
    no_timings: bool,
    #[arg(long, hide = true)]
    corrupt_covariance: bool,
}

impl Cli {
    fn into_config(self) -> RunConfig {
        let command = match self.command {
            Cmd::Simulate => Command::Simulate,
            Cmd::Localtime => Command::Localtime,
            Cmd::Moments => Command::Moments,
            Cmd::Spectral => Command::Spectral,
            Cmd::Gram => Command::Gram,
            Cmd::Verify => Command::Verify,
        };
        let defaults = RunConfig::default();
        RunConfig {
            command,
            interval: self.interval.map_or(defaults.interval, |v| (v[0], v[1])),
            grid_points: self.grid,
            epsilon_schedule: self.eps.unwrap_or_else(|| DEFAULT_SCHEDULE.to_vec()),
            replicates: self.reps.unwrap_or(if command == Command::Simulate {
                1
            } else {
                defaults.replicates
            }),
            master_seed: self.seed,
            z: self.z,
            process: match self.process {
                Process::Heat => ProcessKind::Heat,
                Process::Bridge => ProcessKind::Bridge,
                Process::Motion => ProcessKind::Motion,
            },
            output_format: match self.format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            },
            corrupt_covariance: self.corrupt_covariance,
            jobs: self.jobs,
            output_path: self.out,
            record_timings: !self.no_timings,
            ..defaults
        }
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::InvalidGrid(_)
            | Error::BandwidthTooSmall { .. }
            | Error::UnknownProcess(_)
            | Error::SupportTooLong { .. }
    )
}

fn main() -> ExitCode {
    let cfg = Cli::parse().into_config();
    let output = match driver::run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("shelt: {e}");
            return ExitCode::from(if is_config_error(&e) { 2 } else { 1 });
        }
    };
    if let Err(e) = output.emit(&cfg) {
        eprintln!("shelt: {e}");
        return ExitCode::from(2);
    }
    match output.first_failure() {
        Some(r) => {
            eprintln!("shelt: verification failed: {}", r.claim_id);
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}
