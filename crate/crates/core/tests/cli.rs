use std::process::{Command, Output};

use shelt::config::{Command as Cmd, OutputFormat, RunConfig};
use shelt::driver::{self, CommandOutput, LocalTimeRecord};
use shelt::report::{read_document_json, read_reports_csv, Status, SuiteReport};
use shelt::verify::{spectral_reports, verify_all};

fn shelt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shelt")).args(args).output().unwrap()
}

fn config(command: Cmd) -> RunConfig {
    RunConfig {
        command,
        grid_points: 4097,
        replicates: 200,
        record_timings: false,
        ..RunConfig::default()
    }
}

#[test]
fn single_replicate_lacks_power_but_does_not_fail() {
    let cfg = RunConfig {
        replicates: 1,
        ..config(Cmd::Verify)
    };
    let reports = verify_all(&cfg).unwrap();
    assert!(reports.iter().all(|r| r.status != Status::Fail));
    for id in [
        "smoothed-mean-bridge",
        "covariance-simulators",
        "cauchy-heat",
        "simplex-moment-k3",
    ] {
        let r = reports.iter().find(|r| r.claim_id == id).unwrap();
        assert_eq!(r.status, Status::InsufficientPower, "{id}");
    }
    let out = shelt(&["verify", "--reps", "1", "--grid", "4097", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn corrupted_covariance_fails_integrator_check() {
    let cfg = RunConfig {
        corrupt_covariance: true,
        ..config(Cmd::Spectral)
    };
    let reports = spectral_reports(&cfg).unwrap();
    assert_eq!(reports[0].claim_id, "integrator-inequality");
    assert_eq!(reports[0].status, Status::Fail);

    let out = shelt(&["spectral", "--corrupt-covariance"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("integrator-inequality"));
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        vec!["localtime", "--grid", "100", "--eps", "0.001"],
        vec!["localtime", "--eps", "0.01,0.02"],
        vec!["verify", "--reps", "0"],
        vec!["simulate", "--interval", "1", "1"],
        vec!["moments", "--format", "xml"],
        vec!["frobnicate"],
    ] {
        assert_eq!(shelt(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn json_and_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(Cmd::Spectral);
    let CommandOutput::Reports(expected) = driver::run(&cfg).unwrap() else {
        panic!("spectral emits reports")
    };

    let json = dir.path().join("s.json");
    let out = shelt(&["spectral", "--no-timings", "--out", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = read_document_json::<RunConfig, SuiteReport, _>(std::fs::File::open(&json).unwrap()).unwrap();
    assert_eq!(doc.reports, expected);
    assert_eq!(doc.config.command, Cmd::Spectral);
    assert_eq!(doc.version, driver::VERSION);

    let csv = dir.path().join("s.csv");
    shelt(&["spectral", "--format", "csv", "--out", csv.to_str().unwrap()]);
    let back = read_reports_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(back, expected);

    let mut buf = Vec::new();
    CommandOutput::Reports(expected.clone())
        .write(
            &RunConfig {
                output_format: OutputFormat::Csv,
                ..cfg
            },
            &mut buf,
        )
        .unwrap();
    assert_eq!(read_reports_csv(buf.as_slice()).unwrap(), expected);
}

#[test]
fn localtime_records_round_trip() {
    let cfg = RunConfig {
        process: shelt::process::ProcessKind::Bridge,
        grid_points: 1025,
        epsilon_schedule: vec![0.04, 0.02],
        ..config(Cmd::Localtime)
    };
    let CommandOutput::LocalTimes(expected) = driver::run(&cfg).unwrap() else {
        panic!("localtime emits records")
    };
    let out = shelt(&[
        "localtime",
        "--process",
        "bridge",
        "--grid",
        "1025",
        "--eps",
        "0.04,0.02",
        "--reps",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = read_document_json::<RunConfig, LocalTimeRecord, _>(out.stdout.as_slice()).unwrap();
    assert_eq!(doc.reports, expected);
    for r in &expected {
        assert!((r.mean - r.expected).abs() < 4.0 * r.standard_error);
    }
}

#[test]
fn simulate_defaults_to_one_path() {
    let out = shelt(&["simulate", "--grid", "9", "--process", "motion", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.starts_with("replicate,u,value"));
}

#[test]
fn verify_output_is_independent_of_jobs() {
    let run = |jobs: &str| {
        let out = shelt(&[
            "verify",
            "--grid",
            "4097",
            "--reps",
            "200",
            "--no-timings",
            "--seed",
            "42",
            "--jobs",
            jobs,
        ]);
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    assert_eq!(run("1"), run("16"));
}
