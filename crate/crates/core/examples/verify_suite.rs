//! Runs the whole verification suite and prints one line per report. The
//! optional argument sets the replicate count (default 5000).
//!
//! `cargo run --release --example verify_suite -- 50000`

use shelt::config::RunConfig;
use shelt::verify::{first_failure, verify_all};

fn main() -> shelt::error::Result<()> {
    let mut cfg = RunConfig::default();
    if let Some(r) = std::env::args().nth(1).and_then(|a| a.parse().ok()) {
        cfg.replicates = r;
    } else {
        cfg.replicates = 5000;
    }
    let reports = verify_all(&cfg)?;
    for r in &reports {
        println!("{:>7} ms  {}", r.runtime_ms, r.summary_line());
    }
    match first_failure(&reports) {
        Some(r) => println!("first failure: {}", r.claim_id),
        None => println!("all {} reports passed or lacked power", reports.len()),
    }
    Ok(())
}
