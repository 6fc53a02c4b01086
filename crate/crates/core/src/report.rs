//! Verification reports and their CSV / JSON encodings.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    InsufficientPower,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::InsufficientPower => "insufficient-power",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Status::Pass),
            "fail" => Ok(Status::Fail),
            "insufficient-power" => Ok(Status::InsufficientPower),
            other => Err(Error::Format(format!("unknown status {other:?}"))),
        }
    }
}

/// Outcome of one verification claim with its numeric evidence.
///
/// For closeness claims `observed` and `expected` are compared entrywise
/// against `tolerance`. For one-sided bounds `expected` holds the bound and
/// the claim fails only when `observed` crosses it by more than `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub claim_id: String,
    pub anchor: String,
    pub status: Status,
    pub observed: Vec<f64>,
    pub expected: Vec<f64>,
    pub tolerance: f64,
    pub standard_error: Option<f64>,
    pub runtime_ms: u64,
    pub detail: String,
}

impl SuiteReport {
    fn base(claim_id: &str, anchor: &str) -> Self {
        Self {
            claim_id: claim_id.to_string(),
            anchor: anchor.to_string(),
            status: Status::Pass,
            observed: Vec::new(),
            expected: Vec::new(),
            tolerance: 0.0,
            standard_error: None,
            runtime_ms: 0,
            detail: String::new(),
        }
    }

    /// Passes iff `observed <= bound + tolerance`.
    pub fn upper_bound(claim_id: &str, anchor: &str, observed: f64, bound: f64, tolerance: f64) -> Self {
        let mut r = Self::base(claim_id, anchor);
        r.observed = vec![observed];
        r.expected = vec![bound];
        r.tolerance = tolerance;
        r.status = if observed <= bound + tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        r
    }

    /// Passes iff `observed >= bound - tolerance`.
    pub fn lower_bound(claim_id: &str, anchor: &str, observed: f64, bound: f64, tolerance: f64) -> Self {
        let mut r = Self::upper_bound(claim_id, anchor, -observed, -bound, tolerance);
        r.observed = vec![observed];
        r.expected = vec![bound];
        r
    }

    /// Entrywise `|observed - expected| <= tolerance`.
    pub fn closeness(claim_id: &str, anchor: &str, observed: Vec<f64>, expected: Vec<f64>, tolerance: f64) -> Self {
        let mut r = Self::base(claim_id, anchor);
        let ok =
            observed.len() == expected.len() && observed.iter().zip(&expected).all(|(o, e)| (o - e).abs() <= tolerance);
        r.status = if ok { Status::Pass } else { Status::Fail };
        r.observed = observed;
        r.expected = expected;
        r.tolerance = tolerance;
        r
    }

    /// Monte Carlo claim: passes iff every `|observed - expected|` is within
    /// `max(4 * se_i, abs_tolerance)`; `standard_error` records the largest
    /// `se_i`. Fewer than two replicates yields `InsufficientPower`.
    pub fn statistical(
        claim_id: &str,
        anchor: &str,
        observed: Vec<f64>,
        expected: Vec<f64>,
        standard_errors: &[f64],
        abs_tolerance: f64,
        replicates: u64,
    ) -> Self {
        Self::statistical_at(
            claim_id,
            anchor,
            observed,
            expected,
            standard_errors,
            abs_tolerance,
            replicates,
            4.0,
        )
    }

    /// [`SuiteReport::statistical`] with `sigmas` standard errors instead of 4.
    #[allow(clippy::too_many_arguments)]
    pub fn statistical_at(
        claim_id: &str,
        anchor: &str,
        observed: Vec<f64>,
        expected: Vec<f64>,
        standard_errors: &[f64],
        abs_tolerance: f64,
        replicates: u64,
        sigmas: f64,
    ) -> Self {
        let mut r = Self::base(claim_id, anchor);
        let se_max = standard_errors.iter().copied().fold(0.0, f64::max);
        r.tolerance = (sigmas * se_max).max(abs_tolerance);
        r.standard_error = Some(se_max);
        if replicates < 2 || standard_errors.iter().any(|s| !s.is_finite()) {
            r.status = Status::InsufficientPower;
        } else {
            let ok = observed.len() == expected.len()
                && observed
                    .iter()
                    .zip(&expected)
                    .zip(standard_errors)
                    .all(|((o, e), s)| (o - e).abs() <= (sigmas * s).max(abs_tolerance));
            r.status = if ok { Status::Pass } else { Status::Fail };
        }
        r.observed = observed;
        r.expected = expected;
        r
    }

    /// Passes iff `values` is strictly decreasing; `expected` stays empty.
    pub fn strictly_decreasing(
        claim_id: &str,
        anchor: &str,
        values: Vec<f64>,
        standard_errors: &[f64],
        replicates: u64,
    ) -> Self {
        let mut r = Self::base(claim_id, anchor);
        r.standard_error = Some(standard_errors.iter().copied().fold(0.0, f64::max));
        r.status = if replicates < 2 || standard_errors.iter().any(|s| !s.is_finite()) {
            Status::InsufficientPower
        } else if values.windows(2).all(|w| w[1] < w[0]) {
            Status::Pass
        } else {
            Status::Fail
        };
        r.observed = values;
        r
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One human-readable line.
    pub fn summary_line(&self) -> String {
        format!(
            "[{:>18}] {:<34} {}  observed={:?} expected={:?} tol={:e}",
            self.status.as_str(),
            self.claim_id,
            self.anchor,
            self.observed,
            self.expected,
            self.tolerance
        )
    }
}

/// Top-level JSON document: `{config, reports, version}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument<C, R = SuiteReport> {
    pub config: C,
    pub reports: Vec<R>,
    pub version: String,
}

pub const CSV_HEADER: [&str; 9] = [
    "claim_id",
    "anchor",
    "status",
    "observed",
    "expected",
    "tolerance",
    "standard_error",
    "runtime_ms",
    "detail",
];

/// 17 significant digits, which round-trips every finite `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format_f64(*x)).collect::<Vec<_>>().join(";")
}

fn split(s: &str) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|t| t.parse::<f64>().map_err(|e| Error::Format(format!("{t:?}: {e}"))))
        .collect()
}

/// A flat record with a fixed CSV header.
pub trait CsvRecord {
    fn header() -> Vec<&'static str>;
    fn fields(&self) -> Vec<String>;
}

impl CsvRecord for SuiteReport {
    fn header() -> Vec<&'static str> {
        CSV_HEADER.to_vec()
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.claim_id.clone(),
            self.anchor.clone(),
            self.status.as_str().to_string(),
            join(&self.observed),
            join(&self.expected),
            format_f64(self.tolerance),
            self.standard_error.map(format_f64).unwrap_or_default(),
            self.runtime_ms.to_string(),
            self.detail.clone(),
        ]
    }
}

pub fn write_records_csv<T: CsvRecord, W: Write>(records: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let fmt = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(T::header()).map_err(fmt)?;
    for r in records {
        w.write_record(r.fields()).map_err(fmt)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_reports_csv<W: Write>(reports: &[SuiteReport], out: W) -> Result<()> {
    write_records_csv(reports, out)
}

pub fn read_reports_csv<R: Read>(input: R) -> Result<Vec<SuiteReport>> {
    let mut rd = csv::Reader::from_reader(input);
    let fmt = |e: csv::Error| Error::Format(e.to_string());
    let header = rd.headers().map_err(fmt)?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Format(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(fmt)?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let parse_f = |s: &str| s.parse::<f64>().map_err(|e| Error::Format(format!("{s:?}: {e}")));
        out.push(SuiteReport {
            claim_id: field(0).to_string(),
            anchor: field(1).to_string(),
            status: Status::parse(field(2))?,
            observed: split(field(3))?,
            expected: split(field(4))?,
            tolerance: parse_f(field(5))?,
            standard_error: match field(6) {
                "" => None,
                s => Some(parse_f(s)?),
            },
            runtime_ms: field(7)
                .parse()
                .map_err(|e| Error::Format(format!("runtime_ms: {e}")))?,
            detail: field(8).to_string(),
        });
    }
    Ok(out)
}

pub fn write_document_json<C: Serialize, R: Serialize, W: Write>(doc: &ReportDocument<C, R>, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, doc).map_err(|e| Error::Format(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_document_json<C, R, I>(input: I) -> Result<ReportDocument<C, R>>
where
    C: for<'de> Deserialize<'de>,
    R: for<'de> Deserialize<'de>,
    I: Read,
{
    serde_json::from_reader(input).map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Vec<SuiteReport> {
        vec![
            SuiteReport::upper_bound("a", "Thm 1", 0.1 + 0.2, 1.0 / 3.0, 1e-8),
            SuiteReport::statistical(
                "b",
                "Eq. 2",
                vec![1.25, -3e-300],
                vec![1.2533, 0.0],
                &[0.01, 1e-3],
                0.0,
                100,
            )
            .with_detail("quoted, \"detail\""),
            SuiteReport::closeness("c", "x", vec![], vec![], 0.0),
        ]
    }

    #[test]
    fn status_rules() {
        assert!(SuiteReport::upper_bound("u", "", 1.0, 1.0, 0.0).passed());
        assert!(!SuiteReport::upper_bound("u", "", 1.0 + 2e-8, 1.0, 1e-8).passed());
        assert!(SuiteReport::lower_bound("l", "", 0.5, 0.6, 0.2).passed());
        assert!(!SuiteReport::lower_bound("l", "", 0.5, 0.6, 0.01).passed());
        let s = SuiteReport::statistical("s", "", vec![1.0], vec![2.0], &[0.0], 0.0, 1);
        assert_eq!(s.status, Status::InsufficientPower);
        assert!(SuiteReport::statistical_at("s", "", vec![1.0], vec![1.25], &[0.1], 0.0, 9, 3.0).passed());
        assert!(!SuiteReport::statistical_at("s", "", vec![1.0], vec![1.35], &[0.1], 0.0, 9, 3.0).passed());
        assert!(SuiteReport::strictly_decreasing("d", "", vec![3.0, 2.0, 1.0], &[0.1], 9).passed());
        assert!(!SuiteReport::strictly_decreasing("d", "", vec![3.0, 3.0], &[0.1], 9).passed());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let reports = sample();
        let mut buf = Vec::new();
        write_reports_csv(&reports, &mut buf).unwrap();
        let back = read_reports_csv(buf.as_slice()).unwrap();
        assert_eq!(back, reports);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let doc = ReportDocument {
            config: "cfg".to_string(),
            reports: sample(),
            version: "0.1.0".into(),
        };
        let mut buf = Vec::new();
        write_document_json(&doc, &mut buf).unwrap();
        let back: ReportDocument<String> = read_document_json(buf.as_slice()).unwrap();
        assert_eq!(back, doc);
    }

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(format_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
