//! Parallel replicate engine with a fixed-order reduction.
//!
//! Replicate `i` draws from the stream `(master_seed, i)`, outputs are
//! collected in index order and folded sequentially, so the result does not
//! depend on the number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sampling::SeedSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McPlan {
    pub replicates: u64,
    pub master_seed: u64,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
}

impl McPlan {
    pub fn new(replicates: u64, master_seed: u64, jobs: usize) -> Self {
        Self {
            replicates,
            master_seed,
            jobs,
        }
    }

    /// Same plan on an independent seed derived from `tag`.
    pub fn tagged(&self, tag: &str) -> Self {
        Self {
            master_seed: SeedSpec::derive_master(self.master_seed, tag),
            ..*self
        }
    }

    pub fn with_replicates(&self, replicates: u64) -> Self {
        Self { replicates, ..*self }
    }
}

/// Per-coordinate statistics of a vector-valued replicate output.
#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub replicates: u64,
    pub mean: Vec<f64>,
    /// Sample standard deviation over `sqrt(replicates)`; infinite with a
    /// single replicate.
    pub standard_error: Vec<f64>,
    /// `E X^k` for `k = 1..=4`.
    pub raw_moments: Vec<[f64; 4]>,
}

impl McSummary {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    fn from_outputs(outputs: &[Vec<f64>]) -> Self {
        let n = outputs.len();
        let dim = outputs.first().map_or(0, Vec::len);
        let nf = n as f64;
        let mut mean = vec![0.0; dim];
        let mut raw = vec![[0.0; 4]; dim];
        for o in outputs {
            for (j, &x) in o.iter().enumerate() {
                mean[j] += x;
                let x2 = x * x;
                raw[j][0] += x;
                raw[j][1] += x2;
                raw[j][2] += x2 * x;
                raw[j][3] += x2 * x2;
            }
        }
        for j in 0..dim {
            mean[j] /= nf;
            for m in raw[j].iter_mut() {
                *m /= nf;
            }
        }
        let mut ss = vec![0.0; dim];
        for o in outputs {
            for (j, &x) in o.iter().enumerate() {
                let d = x - mean[j];
                ss[j] += d * d;
            }
        }
        let standard_error = ss
            .iter()
            .map(|s| {
                if n < 2 {
                    f64::INFINITY
                } else {
                    (s / (nf - 1.0)).sqrt() / nf.sqrt()
                }
            })
            .collect();
        Self {
            replicates: n as u64,
            mean,
            standard_error,
            raw_moments: raw,
        }
    }
}

/// Runs `task` once per replicate index and summarizes the outputs, which
/// must all have the same length. The error of the lowest failing index is
/// returned wrapped in [`Error::Replicate`].
pub fn run_replicates<F>(plan: &McPlan, task: F) -> Result<McSummary>
where
    F: Fn(SeedSpec) -> Result<Vec<f64>> + Sync + Send,
{
    let outputs = collect_replicates(plan, task)?;
    if let Some(bad) = outputs.iter().position(|o| o.len() != outputs[0].len()) {
        return Err(Error::Replicate {
            index: bad as u64,
            source: Box::new(Error::DimensionMismatch("replicate outputs differ in length".into())),
        });
    }
    Ok(McSummary::from_outputs(&outputs))
}

/// Raw replicate outputs in index order.
pub fn collect_replicates<F, T>(plan: &McPlan, task: F) -> Result<Vec<T>>
where
    F: Fn(SeedSpec) -> Result<T> + Sync + Send,
    T: Send,
{
    if plan.replicates == 0 {
        return Err(Error::Config("replicates must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<T>> = pool.install(|| {
        (0..plan.replicates)
            .into_par_iter()
            .map(|i| task(SeedSpec::new(plan.master_seed, i)))
            .collect()
    });
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::Replicate {
                index: i as u64,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Delta-method standard error of a ratio `a / b` of independent estimates.
pub fn ratio_standard_error(a: f64, se_a: f64, b: f64, se_b: f64) -> f64 {
    (a / b).abs() * ((se_a / a).powi(2) + (se_b / b).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn constant_task() {
        let s = run_replicates(&McPlan::new(100, 7, 2), |_| Ok(vec![1.0])).unwrap();
        assert_eq!(s.mean, vec![1.0]);
        assert_eq!(s.standard_error, vec![0.0]);
        assert_eq!(s.raw_moments[0], [1.0; 4]);
    }

    #[test]
    fn independent_of_jobs() {
        let task = |seed: SeedSpec| -> Result<Vec<f64>> {
            let mut r = seed.rng();
            Ok(vec![r.random::<f64>(), r.random::<f64>().ln()])
        };
        let a = run_replicates(&McPlan::new(1000, 3, 1), task).unwrap();
        let b = run_replicates(&McPlan::new(1000, 3, 4), task).unwrap();
        let c = run_replicates(&McPlan::new(1000, 3, 16), task).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = run_replicates(&McPlan::new(1000, 4, 1), task).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn lowest_failing_index_is_reported() {
        let err = run_replicates(&McPlan::new(50, 1, 4), |s| {
            if s.replicate_index % 7 == 5 {
                Err(Error::NonPsd { jitter: 0.0 })
            } else {
                Ok(vec![0.0])
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::Replicate { index: 5, .. }));
    }

    #[test]
    fn single_replicate_has_infinite_error() {
        let s = run_replicates(&McPlan::new(1, 1, 1), |_| Ok(vec![2.0])).unwrap();
        assert!(s.standard_error[0].is_infinite());
        assert!(run_replicates(&McPlan::new(0, 1, 1), |_| Ok(vec![2.0])).is_err());
    }
}
