//! Gram matrices and determinants of finite families in `L_2`, with the
//! determinant identities and inequalities used for moment bounds of
//! smoothed local times.
//!
//! Functions are represented on a [`CellGrid`]: a step function with cell
//! values `x_i` becomes the coordinate vector `sqrt(w_i) x_i`, so Euclidean
//! inner products of coordinates are exact `L_2` inner products.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_endpoint_singular, Tolerance};
use crate::report::SuiteReport;
use crate::sampling::SeedSpec;

/// Finite family of same-dimension coordinate vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    dim: usize,
    vectors: Vec<DVector<f64>>,
}

impl VectorFamily {
    pub fn new(vectors: Vec<DVector<f64>>) -> Result<Self> {
        let dim = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::DimensionMismatch("family must be nonempty; use VectorFamily::empty".into()))?;
        Self::with_dim(dim, vectors)
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            vectors: Vec::new(),
        }
    }

    pub fn with_dim(dim: usize, vectors: Vec<DVector<f64>>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in family of dimension {dim}",
                v.len()
            )));
        }
        Ok(Self { dim, vectors })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| DVector::from_column_slice(r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// Concatenation `(self, other)`.
    pub fn chain(&self, other: &VectorFamily) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        let mut v = self.vectors.clone();
        v.extend(other.vectors.iter().cloned());
        Ok(Self {
            dim: self.dim,
            vectors: v,
        })
    }

    pub fn map(&self, f: impl Fn(&DVector<f64>) -> DVector<f64>) -> Result<Self> {
        let v: Vec<_> = self.vectors.iter().map(f).collect();
        match v.first() {
            Some(first) => Self::with_dim(first.len(), v),
            None => Ok(Self::empty(self.dim)),
        }
    }

    pub fn gram(&self) -> GramMatrix {
        let k = self.vectors.len();
        let mut m = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..=i {
                let d = self.vectors[i].dot(&self.vectors[j]);
                m[(i, j)] = d;
                m[(j, i)] = d;
            }
        }
        GramMatrix { entries: m }
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.gram();
        let k = self.len();
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.entries[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Gram-Schmidt (modified, two passes) orthonormalization.
    pub fn orthonormalized(&self) -> Result<Self> {
        let mut out: Vec<DVector<f64>> = Vec::with_capacity(self.len());
        for v in &self.vectors {
            let mut w = v.clone();
            for _ in 0..2 {
                for q in &out {
                    let c = q.dot(&w);
                    w -= q * c;
                }
            }
            let n = w.norm();
            if n <= 1e-12 * v.norm().max(f64::MIN_POSITIVE) {
                return Err(Error::DegenerateFamily { det: 0.0 });
            }
            out.push(w / n);
        }
        Self::with_dim(self.dim, out)
    }

    /// Applies `I - P` with `P` the orthogonal projection onto `span(basis)`;
    /// `basis` must be orthonormal.
    pub fn project_out(&self, basis: &VectorFamily) -> Result<Self> {
        self.map(|g| {
            let mut r = g.clone();
            for e in basis.vectors() {
                r -= e * e.dot(g);
            }
            r
        })
    }
}

/// Symmetric positive semidefinite matrix of inner products.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
}

impl GramMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// `ln det` through a Cholesky factorization of the symmetrized matrix;
    /// `None` when a pivot is not positive (numerically dependent family).
    pub fn log_det(&self) -> Option<f64> {
        let n = self.entries.nrows();
        if n == 0 {
            return Some(0.0);
        }
        let mut l = DMatrix::<f64>::zeros(n, n);
        let mut log_det = 0.0;
        for j in 0..n {
            let mut d = self.entries[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return None;
            }
            let ljj = d.sqrt();
            l[(j, j)] = ljj;
            log_det += d.ln();
            for i in (j + 1)..n {
                let mut s = 0.5 * (self.entries[(i, j)] + self.entries[(j, i)]);
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Some(log_det)
    }

    pub fn det(&self) -> f64 {
        self.log_det().map_or(0.0, f64::exp)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.entries.nrows() == 0 {
            return 0.0;
        }
        self.entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// `G(g_1, ..., g_k) = det (g_i, g_j)`; 1 for the empty family.
pub fn gram_det(family: &VectorFamily) -> f64 {
    family.gram().det()
}

/// Closed-form Gram determinant of `1_[base, t_1], ..., 1_[base, t_k]`:
/// `(t_1 - base)(t_2 - t_1)...(t_k - t_{k-1})`.
pub fn gram_indicators(times: &[f64], base: f64) -> Result<f64> {
    let mut prev = base;
    let mut prod = 1.0;
    for &t in times {
        if !(t > prev) {
            return Err(Error::OrderViolation(format!("{t} does not exceed {prev}")));
        }
        prod *= t - prev;
        prev = t;
    }
    Ok(prod)
}

/// Partition of an interval into cells with weights equal to their lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid {
    edges: Vec<f64>,
}

impl CellGrid {
    pub fn new(mut edges: Vec<f64>) -> Result<Self> {
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        if edges.len() < 2 {
            return Err(Error::InvalidGrid("cell grid needs two distinct edges".into()));
        }
        Ok(Self { edges })
    }

    pub fn uniform(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        if cells == 0 || !(hi > lo) {
            return Err(Error::InvalidGrid(format!("bad cell grid [{lo}, {hi}] x {cells}")));
        }
        let h = (hi - lo) / cells as f64;
        let mut e: Vec<f64> = (0..=cells).map(|i| lo + i as f64 * h).collect();
        e[cells] = hi;
        Self::new(e)
    }

    /// The same grid with additional edges inserted (clipped to the range).
    pub fn refined(&self, extra: &[f64]) -> Result<Self> {
        let (lo, hi) = (self.edges[0], self.edges[self.edges.len() - 1]);
        let mut e = self.edges.clone();
        e.extend(extra.iter().copied().filter(|x| *x > lo && *x < hi));
        Self::new(e)
    }

    pub fn cells(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Coordinates of the step function whose value on cell `[a, b]` is
    /// `average(a, b)`.
    pub fn embed_cell_averages(&self, average: impl Fn(f64, f64) -> f64) -> DVector<f64> {
        DVector::from_iterator(
            self.cells(),
            self.edges
                .windows(2)
                .map(|w| (w[1] - w[0]).sqrt() * average(w[0], w[1])),
        )
    }

    /// `1_[lo, hi]`, exact when `lo` and `hi` are cell edges (otherwise the
    /// partially covered cells carry the covered fraction).
    pub fn indicator(&self, lo: f64, hi: f64) -> DVector<f64> {
        self.embed_cell_averages(|a, b| {
            let overlap = (hi.min(b) - lo.max(a)).max(0.0);
            overlap / (b - a)
        })
    }

    /// `1_[base, t_1], ..., 1_[base, t_k]`.
    pub fn indicator_family(&self, times: &[f64], base: f64) -> VectorFamily {
        let v = times.iter().map(|&t| self.indicator(base, t)).collect();
        VectorFamily::with_dim(self.cells(), v).expect("indicator coordinates share the grid dimension")
    }

    /// Edge closest to `x`.
    pub fn snap(&self, x: f64) -> f64 {
        let i = self.edges.partition_point(|e| *e < x);
        let cand = [i.saturating_sub(1), i.min(self.edges.len() - 1)];
        cand.iter()
            .map(|&j| self.edges[j])
            .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
            .expect("two candidates")
    }
}

/// Scale below which Gram determinants are rounding noise, as a fraction of
/// the Hadamard bound `prod |g_i|^2`: the relative tolerance 1e-8 then
/// allows an absolute error of 1e-14 of the bound.
pub const PROJECTION_FLOOR: f64 = 1e-6;

pub fn hadamard_bound(family: &VectorFamily) -> f64 {
    family.vectors().iter().map(|v| v.norm_squared()).product()
}

fn relative_gap(a: f64, b: f64, floor: f64) -> (f64, f64) {
    let tol = 1e-8 * a.abs().max(b.abs()).max(floor);
    ((a - b).abs(), tol)
}

/// `G((I - P_L) g_1, ..., (I - P_L) g_k) = G(g_1, ..., g_k, e_1, ..., e_n)` for
/// an orthonormal basis `e` of `L`, both sides evaluated explicitly.
pub fn check_projection_identity(g: &VectorFamily, basis: &VectorFamily) -> Result<SuiteReport> {
    let defect = basis.orthonormality_defect();
    if defect > 1e-10 {
        return Err(Error::BasisNotOrthonormal { deviation: defect });
    }
    let lhs = gram_det(&g.project_out(basis)?);
    let rhs = gram_det(&g.chain(basis)?);
    let (gap, tol) = relative_gap(lhs, rhs, PROJECTION_FLOOR * hadamard_bound(g));
    let mut r = SuiteReport::closeness("projection-identity", "Lemma 2.2 (Gram)", vec![lhs], vec![rhs], tol);
    r.detail = format!("gap {gap:e}");
    Ok(r)
}

/// `G(A e_1, ..., A e_n) >= ||A^{-1}||^{-2n} G(e_1, ..., e_n)` with
/// `||A^{-1}|| = 1 / sigma_min(A)`.
pub fn check_invertible_gram_bound(matrix: &DMatrix<f64>, family: &VectorFamily) -> Result<SuiteReport> {
    if !matrix.is_square() || matrix.ncols() != family.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on dimension {}",
            matrix.nrows(),
            matrix.ncols(),
            family.dim()
        )));
    }
    let sigma_min = matrix
        .clone()
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(sigma_min > 1e-8) {
        return Err(Error::NearSingular { sigma_min });
    }
    let image = family.map(|e| matrix * e)?;
    let lhs = gram_det(&image);
    let bound = sigma_min.powi(2 * family.len() as i32) * gram_det(family);
    Ok(
        SuiteReport::lower_bound("invertible-gram-bound", "Theorem 2.3", lhs, bound, 1e-10)
            .with_detail(format!("sigma_min {sigma_min:e}")),
    )
}

/// Minimum over indicator families of `G(ind, f, e) / G(ind, f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionProbe {
    pub min_ratio: f64,
    pub argmin: usize,
    /// Set when the minimum falls below 1e-12.
    pub degenerate: bool,
}

pub fn probe_basis_extension_ratio(
    step_basis: &VectorFamily,
    smooth_basis: &VectorFamily,
    indicator_families: &[VectorFamily],
) -> Result<ExtensionProbe> {
    let mut min_ratio = f64::INFINITY;
    let mut argmin = 0;
    for (i, ind) in indicator_families.iter().enumerate() {
        let base = ind.chain(step_basis)?;
        let denom = gram_det(&base);
        if denom < 1e-14 {
            return Err(Error::DegenerateFamily { det: denom });
        }
        let num = gram_det(&base.chain(smooth_basis)?);
        let ratio = num / denom;
        if ratio < min_ratio {
            min_ratio = ratio;
            argmin = i;
        }
    }
    if indicator_families.is_empty() {
        min_ratio = 1.0;
    }
    Ok(ExtensionProbe {
        min_ratio,
        argmin,
        degenerate: min_ratio < 1e-12,
    })
}

/// Numerical value of a simplex integral with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexIntegral {
    pub value: f64,
    /// Quadrature error estimate (k <= 2) or Monte Carlo standard error.
    pub error: f64,
    pub monte_carlo: bool,
}

/// Closed form `pi^{(k+1)/2} / Gamma((k+1)/2)` of
/// `int_{Delta_k} (v_1 (v_2 - v_1) ... (1 - v_k))^{-1/2} dv`.
pub fn dirichlet_simplex_closed_form(k: usize) -> f64 {
    let a = (k as f64 + 1.0) / 2.0;
    PI.powf(a) / gamma(a)
}

const SIMPLEX_MC_POINTS: u64 = 10_000_000;
const SIMPLEX_MC_SEED: u64 = 0x5EED_0F51_3B1E;

/// `int_{0 < v_1 < ... < v_k < 1} (v_1 (v_2 - v_1) ... (v_k - v_{k-1}) (1 - v_k))^{-1/2} dv`:
/// iterated adaptive quadrature for `k <= 2`, Monte Carlo with 10^7 points
/// for `k = 3, 4`.
pub fn dirichlet_simplex_integral(k: usize) -> Result<SimplexIntegral> {
    dirichlet_simplex_integral_with(k, SIMPLEX_MC_POINTS, SIMPLEX_MC_SEED)
}

pub fn dirichlet_simplex_integral_with(k: usize, mc_points: u64, seed: u64) -> Result<SimplexIntegral> {
    match k {
        1 => {
            let tol = Tolerance::new(1e-14, 1e-13);
            let e = adaptive_endpoint_singular(|v| 1.0 / (v * (1.0 - v)).sqrt(), 0.0, 1.0, tol)?;
            Ok(SimplexIntegral {
                value: e.value,
                error: e.error,
                monte_carlo: false,
            })
        }
        2 => {
            let e = simplex2_region(0.0, 1.0, Region::Whole)?;
            Ok(SimplexIntegral {
                value: e.0,
                error: e.1,
                monte_carlo: false,
            })
        }
        3 | 4 => Ok(simplex_monte_carlo(k, mc_points, seed)),
        _ => Err(Error::UnsupportedOrder(k)),
    }
}

/// Importance sampling with spacings drawn from Dirichlet(3/4, ..., 3/4):
/// the weight `prod D_i^{-1/2} / q(D)` has finite variance.
fn simplex_monte_carlo(k: usize, points: u64, seed: u64) -> SimplexIntegral {
    const ALPHA: f64 = 0.75;
    const CHUNK: u64 = 100_000;
    let parts = k as f64 + 1.0;
    let log_c = parts * ln_gamma(ALPHA) - ln_gamma(parts * ALPHA);
    let gamma_dist = Gamma::new(ALPHA, 1.0).expect("valid gamma parameters");
    let chunks = points.div_ceil(CHUNK);
    let sums: Vec<(f64, f64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = SeedSpec::new(seed, c).rng();
            let n = CHUNK.min(points - c * CHUNK);
            let mut g = [0.0f64; 5];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let mut total = 0.0;
                for gi in g.iter_mut().take(k + 1) {
                    *gi = gamma_dist.sample(&mut rng);
                    total += *gi;
                }
                let mut log_w = log_c;
                for gi in g.iter().take(k + 1) {
                    log_w += (0.5 - ALPHA) * (gi / total).ln();
                }
                let w = log_w.exp();
                s1 += w;
                s2 += w * w;
            }
            (s1, s2, n)
        })
        .collect();
    let (s1, s2, n) = sums
        .iter()
        .fold((0.0, 0.0, 0u64), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let nf = n as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean) * nf / (nf - 1.0);
    SimplexIntegral {
        value: mean,
        error: (var / nf).sqrt(),
        monte_carlo: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Region {
    Whole,
    /// `I_{2,0}`: both points left of the split.
    Left(f64),
    /// `I_{1,1}`: one point on each side of the split.
    Straddle(f64),
    /// `I_{0,2}`: both points right of the split.
    Right(f64),
}

/// `int (v_1 - a)^{-1/2} (v_2 - v_1)^{-1/2} (b - v_2)^{-1/2}` over a region of
/// `Delta_2(a, b)`, iterated with the endpoint substitution on both levels.
fn simplex2_region(a: f64, b: f64, region: Region) -> Result<(f64, f64)> {
    let inner_tol = Tolerance {
        abs: 1e-14,
        rel: 1e-12,
        max_panels: 4000,
    };
    let outer_tol = Tolerance {
        abs: 1e-12,
        rel: 1e-10,
        max_panels: 4000,
    };
    let (v1_lo, v1_hi) = match region {
        Region::Whole => (a, b),
        Region::Left(s) | Region::Straddle(s) => (a, s),
        Region::Right(s) => (s, b),
    };
    let mut failure = None;
    let mut inner_err = 0.0f64;
    let outer = adaptive_endpoint_singular(
        |v1| {
            let (lo, hi) = match region {
                Region::Whole | Region::Right(_) => (v1, b),
                Region::Left(s) => (v1, s),
                Region::Straddle(s) => (s, b),
            };
            if hi <= lo {
                return 0.0;
            }
            // Offsets from `lo` keep `v2 - v1` exact near the diagonal.
            let (gap, len) = (lo - v1, hi - lo);
            let right = b - lo;
            let res = adaptive_endpoint_singular(
                |y| 1.0 / ((y + gap) * (right - y)).max(f64::MIN_POSITIVE).sqrt(),
                0.0,
                len,
                inner_tol,
            );
            match res {
                Ok(e) => {
                    inner_err = inner_err.max(e.error);
                    e.value / (v1 - a).max(f64::MIN_POSITIVE).sqrt()
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        v1_lo,
        v1_hi,
        outer_tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((outer.value, outer.error + inner_err * (v1_hi - v1_lo)))
}

/// Blocks `I_{2,0}`, `I_{1,1}`, `I_{0,2}` of `Delta_2(a, b)` split at `s`, and
/// the whole-simplex integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexPartition {
    pub blocks: [f64; 3],
    pub whole: f64,
    pub error: f64,
}

pub fn simplex_partition(a: f64, s: f64, b: f64) -> Result<SimplexPartition> {
    if !(a < s && s < b) {
        return Err(Error::OrderViolation(format!("need a < s < b, got {a}, {s}, {b}")));
    }
    let left = simplex2_region(a, b, Region::Left(s))?;
    let straddle = simplex2_region(a, b, Region::Straddle(s))?;
    let right = simplex2_region(a, b, Region::Right(s))?;
    let whole = simplex2_region(a, b, Region::Whole)?;
    Ok(SimplexPartition {
        blocks: [left.0, straddle.0, right.0],
        whole: whole.0,
        error: left.1 + straddle.1 + right.1 + whole.1,
    })
}

/// `k! (2 pi)^{-k/2} int_{Delta_k} ...`: the k-th moment of Brownian-bridge
/// local time at zero written as a simplex integral of the bridge density.
pub fn bridge_moment_via_simplex(k: usize) -> Result<SimplexIntegral> {
    let s = dirichlet_simplex_integral(k)?;
    let factor = (1..=k).map(|i| i as f64).product::<f64>() * (2.0 * PI).powf(-(k as f64) / 2.0);
    Ok(SimplexIntegral {
        value: factor * s.value,
        error: factor * s.error,
        monte_carlo: s.monte_carlo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn orthonormal_pair_and_duplicate() {
        let f = VectorFamily::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert_relative_eq!(gram_det(&f), 1.0, epsilon = 1e-15);
        let d = VectorFamily::from_rows(&[vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(gram_det(&d).abs() < 1e-10);
        assert_eq!(gram_det(&VectorFamily::empty(3)), 1.0);
    }

    #[test]
    fn nested_indicators_on_cells() {
        let grid = CellGrid::uniform(0.0, 1.0, 1024).unwrap();
        let fam = grid.indicator_family(&[0.5, 1.0], 0.0);
        assert_relative_eq!(gram_det(&fam), 0.25, epsilon = 1e-12);
        assert_eq!(gram_indicators(&[0.5, 1.0], 0.0).unwrap(), 0.25);
        assert_eq!(gram_indicators(&[1.0], 0.0).unwrap(), 1.0);
    }

    #[test]
    fn indicator_order_violation() {
        assert!(matches!(
            gram_indicators(&[0.5, 0.4], 0.0),
            Err(Error::OrderViolation(_))
        ));
        assert!(gram_indicators(&[0.0], 0.0).is_err());
    }

    #[test]
    fn projection_identity_extremes() {
        let e = VectorFamily::from_rows(&[vec![1.0, 0.0, 0.0]]).unwrap();
        let orth = VectorFamily::from_rows(&[vec![0.0, 2.0, 1.0]]).unwrap();
        let r = check_projection_identity(&orth, &e).unwrap();
        assert!(r.passed());
        assert_relative_eq!(r.observed[0], gram_det(&orth), epsilon = 1e-14);
        let inside = VectorFamily::from_rows(&[vec![3.0, 0.0, 0.0]]).unwrap();
        let r = check_projection_identity(&inside, &e).unwrap();
        assert!(r.passed());
        assert!(r.observed[0].abs() < 1e-20 && r.expected[0].abs() < 1e-12);
        let bad = VectorFamily::from_rows(&[vec![1.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(
            check_projection_identity(&orth, &bad),
            Err(Error::BasisNotOrthonormal { .. })
        ));
    }

    #[test]
    fn invertible_bound_scaling() {
        let fam = VectorFamily::from_rows(&[vec![1.0, 0.5, 0.0], vec![0.2, 1.0, 0.3]]).unwrap();
        let id = DMatrix::<f64>::identity(3, 3);
        let r = check_invertible_gram_bound(&id, &fam).unwrap();
        assert!(r.passed());
        assert_relative_eq!(r.observed[0], r.expected[0], max_relative = 1e-14);
        let two = id * 2.0;
        let r = check_invertible_gram_bound(&two, &fam).unwrap();
        assert_relative_eq!(r.observed[0], 16.0 * gram_det(&fam), max_relative = 1e-13);
        assert_relative_eq!(r.expected[0], 16.0 * gram_det(&fam), max_relative = 1e-13);
        assert!(r.passed());
        let sing = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            check_invertible_gram_bound(&sing, &fam),
            Err(Error::NearSingular { .. })
        ));
    }

    #[test]
    fn probe_trivial_cases() {
        let ind = vec![VectorFamily::from_rows(&[vec![1.0, 0.0, 0.0]]).unwrap()];
        let step = VectorFamily::from_rows(&[vec![0.0, 1.0, 0.0]]).unwrap();
        let smooth = VectorFamily::from_rows(&[vec![0.0, 0.0, 1.0]]).unwrap();
        let p = probe_basis_extension_ratio(&step, &smooth, &ind).unwrap();
        assert_eq!(p.min_ratio, 1.0);
        let p = probe_basis_extension_ratio(&step, &VectorFamily::empty(3), &ind).unwrap();
        assert_eq!(p.min_ratio, 1.0);
        let dup = vec![VectorFamily::from_rows(&[vec![0.0, 1.0, 0.0]]).unwrap()];
        assert!(matches!(
            probe_basis_extension_ratio(&step, &smooth, &dup),
            Err(Error::DegenerateFamily { .. })
        ));
    }

    #[test]
    fn simplex_low_orders() {
        let s1 = dirichlet_simplex_integral(1).unwrap();
        assert_relative_eq!(s1.value, PI, max_relative = 1e-10);
        let s2 = dirichlet_simplex_integral(2).unwrap();
        assert_relative_eq!(s2.value, 2.0 * PI, max_relative = 1e-6);
        assert!(dirichlet_simplex_integral(5).is_err());
        assert!(dirichlet_simplex_integral(0).is_err());
    }

    #[test]
    fn closed_form_first_orders() {
        assert_relative_eq!(dirichlet_simplex_closed_form(1), PI, max_relative = 1e-14);
        assert_relative_eq!(dirichlet_simplex_closed_form(2), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(dirichlet_simplex_closed_form(3), PI * PI, max_relative = 1e-14);
    }

    #[test]
    fn snapping_to_edges() {
        let g = CellGrid::uniform(0.0, 1.0, 4).unwrap();
        assert_eq!(g.snap(0.3), 0.25);
        assert_eq!(g.snap(0.9), 1.0);
        assert_eq!(g.snap(-1.0), 0.0);
    }
}
