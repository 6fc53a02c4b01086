use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("heat kernel requires t > 0, got {0}")]
    NonPositiveTime(f64),

    #[error("covariance is not positive semidefinite (failed after jitter {jitter:e})")]
    NonPsd { jitter: f64 },

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("support length {length} is not below 2*sqrt(pi); the lower bound is vacuous")]
    SupportTooLong { length: f64 },

    #[error("times must satisfy base < t_1 < ... < t_k: {0}")]
    OrderViolation(String),

    #[error("basis is not orthonormal (max deviation {deviation:e})")]
    BasisNotOrthonormal { deviation: f64 },

    #[error("matrix is numerically singular (smallest singular value {sigma_min:e})")]
    NearSingular { sigma_min: f64 },

    #[error("degenerate vector family (Gram determinant {det:e})")]
    DegenerateFamily { det: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("simplex integral order {0} is not supported (1..=4)")]
    UnsupportedOrder(usize),

    #[error("order {0} is outside the supported range 1..=12")]
    OrderOutOfRange(usize),

    #[error("Levy density requires a > 0, got {0}")]
    NonPositiveA(f64),

    #[error("bandwidth {epsilon} is below the floor {floor} (4 x max grid spacing)")]
    BandwidthTooSmall { epsilon: f64, floor: f64 },

    #[error("unknown process: {0}")]
    UnknownProcess(String),

    #[error("bivariate covariance is singular (det {det:e} at ({v1}, {v2}))")]
    SingularCovariance { det: f64, v1: f64, v2: f64 },

    #[error("time cutoff too coarse: predicted variance bias {bias:e} exceeds tolerance {tolerance:e}")]
    CutoffTooCoarse { bias: f64, tolerance: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("replicate {index}: {source}")]
    Replicate {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o: {0}")]
    Io(String),

    #[error("report format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
