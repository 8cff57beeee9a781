use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("factor dimensions {factors:?} do not multiply to {dim}")]
    BadFactorization { factors: Vec<usize>, dim: usize },

    #[error("invalid subsystem selection {indices:?} for {count} factors")]
    InvalidSubsystem { indices: Vec<usize>, count: usize },

    #[error("Schatten index p = {0} is below 1")]
    InvalidSchattenIndex(f64),

    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("operator trace {trace} is not 1")]
    NotNormalized { trace: f64 },

    #[error("{name} = {value} outside the allowed range [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("marginal deviates from the maximally mixed state by {deviation:.3e}")]
    MarginalDeviation { deviation: f64 },

    #[error("projection did not converge after {iterations} sweeps (feasibility error {error:.3e})")]
    NonConvergence { iterations: usize, error: f64 },

    #[error("size guard exceeded: {what} = {value} > {limit}")]
    SizeGuard {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("empty Kraus list")]
    EmptyKraus,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
