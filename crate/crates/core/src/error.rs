use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {d} exceeds the enumeration cap of {cap}")]
    DimensionTooLarge { d: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("grid scan over d = {d} with resolution {resolution} is not supported")]
    GridTooLarge { d: usize, resolution: usize },

    #[error("instance has no feasible binary point")]
    InfeasibleInstance,

    #[error("constraint index {index} out of range for {m} constraints")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("quadrature did not converge (estimated error {estimate:e})")]
    QuadratureNonConvergence { estimate: f64 },

    #[error("iteration did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("square loop centred at ({cx}, {cy}) with radius {radius} leaves (0, 1)^2")]
    LoopOutsideDomain { cx: f64, cy: f64, radius: f64 },

    #[error("the {0} estimator is only defined for one-dimensional instances")]
    UnsupportedEstimator(&'static str),

    #[error("failed to parse instance: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of an iterative numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. } | Error::NonConvergence { .. }
        )
    }
}
