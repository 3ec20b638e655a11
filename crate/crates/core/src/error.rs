use thiserror::Error;

/// Errors raised by the cloning, optimization and entanglement routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subsystem shape {dims:?} does not match matrix dimension {dim}")]
    ShapeMismatch { dims: Vec<usize>, dim: usize },

    #[error("invalid subsystem index {index} for {factors} factors")]
    InvalidSubsystem { index: usize, factors: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not a density matrix: {0}")]
    NotDensity(String),

    #[error("state is not normalized (norm² = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid cloner parameters: {0}")]
    InvalidParams(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("no-signaling condition violated (residual {residual:e})")]
    NoSignalingViolated { residual: f64 },

    #[error("quality bound violated: eta_a² + eta_b² = {value} > 1")]
    BoundViolated { value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
