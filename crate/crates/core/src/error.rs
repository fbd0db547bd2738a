use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("axis {axis} out of range for a {axes_total}-axis lattice")]
    AxisOutOfRange { axis: usize, axes_total: usize },

    #[error("Hermite degree {degree} exceeds the configured cap {cap}")]
    HermiteDegreeTooLarge { degree: usize, cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("memory budget exceeded: {required_bytes} bytes required, budget is {budget_bytes} bytes; reduce n_max")]
    MemoryBudget {
        required_bytes: u128,
        budget_bytes: u128,
    },

    #[error("unstable time step: dt = {dt} violates dt < {limit}; try dt = {suggested}")]
    Unstable { dt: f64, limit: f64, suggested: f64 },

    #[error("eigendecomposition failed: {message}\n{matrix_dump}")]
    Diagonalization {
        message: String,
        matrix_dump: String,
    },

    #[error("matrix exponential failed: {0}")]
    Exponential(String),

    #[error("insufficient history: need at least {needed} time slices, found {found}")]
    InsufficientHistory { needed: usize, found: usize },

    #[error("non-uniform time step in history at slice {index}")]
    NonUniformStep { index: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
