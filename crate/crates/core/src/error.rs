use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A physical precondition of a closed-form result does not hold
    /// (e.g. the perturbation wavenumber is not below the mass).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("f-table window S = {actual} is too small: this sum needs S >= {required}")]
    WindowTooSmall { required: i64, actual: i64 },

    /// Population reached the edge of the truncated mode basis.
    #[error(
        "mode cutoff too small: boundary population {boundary:e} exceeds 1e-10 of total {total:e}"
    )]
    TruncationLeak { boundary: f64, total: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
