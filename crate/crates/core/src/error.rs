use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar function was evaluated outside its domain.
    #[error("domain error: {function} is not defined at {value:e}")]
    Domain { function: String, value: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The eigensolver exhausted its sweep budget.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    /// Syntax error in a function expression; `offset` is a byte offset.
    #[error("syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// `f''` vanishes (or is negative) where a strictly convex function is required.
    #[error("affine or degenerate function: {0}")]
    Degenerate(String),

    #[error("not invertible as a positive operator: minimal kernel entry {min_entry:e}")]
    NotInvertible { min_entry: f64 },

    #[error("singular matrix: minimal eigenvalue {min_eigenvalue:e}")]
    Singular { min_eigenvalue: f64 },

    #[error("channel is not trace preserving (defect {defect:e})")]
    NotTracePreserving { defect: f64 },

    #[error("not an isometry (defect {defect:e})")]
    NotIsometry { defect: f64 },

    #[error("unknown function: {0}")]
    UnknownFunction(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
