use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid signature ({p},{q}): {reason}")]
    Signature { p: usize, q: usize, reason: String },

    #[error("basis vectors are linearly dependent over the reals (rank {rank} < {count})")]
    Rank { rank: usize, count: usize },

    #[error("matrix is not an involution (residual {residual:.3e})")]
    NotInvolution { residual: f64 },

    #[error("matrix is not invertible")]
    Singular,

    #[error("matrix does not preserve the group form (residual {residual:.3e})")]
    NotInGroup { residual: f64 },

    #[error("non-finite value encountered at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("flow did not reach a verdict within {iterations} iterations; raise max_iter")]
    Indeterminate { iterations: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("refusing max degree {requested}: supported range is 1..={max}")]
    Degree { requested: usize, max: usize },

    #[error("invalid curvature data: {0}")]
    Curvature(String),

    #[error("unknown catalog name `{name}`; valid names: {valid}")]
    UnknownCatalog { name: String, valid: String },

    #[error("invariant evaluation produced a non-real value (imaginary part {imag:.3e})")]
    NonReal { imag: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
