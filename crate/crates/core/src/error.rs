use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The basis is too small for the requested tail tolerance or buffer.
    #[error("truncation insufficient: dim {dim} < required {required_dim} ({reason})")]
    Truncation {
        dim: usize,
        required_dim: usize,
        reason: String,
    },

    #[error("stretch exponents differ: {0} vs {1}")]
    SigmaMismatch(f64, f64),

    #[error("weight function is singular at |z|^2 = 0 for sigma = {0} < 1")]
    Singularity(f64),

    #[error("quadrature needs at least {required} radial nodes, got {available}")]
    InsufficientNodes { required: usize, available: usize },

    #[error("kernels were sampled on different grids")]
    GridMismatch,

    #[error("normal-ordered series did not decay below {threshold:e} within {steps} terms (last term {last:e})")]
    SeriesNonConvergence {
        steps: usize,
        last: f64,
        threshold: f64,
    },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
