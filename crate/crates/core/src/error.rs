use alloc::string::String;

/// Errors raised while building discretizations, operators or iterations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("ill-conditioned nodes: spacing {spacing:e} below {threshold:e}")]
    Conditioning { spacing: f64, threshold: f64 },

    #[error("matrix is singular or numerically singular (pivot {pivot:e}, threshold {threshold:e})")]
    Singular { pivot: f64, threshold: f64 },

    #[error("stability function has a pole at z = {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("assumption violated: {assumption} (residual {residual:e})")]
    Assumption {
        assumption: &'static str,
        residual: f64,
    },

    #[error("inconsistent block iteration `{label}`: residual {residual:e}")]
    Inconsistent { label: String, residual: f64 },

    #[error("method `{method}` needs {missing}")]
    MissingOperator {
        method: String,
        missing: &'static str,
    },

    #[error("global system too large: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;
