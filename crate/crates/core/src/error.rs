use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("negative discriminant {value:e} in symplectic spectrum (numerically inconsistent input)")]
    Discriminant { value: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("theta = {theta} lies outside [-{tolerance}, 1 + {tolerance}]; inconsistent with a thermal two-mode Gaussian state")]
    ThetaRange { theta: f64, tolerance: f64 },

    #[error("covariance matrix is not bona fide: {0}")]
    NotBonaFide(String),

    #[error("cutoff {cutoff} too small: tail mass {tail_mass:e} exceeds bound {bound:e}")]
    CutoffTooSmall {
        cutoff: usize,
        tail_mass: f64,
        bound: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),

    #[error("format error at line {line}: {message}")]
    Format { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
