use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported root system type {0:?}")]
    UnsupportedType(String),
    #[error("Weyl group closure not reached after {0} elements")]
    ClosureNotReached(usize),
    #[error("singular spectral parameter: {0}")]
    SingularParameter(String),
    #[error("pole encountered in the c-function at lambda_alpha = {0}")]
    PoleEncountered(num_complex::Complex64),
    #[error("c-function vanishes at the requested point: {0}")]
    ZeroOfC(String),
    #[error("point outside the admissible domain: {0}")]
    Domain(String),
    #[error("series did not converge within cap {cap} (last shell {last_shell:e})")]
    TruncationNotConverged { cap: usize, last_shell: f64 },
    #[error("insufficient decay at the grid boundary: relative boundary mass {0:e}")]
    InsufficientDecay(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
