use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("SVD failed to converge")]
    SvdFailed,
    #[error("dense size {size} exceeds cap {cap}")]
    DenseTooLarge { size: usize, cap: usize },
    #[error("foot point is not (d-1)-orthogonal")]
    NotOrthogonal,
    #[error("tangent vectors live at different foot points")]
    FootMismatch,
    #[error("operator is not symmetric (relative asymmetry {0:e})")]
    Asymmetric(f64),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Shape(msg.into()))
}

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
