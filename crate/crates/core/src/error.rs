use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("singular evaluation: {0}")]
    Singularity(String),

    #[error("too close to a region boundary: {0}")]
    Boundary(String),

    #[error("derivative of order {requested} unsupported (analytic derivatives available to order {max})")]
    UnsupportedOrder { requested: usize, max: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Iterative evaluation did not reach the requested accuracy. Carries the
    /// best available estimate.
    #[error("accuracy not reached: {message} (best {best}, error estimate {error_estimate:e})")]
    Accuracy {
        message: String,
        best: Complex64,
        error_estimate: f64,
    },

    #[error("insufficient data: {0}")]
    Data(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse(format!("{other:?}")),
        }
    }
}
