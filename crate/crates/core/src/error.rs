use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies on the charged screen")]
    OnScreen { x: f64, y: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error(
        "quadrature tolerance {tolerance:e} not met after {subdivisions} subdivisions \
         (error estimate {estimate:e})"
    )]
    ToleranceNotMet {
        tolerance: f64,
        estimate: f64,
        subdivisions: usize,
    },

    #[error("stop condition did not fire within {0} steps")]
    StepLimit(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("histogram specs differ")]
    SpecMismatch,

    #[error("histogram has no detected particles")]
    EmptyHistogram,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("array of length {len} is shorter than window {window}")]
    WindowTooLarge { len: usize, window: usize },

    #[error("worker pool: {0}")]
    WorkerPool(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
