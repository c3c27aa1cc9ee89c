use thiserror::Error;

use crate::qp::QpError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate triangle {index} (signed area {area:e} m^2)")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("yield stress outside the admissible window: {0}")]
    YieldWindow(String),

    #[error("operation requires the {expected} interface model")]
    WrongModel { expected: &'static str },

    #[error(transparent)]
    Qp(#[from] QpError),

    #[error("step {step}: {source}")]
    Step { step: usize, source: Box<Error> },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::Step { step, source: Box::new(self) }
    }
}
