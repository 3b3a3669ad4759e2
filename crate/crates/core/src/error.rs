use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("weight error: weights sum to {sum:.17}, deficit {deficit:e}")]
    WeightSum { sum: f64, deficit: f64 },
    #[error("weight error: atom {index} has non-positive weight {weight}")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("weight error: {0}")]
    Weights(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("value error: non-finite {what}")]
    NonFinite { what: String },
    #[error("parameter error: {name} = {value} ({reason})")]
    Parameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("parameter error: time index {t} outside 1..={max}")]
    TimeOutOfRange { t: usize, max: usize },
    #[error("size error: grid needs {cells} cells, cap is {cap}; raise the grid step or lower the radius multiplier")]
    GridTooLarge { cells: u128, cap: u64 },
    #[error("size error: {0}")]
    TooLarge(String),
    #[error("numeric error: problem is infeasible ({0})")]
    Infeasible(String),
    #[error("numeric error: solver stalled after {iterations} iterations")]
    Stalled { iterations: usize },
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by bad input rather than by a numerical failure.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Infeasible(_) | Error::Stalled { .. } | Error::Numeric(_)
        )
    }

    pub(crate) fn param(name: &'static str, value: impl ToString, reason: &'static str) -> Self {
        Error::Parameter {
            name,
            value: value.to_string(),
            reason,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
