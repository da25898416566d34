use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar argument is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Shapes or indices do not line up.
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// The problem itself is ill-posed (e.g. a constraint matrix without full rank).
    #[error("model error: {0}")]
    Model(String),

    /// A closed-form bound was requested outside the regime where it holds.
    #[error("condition not met: {condition} ({detail})")]
    ConditionNotMet { condition: &'static str, detail: String },
}

impl Error {
    /// Short machine-readable category, used for CLI exit reporting.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter",
            Error::Structural(_) => "structural",
            Error::Model(_) => "model",
            Error::ConditionNotMet { .. } => "condition_not_met",
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn condition(condition: &'static str, detail: impl Into<String>) -> Self {
        Error::ConditionNotMet {
            condition,
            detail: detail.into(),
        }
    }
}
