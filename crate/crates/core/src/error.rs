use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A system or run configuration field failed validation.
    #[error("invalid configuration for `{field}`: {message}")]
    Config { field: String, message: String },

    /// A point does not belong to the state space of the system it was used with.
    #[error("point outside state space: {0}")]
    Domain(String),

    /// An iterate index or block lookup went past the horizon the system was built for.
    #[error("horizon exceeded: requested index {requested} but the cap is {cap}")]
    HorizonExceeded { requested: u64, cap: u64 },

    /// A malformed argument to an estimator or schedule builder.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Too few samples to evaluate a verdict at the requested settings.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The operation is not defined for this system.
    #[error("unsupported for system `{system}`: {message}")]
    Unsupported { system: String, message: String },
}

impl Error {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
