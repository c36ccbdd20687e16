use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A NaN or infinity showed up where a finite number was required.
    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    /// The requested combination of parameters has no derivation behind it,
    /// e.g. a bound-state kernel with dissipation.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// Grids, time steps or sampling choices that cannot give a faithful
    /// answer for the requested run.
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("accuracy error: {0}")]
    Accuracy(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
