use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] fanowave_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 for anything the user can fix in the configuration, 3 for numeric
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        use fanowave_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::InvalidParameter(_) | E::Configuration(_) | E::Unsupported(_)) => 2,
            CliError::Core(E::NumericDomain(_) | E::Accuracy(_)) => 3,
            CliError::Io(_) => 1,
        }
    }
}
