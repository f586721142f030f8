use std::fmt;

/// Failure of a CLI command, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(nswishart::Error),
    Io(String),
}

impl CliError {
    /// 2 config error, 3 numerical failure, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 4,
            CliError::Core(nswishart::Error::Io(_)) => 4,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<nswishart::Error> for CliError {
    fn from(e: nswishart::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
