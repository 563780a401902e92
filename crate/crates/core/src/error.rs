use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("scale cap exceeded: {what} is {actual}, cap is {cap}")]
    ScaleCap { what: &'static str, actual: usize, cap: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ScaleCap { .. } => 3,
            Error::Infeasible(_) => 4,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "invalid",
            Error::Parse(_) => "parse",
            Error::ScaleCap { .. } => "scale_cap",
            Error::Infeasible(_) => "infeasible",
            Error::Disconnected => "disconnected",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
