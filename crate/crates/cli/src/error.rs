use std::fmt;

/// Errors surfaced to the command line, split by exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Unreadable or malformed input: exit 3.
    Parse(String),
    /// Well-formed input that violates a mathematical requirement: exit 2.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) => 3,
            Self::Domain(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Parse(_) => "parse",
            Self::Domain(_) => "domain",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Parse(m) | Self::Domain(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

pub fn domain(e: impl fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

pub fn parse(e: impl fmt::Display) -> CliError {
    CliError::Parse(e.to_string())
}
