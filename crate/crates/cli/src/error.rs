use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const UNSUPPORTED: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const VERDICT: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] minkruled::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use minkruled::Error as E;
        match self {
            CliError::Core(E::UnsupportedClass(_) | E::CylindricalRuling(_)) => exit::UNSUPPORTED,
            CliError::Core(E::PreconditionViolated(_) | E::Degenerate(_)) => exit::PRECONDITION,
            _ => exit::INPUT,
        }
    }
}
