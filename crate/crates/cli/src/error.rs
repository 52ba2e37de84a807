use std::fmt;
use std::process::ExitCode;

/// Exit status classes of the command-line tool.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitKind {
    /// Output could not be written.
    Io,
    /// Schema or input error: bad config, model, circuit or state label.
    Input,
    /// A runtime invariant (normalization, orthogonality, descent in strict mode) broke.
    Invariant,
}

impl ExitKind {
    pub fn code(self) -> u8 {
        match self {
            ExitKind::Io => 1,
            ExitKind::Input => 2,
            ExitKind::Invariant => 3,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Input, message: message.into() }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Invariant, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Io, message: message.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind.code())
    }

    /// Classifies a library error raised while a run executes.
    pub fn from_runtime(err: qfeedback_core::Error) -> Self {
        use qfeedback_core::Error;
        match err {
            e if e.is_invariant_failure() => CliError::invariant(e.to_string()),
            e @ Error::NoConvergence(_) => CliError::invariant(e.to_string()),
            e @ Error::Io(_) => CliError::io(e.to_string()),
            e => CliError::input(e.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;
