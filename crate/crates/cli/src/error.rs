use std::fmt;

use thiserror::Error;

/// Distinct diagnostic classes for scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    Malformed,
    UnknownKind,
    DimensionMismatch,
    UndeclaredLabel,
    InvalidValue,
    MissingField,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Malformed => "E001-malformed",
            Self::UnknownKind => "E002-unknown-kind",
            Self::DimensionMismatch => "E003-dimension-mismatch",
            Self::UndeclaredLabel => "E004-undeclared-label",
            Self::InvalidValue => "E005-invalid-value",
            Self::MissingField => "E006-missing-field",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A scenario rejected at parse or validation time.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{code} at `{field}`{}: {message}", .line.map(|l| format!(" (line {l})")).unwrap_or_default())]
pub struct ParseError {
    pub code: ErrorCode,
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    pub fn new(code: ErrorCode, field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code,
            field: field.into(),
            line: None,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("cannot read scenario {path}: {source}")]
    Read { path: String, source: std::io::Error },

    #[error("scenario is of kind `{found}` but the `{expected}` subcommand was used")]
    KindMismatch { expected: String, found: String },

    #[error("{context}: {source}")]
    Domain { context: String, source: weakval::Error },

    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
}

impl CliError {
    pub fn domain(context: impl Into<String>) -> impl FnOnce(weakval::Error) -> Self {
        let context = context.into();
        move |source| Self::Domain { context, source }
    }

    /// Process exit code: 2 for scenario problems, 3 for domain errors,
    /// 4 for internal invariant breaches, 1 for output I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) | Self::Read { .. } | Self::KindMismatch { .. } => 2,
            Self::Domain {
                source: weakval::Error::InvariantBreach(_),
                ..
            } => 4,
            Self::Domain { .. } => 3,
            Self::Write(_) => 1,
        }
    }
}
