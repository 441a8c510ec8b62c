use std::fmt;

use thiserror::Error;

use crate::error::JetError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Distinct error classes of the session language.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCode {
    Lexical,
    Syntax,
    UnknownName,
    Parity,
    Arity,
    Duplicate,
    InvalidExpression,
    OrderLimit,
}

impl ErrorCode {
    pub fn code(self) -> &'static str {
        match self {
            ErrorCode::Lexical => "E001",
            ErrorCode::Syntax => "E002",
            ErrorCode::UnknownName => "E003",
            ErrorCode::Parity => "E004",
            ErrorCode::Arity => "E005",
            ErrorCode::Duplicate => "E006",
            ErrorCode::InvalidExpression => "E007",
            ErrorCode::OrderLimit => "E008",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("error[{}] at {pos}: {message}", code.code())]
pub struct ParseError {
    pub code: ErrorCode,
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub fn new(code: ErrorCode, pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            code,
            pos,
            message: message.into(),
        }
    }

    /// Engine errors raised while building a declaration, mapped onto the
    /// matching language error class.
    pub fn from_engine(pos: Pos, e: JetError) -> Self {
        let code = match e {
            JetError::ParityInhomogeneous | JetError::VelocityParity { .. } => ErrorCode::Parity,
            JetError::ArityMismatch { .. }
            | JetError::BundleMismatch { .. }
            | JetError::NotSquare { .. } => ErrorCode::Arity,
            JetError::UnresolvedBracket(_) => ErrorCode::UnknownName,
            JetError::NotAntisymmetric { .. } | JetError::NotBilinear | JetError::VelocityDependence { .. } => ErrorCode::InvalidExpression,
        };
        ParseError::new(code, pos, e.to_string())
    }
}

/// Failure while running a check against a parsed session.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("unknown check command `{0}`")]
    UnknownCommand(String),
    #[error("`{command}` expects {expected}")]
    BadArguments { command: String, expected: String },
    #[error("no {kind} named `{name}`")]
    Unresolved { kind: String, name: String },
    #[error(transparent)]
    Engine(#[from] JetError),
}
