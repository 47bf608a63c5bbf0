use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::term::Name;

/// Closed set of failure kinds; negative tests assert on these, not on message text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ErrorClass {
    UnboundVariable,
    UnknownConstant,
    NotAFunction,
    NotAPair,
    UniverseMismatch,
    UnsolvedMeta,
    TypeMismatch,
    DuplicateName,
    RewriteHeadIsDefinition,
    NonlinearPattern,
    RewriteTypeMismatch,
    MalformedRewrite,
    BadImplicit,
    FuelExhausted,
    ParseError,
    IllegalCharacter,
    ImportFailed,
}

impl ErrorClass {
    pub const ALL: [ErrorClass; 17] = [
        ErrorClass::UnboundVariable,
        ErrorClass::UnknownConstant,
        ErrorClass::NotAFunction,
        ErrorClass::NotAPair,
        ErrorClass::UniverseMismatch,
        ErrorClass::UnsolvedMeta,
        ErrorClass::TypeMismatch,
        ErrorClass::DuplicateName,
        ErrorClass::RewriteHeadIsDefinition,
        ErrorClass::NonlinearPattern,
        ErrorClass::RewriteTypeMismatch,
        ErrorClass::MalformedRewrite,
        ErrorClass::BadImplicit,
        ErrorClass::FuelExhausted,
        ErrorClass::ParseError,
        ErrorClass::IllegalCharacter,
        ErrorClass::ImportFailed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::UnboundVariable => "UnboundVariable",
            ErrorClass::UnknownConstant => "UnknownConstant",
            ErrorClass::NotAFunction => "NotAFunction",
            ErrorClass::NotAPair => "NotAPair",
            ErrorClass::UniverseMismatch => "UniverseMismatch",
            ErrorClass::UnsolvedMeta => "UnsolvedMeta",
            ErrorClass::TypeMismatch => "TypeMismatch",
            ErrorClass::DuplicateName => "DuplicateName",
            ErrorClass::RewriteHeadIsDefinition => "RewriteHeadIsDefinition",
            ErrorClass::NonlinearPattern => "NonlinearPattern",
            ErrorClass::RewriteTypeMismatch => "RewriteTypeMismatch",
            ErrorClass::MalformedRewrite => "MalformedRewrite",
            ErrorClass::BadImplicit => "BadImplicit",
            ErrorClass::FuelExhausted => "FuelExhausted",
            ErrorClass::ParseError => "ParseError",
            ErrorClass::IllegalCharacter => "IllegalCharacter",
            ErrorClass::ImportFailed => "ImportFailed",
        }
    }
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ErrorClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown error class `{s}`"))
    }
}

/// Kernel failures. Terms inside messages are already rendered, with both
/// sides of a mismatch in normal form.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("unbound variable #{0}")]
    UnboundVariable(usize),
    #[error("unknown constant `{0}`")]
    UnknownConstant(Name),
    #[error("expected a function, but the head has type {0}")]
    NotAFunction(String),
    #[error("expected a pair, but the term has type {0}")]
    NotAPair(String),
    #[error("{0}")]
    UniverseMismatch(String),
    #[error("unsolved metavariable: {0}")]
    UnsolvedMeta(String),
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },
    #[error("`{0}` is already declared")]
    DuplicateName(Name),
    #[error("rewrite head `{0}` is a definition")]
    RewriteHeadIsDefinition(Name),
    #[error("pattern variable `{0}` occurs more than once on the left-hand side")]
    NonlinearPattern(Name),
    #[error("rewrite does not preserve types: {0}")]
    RewriteTypeMismatch(String),
    #[error("malformed rewrite: {0}")]
    MalformedRewrite(String),
    #[error("reduction fuel exhausted")]
    FuelExhausted,
}

impl KernelError {
    pub fn class(&self) -> ErrorClass {
        match self {
            KernelError::UnboundVariable(_) => ErrorClass::UnboundVariable,
            KernelError::UnknownConstant(_) => ErrorClass::UnknownConstant,
            KernelError::NotAFunction(_) => ErrorClass::NotAFunction,
            KernelError::NotAPair(_) => ErrorClass::NotAPair,
            KernelError::UniverseMismatch(_) => ErrorClass::UniverseMismatch,
            KernelError::UnsolvedMeta(_) => ErrorClass::UnsolvedMeta,
            KernelError::TypeMismatch { .. } => ErrorClass::TypeMismatch,
            KernelError::DuplicateName(_) => ErrorClass::DuplicateName,
            KernelError::RewriteHeadIsDefinition(_) => ErrorClass::RewriteHeadIsDefinition,
            KernelError::NonlinearPattern(_) => ErrorClass::NonlinearPattern,
            KernelError::RewriteTypeMismatch(_) => ErrorClass::RewriteTypeMismatch,
            KernelError::MalformedRewrite(_) => ErrorClass::MalformedRewrite,
            KernelError::FuelExhausted => ErrorClass::FuelExhausted,
        }
    }
}

pub type KResult<T> = Result<T, KernelError>;
