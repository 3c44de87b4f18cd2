use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller broke an operation's precondition (index out of range,
    /// mismatched lengths, parameter outside its domain).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A brute-force enumeration would exceed its configured cap.
    #[error("infeasible enumeration: {work} evaluations exceeds cap {cap}")]
    Infeasible { work: u128, cap: u128 },

    /// Malformed text input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! contract {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::Error::Contract(format!($($arg)+)));
        }
    };
}
pub(crate) use contract;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
