use thiserror::Error;

use crate::tree::NodePath;

/// Errors produced by the library.
///
/// The variants split into two families: caller mistakes (bad files, bad
/// parameters, unsupported inputs) and guard violations (instances that break
/// their declared bounds, enumeration limits). [`Error::is_guard`] tells them
/// apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node {0} is not in the tree")]
    NotInTree(NodePath),

    #[error("depth {depth} is out of range for a tree of height {height}")]
    DepthOutOfRange { depth: usize, height: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed instance: {0}")]
    MalformedInstance(String),

    #[error("unsupported circuit family: {0}")]
    UnsupportedFamily(String),

    #[error("size guard exceeded: {0}")]
    Guard(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for internal guard violations (as opposed to bad user input).
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::MalformedInstance(_) | Error::Guard(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
