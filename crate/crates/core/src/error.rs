use thiserror::Error;

/// Errors raised by gltkit operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the operation's domain (bad sizes, ranges, non-Hermitian input, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested object would exceed the dense size limits.
    #[error("size limit exceeded: {0}")]
    Resource(String),

    /// A coefficient expression could not be parsed.
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// A coefficient function could not be evaluated at a required point.
    #[error("evaluation failed at {point:?}: {reason}")]
    Eval { point: Vec<f64>, reason: String },

    /// An iterative kernel ran out of sweeps.
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

/// Parse failures of the coefficient-expression grammar.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },

    #[error("function `{name}` at position {pos} takes {expected} argument(s), got {found}")]
    Arity {
        pos: usize,
        name: String,
        expected: usize,
        found: usize,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
