use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Gamma evaluated at (or within 1e-12 of) a non-positive integer.
    #[error("gamma function has a pole at z = {0}")]
    Pole(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("quadrature did not reach tolerance {tol:e} (error estimate {estimate:e}, value {value})")]
    Accuracy { tol: f64, estimate: f64, value: f64 },

    #[error("lex error at offset {position}: {message}")]
    Lex { position: usize, message: String },

    #[error("parse error at offset {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("evaluation error at offset {position}: {message}")]
    Eval { position: usize, message: String },

    /// An evaluation failure tied to a grid node.
    #[error("at node {node} (t = {t}): {source}")]
    AtNode {
        node: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: msg.into(),
        }
    }

    pub(crate) fn at_node(self, node: usize, t: f64) -> Self {
        Error::AtNode {
            node,
            t,
            source: Box::new(self),
        }
    }

    /// Strips node context, returning the underlying failure.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtNode { source, .. } => source.root(),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
