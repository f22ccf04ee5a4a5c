//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Solver state reported when the penalized fit fails to converge.
#[derive(Debug, Clone)]
pub struct NonConvergenceInfo {
    /// Node (attribute index) being fitted.
    pub node: usize,
    /// Penalty at which the solver stalled.
    pub penalty: f64,
    /// Index of the penalty within the path, when fitting a path.
    pub penalty_index: Option<usize>,
    /// Largest coefficient change over the last outer iteration.
    pub residual: f64,
    /// Best iterate: intercept on the original {0,1} scale.
    pub threshold: f64,
    /// Best iterate: coefficients on the original {0,1} scale.
    pub betas: Vec<f64>,
}

#[derive(Debug)]
pub enum Error {
    /// Text input could not be parsed. `line` is 1-based.
    Parse { line: usize, message: String },
    /// Binary input violated the declared format.
    Format(String),
    /// A value was non-finite or outside its domain.
    InvalidInput(String),
    /// Two inputs that must agree in shape did not.
    DimensionMismatch(String),
    /// An attribute name occurred more than once.
    DuplicateName(String),
    /// The column is all zeros or all ones and the operation is undefined on it.
    ConstantColumn { index: usize, name: String },
    /// An attribute name was not found.
    UnknownAttribute(String),
    /// Attribute names of two inputs do not align index-for-index.
    NameMismatch(String),
    /// A configuration value violated its invariant.
    InvalidConfig(String),
    /// The penalized solver did not converge within the iteration cap.
    NonConvergence(Box<NonConvergenceInfo>),
    /// Exact enumeration over 2^M states is not feasible.
    StateSpaceTooLarge { attrs: usize, max: usize },
    /// The correlation analysis needs more edges than the graph has.
    TooFewEdges { found: usize, required: usize },
    /// A manipulation vector on an edge endpoint has zero norm.
    ZeroNormVector { index: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::DuplicateName(name) => write!(f, "duplicate attribute name: {name:?}"),
            Error::ConstantColumn { index, name } => {
                write!(f, "attribute column {index} ({name:?}) is constant")
            }
            Error::UnknownAttribute(name) => write!(f, "unknown attribute: {name:?}"),
            Error::NameMismatch(msg) => write!(f, "attribute names do not align: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::NonConvergence(info) => write!(
                f,
                "solver did not converge for node {} at penalty {:.6e} (last change {:.3e})",
                info.node, info.penalty, info.residual
            ),
            Error::StateSpaceTooLarge { attrs, max } => {
                write!(f, "exact enumeration needs 2^{attrs} states; limit is 2^{max}")
            }
            Error::TooFewEdges { found, required } => {
                write!(f, "need at least {required} edges, graph has {found}")
            }
            Error::ZeroNormVector { index } => {
                write!(f, "manipulation vector {index} has zero norm")
            }
        }
    }
}

impl std::error::Error for Error {}
