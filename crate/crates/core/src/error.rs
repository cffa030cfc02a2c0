use thiserror::Error;

/// Errors raised by the coevent engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid root-of-unity order {0}: order must be at least 1")]
    InvalidOrder(usize),

    #[error("incompatible orders {0} and {1}; embed both into a common order first")]
    IncompatibleOrder(usize, usize),

    #[error("cannot embed order {from} into order {to}: {from} does not divide {to}")]
    InvalidEmbedding { from: usize, to: usize },

    #[error("coefficient vector has {got} entries, expected {expected}")]
    CoefficientLength { expected: usize, got: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("site {site} out of range for a {sites}-site lattice")]
    InvalidSite { site: usize, sites: usize },

    #[error("unknown initial state `{0}`")]
    UnknownState(String),

    #[error("invalid initial state: {0}")]
    InvalidState(String),

    #[error("history does not belong to this space: {0}")]
    InvalidHistory(String),

    /// A size guard fired.
    #[error("infeasible size: {what} needs {size}, limit is {limit}")]
    Infeasible {
        what: &'static str,
        size: String,
        limit: String,
    },

    #[error("operation needs a fixed-final-site space: {0}")]
    WrongSpace(String),

    #[error("events or coevents come from different history spaces")]
    SpaceMismatch,

    #[error("empty coevent list")]
    EmptyList,

    #[error("unknown event `{0}`")]
    UnknownEvent(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("output: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn infeasible(what: &'static str, size: impl ToString, limit: impl ToString) -> Self {
        Error::Infeasible {
            what,
            size: size.to_string(),
            limit: limit.to_string(),
        }
    }
}
