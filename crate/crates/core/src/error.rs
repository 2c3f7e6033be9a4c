use thiserror::Error;

use crate::game::Priority;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {0} has no outgoing edge")]
    NoOutgoingEdge(usize),

    #[error("vertex {vertex} names successor {successor}, which does not exist")]
    DanglingSuccessor { vertex: usize, successor: usize },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("priority {priority} outside of 1..={bound}")]
    PriorityOutOfRange { priority: Priority, bound: Priority },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("graph is not even")]
    NotEven,

    #[error("walk reached dead end at vertex {0}")]
    DeadEnd(usize),

    #[error("{what} needs {needed} but the cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("alphabet mismatch: expected letters up to {expected}, found {found}")]
    AlphabetMismatch { expected: Priority, found: Priority },

    #[error("automaton is not deterministic")]
    Nondeterministic,

    #[error("automaton is not accessible: state {0} is not reachable by a reject-free run")]
    NotAccessible(usize),

    #[error("labelling is partial at vertex {0}")]
    PartialLabelling(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn cap(what: &'static str, needed: impl Into<u128>, cap: impl Into<u128>) -> Self {
        Error::CapExceeded {
            what,
            needed: needed.into(),
            cap: cap.into(),
        }
    }
}

/// Size limits applied before materializing exponential objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Limits {
    /// Maximum number of automaton states (or product vertices).
    pub max_states: usize,
    /// Maximum number of leaves of a constructed tree.
    pub max_leaves: usize,
    /// Maximum number of trees visited by exhaustive enumeration.
    pub max_enumerated: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 1 << 26,
            max_leaves: 1 << 22,
            max_enumerated: 1 << 20,
        }
    }
}
