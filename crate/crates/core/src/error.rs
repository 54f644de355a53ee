use thiserror::Error;

use crate::event::EventId;

/// Errors raised by the structure builders, parsers and checkers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("probability {0} is not strictly between 0 and 1")]
    AlphaOutOfRange(String),

    #[error("unknown event `{0}`")]
    UnknownEvent(String),

    #[error("duplicate event `{0}`")]
    DuplicateEvent(EventId),

    #[error("invalid event identifier `{0}`")]
    BadEventId(String),

    #[error("invalid bundle event structure: {0}")]
    InvalidBes(String),

    #[error("invalid prime event structure: {0}")]
    InvalidPes(String),

    #[error("invalid lposet: {0}")]
    InvalidLposet(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("not a configuration: {{{0}}}")]
    NotAConfiguration(String),

    #[error("term contains a probabilistic choice; elaborate it as a pBES instead")]
    ProbabilisticTerm,

    #[error("term contains a Kleene star; a truncation depth is required")]
    MissingDepth,

    #[error("probabilistic choice with an operand that has no initial distribution")]
    DegenerateChoice,

    #[error("invalid pBES: {0}")]
    InvalidPbes(String),

    #[error("malformed witness: {0}")]
    MalformedWitness(String),

    #[error("search space too large: {0}")]
    SearchSpace(String),

    #[error("invalid axiom grid: {0}")]
    Grid(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
