use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alphabet: {0}")]
    Alphabet(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("group definition: {0}")]
    Definition(String),
    #[error("antichain: {0}")]
    Antichain(String),
    #[error("table: {0}")]
    Table(String),
    /// Exploration of machine states ran past the configured limit.
    #[error("state budget of {0} exceeded")]
    Budget(usize),
    #[error("not contracting within budget ({max_states} states, depth {max_depth})")]
    NotContractingWithin { max_states: usize, max_depth: usize },
    #[error("level {level} too large (limit {limit} words)")]
    LevelTooLarge { level: usize, limit: usize },
    #[error("sign is only defined for odd alphabets (d = {0})")]
    EvenAlphabet(usize),
    #[error("word problem undecided: {0}")]
    Undecided(String),
    #[error("post-critical portrait: {0}")]
    Portrait(String),
    #[error("presentation: {0}")]
    Presentation(String),
}

impl Error {
    /// Budget and undecided outcomes, as opposed to malformed input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::Budget(_) | Error::NotContractingWithin { .. } | Error::Undecided(_)
        )
    }
}
