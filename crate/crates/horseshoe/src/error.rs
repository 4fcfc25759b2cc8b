use thiserror::Error;

/// Errors shared by all subsystems.
#[derive(Debug, Error)]
pub enum Error {
    /// Trimming a transition matrix deleted every symbol.
    #[error("empty system: trimming removed every symbol")]
    EmptySystem,

    /// A word violates the transition matrix or a model's digit set.
    #[error("inadmissible word: {0}")]
    InadmissibleWord(String),

    /// A numeric argument is outside its domain.
    #[error("domain error: {0}")]
    DomainError(String),

    /// A masked graph has no nontrivial strongly connected component.
    #[error("no cycle survives in the masked graph")]
    NoCycle,

    /// Threshold pruning left no subhorseshoe.
    #[error("pruning left no nontrivial component")]
    EmptyPrune,

    /// A point or value set is empty where a spread is required.
    #[error("degenerate set: {0}")]
    DegenerateSet(String),

    /// Perturbation parameters exceed the configured bound.
    #[error("perturbation parameters exceed bound {0}")]
    BoundExceeded(f64),

    /// Configuration failed validation; the message carries the field path.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
