use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("submodules live in different ambient algebras")]
    MismatchedAmbient,
    #[error("({0}, {1}) is not a compatible sub-pair of the diagram's pair")]
    IncompatibleSubPair(String, String),
    #[error("transfer system is not self-compatible (not saturated)")]
    NotSelfCompatible,
    #[error("no leaf catalog matches component {0:?} of diagram `{1}`")]
    MissingCatalog(Vec<u64>, String),
    #[error("hull transport refused: diagram `{0}` is not multiplicatively cohomological (witness at level {1})")]
    NotCohomological(String, u64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
