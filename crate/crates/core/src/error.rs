//! Error type shared by all modules.

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A one-dimensional minimization failed to bracket or converge.
    #[error("optimization failed: {0}")]
    Optimizer(String),
    /// A linear system could not be solved.
    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
