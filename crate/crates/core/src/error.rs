use thiserror::Error;

/// Errors raised by model construction, evaluation and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// The operation is not defined for the given topology or input kind.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Malformed text input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A persisted artifact was produced under a different configuration.
    #[error("configuration hash mismatch: file has {found:016x}, current configuration is {expected:016x}")]
    HashMismatch { expected: u64, found: u64 },

    /// A resource guard (e.g. system-matrix nonzero cap) was exceeded.
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
