use thiserror::Error;

/// Library-level error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A run was configured with invalid values (bad bounds, empty ensemble).
    #[error("configuration error: {0}")]
    Config(String),
    /// An operation was evaluated outside its supported domain.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
