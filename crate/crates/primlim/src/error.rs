use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// `Parameter` covers violated preconditions (a zero input, a basis size
/// above the supported cap, an empty range). `ResourceLimit` covers inputs
/// that are valid but too large for the exact engines (enumeration caps,
/// memo budgets, grid encodings).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }
}
