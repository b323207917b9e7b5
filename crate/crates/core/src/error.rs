use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid urn parameters: {0}")]
    InvalidParams(String),

    #[error("creation sequence must contain at least one draw")]
    EmptySequence,

    #[error("draw at position {position} is {value}, expected 0 or 1")]
    InvalidDraw { position: usize, value: u8 },

    #[error("node index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("count {k} out of range 0..={n}")]
    CountOutOfRange { k: usize, n: usize },

    #[error("enumeration horizon {n} exceeds the limit {limit}; use Monte Carlo mode instead")]
    GuardExceeded { n: usize, limit: usize },

    #[error("the last node is isolated (z_n = 0), so the graph is not connected")]
    Disconnected,

    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn check_index(index: usize, n: usize) -> Result<()> {
        if index == 0 || index > n {
            Err(Error::IndexOutOfRange { index, n })
        } else {
            Ok(())
        }
    }
}
