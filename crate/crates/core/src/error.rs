use thiserror::Error;

/// Errors produced by stencil generation, spectra and signal evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular moment system: {0}")]
    SingularSystem(String),

    #[error("offset {offset} does not fit in a length-{len} embedding (need |offset| < {half})", half = .len / 2)]
    EmbeddingOverflow { offset: i64, len: usize },

    #[error("argument outside the curve domain: {0}")]
    Domain(String),

    #[error("stencil needs sample index {index}, signal has {len} samples")]
    Boundary { index: i64, len: usize },

    #[error("malformed rational {0:?}")]
    ParseRational(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
