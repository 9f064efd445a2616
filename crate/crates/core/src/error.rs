use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("malformed block family: {0}")]
    MalformedFamily(String),
    #[error("unsupported clip: {0}")]
    UnsupportedClip(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid IFS: {0}")]
    InvalidIfs(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type SetResult<T> = Result<T, SetError>;
