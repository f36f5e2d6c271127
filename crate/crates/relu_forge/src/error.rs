use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("input shape: {0}")]
    Shape(String),
    #[error("numeric domain: {0}")]
    NumericDomain(String),
    #[error("composition: {0}")]
    Composition(String),
    #[error("argument: {0}")]
    Argument(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("unsupported format_version {found} (expected {expected})")]
    Version { found: i64, expected: i64 },
    #[error("capability: {0}")]
    Capability(String),
    #[error("capacity: {0}")]
    Capacity(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("lookup: {0}")]
    Lookup(String),
    #[error("degenerate cloud: {0}")]
    DegenerateCloud(String),
    #[error("matching tolerance: {0}")]
    MatchingTolerance(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl ForgeError {
    /// Process exit code used by the command line: 2 for bad arguments, 3 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            ForgeError::Argument(_)
            | ForgeError::Capability(_)
            | ForgeError::Capacity(_)
            | ForgeError::Lookup(_) => 2,
            ForgeError::Parse { .. }
            | ForgeError::Version { .. }
            | ForgeError::Io(_)
            | ForgeError::Precondition(_)
            | ForgeError::DegenerateCloud(_)
            | ForgeError::MatchingTolerance(_) => 3,
            ForgeError::Shape(_) | ForgeError::NumericDomain(_) | ForgeError::Composition(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, ForgeError>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(ForgeError::Argument(msg.into()))
}
