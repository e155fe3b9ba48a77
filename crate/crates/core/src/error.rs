use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are split so that callers (notably the command-line front end)
/// can tell domain failures apart from malformed input files.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    RepeatedQubit(usize),

    #[error("non-finite gate parameter")]
    NonFiniteParameter,

    #[error("register of {requested} qubits exceeds the dense simulator cap of {cap}")]
    TooManyQubits { requested: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state is not normalized (|norm^2 - 1| = {deviation:e})")]
    Unnormalized { deviation: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("array of length {len} is not divisible into blocks of {block}")]
    Indivisible { len: usize, block: usize },

    #[error("incompatible signatures: {0}")]
    Incompatible(String),

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("requested state not resolved: {0}")]
    Unresolved(String),

    #[error("{context}: {source}")]
    AtParameter {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the failure comes from reading or decoding external data
    /// rather than from the computation itself.
    pub fn is_io_or_format(&self) -> bool {
        match self {
            Error::Parse { .. } | Error::Format(_) | Error::Io(_) | Error::Json(_) => true,
            Error::AtParameter { source, .. } => source.is_io_or_format(),
            _ => false,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
