use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pauli length mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot parse pauli operator {0:?}")]
    ParsePauli(String),

    #[error("invalid stabilizer for gadget: {0}")]
    InvalidStabilizer(String),

    #[error("invalid fault location: gate {location} ({reason})")]
    InvalidFault { location: usize, reason: &'static str },

    #[error("physical error rate {0} outside [0, 15/16]")]
    ErrorRateOutOfRange(f64),

    #[error("unknown protocol {0:?}")]
    UnknownProtocol(String),

    #[error("unknown branch {0:?}")]
    UnknownBranch(String),

    #[error("no lookup-table entry for history {history} at branch {branch}")]
    LutMiss { branch: String, history: String },

    #[error("protocol construction failed: {0}")]
    Construction(String),

    #[error("search exhausted the candidate pool: {0}")]
    SearchExhausted(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no bracketing pair of points around p_L = p")]
    NoBracket,

    #[error("malformed csv at line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },
}
