use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("bad input{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    BadInput { line: Option<usize>, msg: String },

    #[error("value {value} does not fit in {width} bits")]
    ValueTooWide { value: u64, width: u32 },

    #[error("dictionary capacity {cap} exceeded")]
    CapacityExceeded { cap: usize },

    #[error("duplicate key {0}")]
    DuplicateKey(usize),

    #[error("key {0} absent")]
    KeyAbsent(usize),

    #[error("find_any on an empty set")]
    EmptySet,

    #[error("probe displacement bound exceeded while inserting key {0}")]
    DictOverflow(usize),

    #[error("invariant violated at level {level}, step {step}: {msg}")]
    InvariantViolation { level: usize, step: u64, msg: String },

    #[error("level {level}: no next-slot candidate for vertex {vertex} in its group")]
    RestoreScanOverrun { level: usize, vertex: usize },

    #[error("level {level}: vertex {vertex} not mirrored in the level above")]
    MissingMirror { level: usize, vertex: usize },

    #[error("level {level}: trailer stack underflow")]
    TrailerUnderflow { level: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn bad_input(line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::BadInput { line, msg: msg.into() }
    }

    /// Process exit code for the CLI: 2 for input problems, 3 for engine faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BadInput { .. } | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
