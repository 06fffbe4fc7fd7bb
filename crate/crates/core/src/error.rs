use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate arrow name `{0}`")]
    DuplicateArrow(String),
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertex(String),
    #[error("arrow name `{0}` is reserved: names ending in `*` are generated by doubling")]
    ReservedName(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("quiver is already doubled")]
    AlreadyDoubled,
    #[error("operation requires a doubled quiver")]
    NotDoubled,
    #[error("dimension mismatch: expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("arrows `{left}` and `{right}` at positions {pos} and {next} do not compose", next = pos + 1)]
    NonComposable { pos: usize, left: String, right: String },
    #[error("word does not close up: `{last}` cannot be followed by `{first}`")]
    NotClosed { first: String, last: String },
    #[error("empty word")]
    EmptyWord,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("duplicate height {0}")]
    DuplicateHeight(u32),
    #[error("operands live over different quivers")]
    QuiverMismatch,
    #[error("degree {found} exceeds the truncation bound {max}")]
    DegreeOverflow { found: usize, max: usize },
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("{line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
