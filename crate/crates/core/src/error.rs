use thiserror::Error;

/// Errors produced by model construction, probability evaluation and fitting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not a permutation of 0..{n}: {detail}")]
    InvalidRanking { n: usize, detail: String },
    #[error("invalid top-k list over {n} items: {detail}")]
    InvalidTopK { n: usize, detail: String },
    #[error("invalid display set: {0}")]
    InvalidDisplay(String),
    #[error("dispersion q = {0} outside [1e-9, 1 - 1e-9]")]
    InvalidDispersion(f64),
    #[error("universe size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("item {item} is not in the display set")]
    NotInDisplay { item: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("n = {n} exceeds the limit of {cap} for this operation")]
    TooLarge { n: usize, cap: usize },
    #[error("empty data")]
    EmptyData,
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),
    #[error("line {line}: {detail}")]
    Format { line: usize, detail: String },
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
