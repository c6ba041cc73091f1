use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("word letter {letter} out of range for a tuple of length {n}")]
    LetterOutOfRange { letter: i32, n: usize },

    #[error("word is not freely reduced at position {position}")]
    NotReduced { position: usize },

    #[error("word length {len} exceeds the cap of {cap} letters")]
    WordTooLong { len: usize, cap: usize },

    #[error("eigensolver did not converge at level k={k} after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        k: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("rejection sampling exhausted {tries} tries (acceptance rate {rate:e})")]
    Exhausted { tries: u64, rate: f64 },

    #[error("unknown {family} strategy `{name}`")]
    UnknownStrategy { family: &'static str, name: String },

    #[error("malformed record: {0}")]
    Record(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numerical routine as opposed to bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::Exhausted { .. })
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
