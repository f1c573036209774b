use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Io(#[from] io::Error),

    /// Wraps any error raised while reading or writing a named file.
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("bad magic")]
    BadMagic,

    #[error("unsupported LIEB version {0}")]
    UnsupportedVersion(u16),

    #[error("truncated file")]
    Truncated,

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("sequence {id}: token {row} has zero norm")]
    ZeroNorm { id: String, row: usize },

    #[error("sequence {id} has {n_tokens} tokens, over the cap of {cap}")]
    TooManyTokens {
        id: String,
        n_tokens: usize,
        cap: usize,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("candidate set exceeds 1000 documents (query {query_id}: {n_docs})")]
    CandidateSetTooLarge { query_id: String, n_docs: usize },

    #[error("unknown document {0}")]
    UnknownDocument(String),

    #[error("unknown query {0}")]
    UnknownQuery(String),

    #[error("unknown term {0}")]
    UnknownTerm(String),

    #[error("query position {position} out of range for {n_tokens} tokens")]
    PositionOutOfRange { position: usize, n_tokens: usize },

    #[error("query has no word with index {0}")]
    UnknownWord(usize),

    #[error("need at least 2 items, got {0}")]
    TooFewItems(usize),

    #[error("rankings do not contain the same items")]
    ItemSetMismatch,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("zero variance")]
    ZeroVariance,

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("term never occurs in the scored documents: {0}")]
    NoOccurrences(String),

    #[error("no rankable queries")]
    NoRankableQueries,

    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Output(String),
}

impl Error {
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// Whether the error stems from user-supplied input rather than a
    /// failure inside the toolkit. Input files always report through
    /// [`Error::File`]; bare I/O errors come from writing outputs.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::File { .. } => true,
            Error::Io(_) | Error::Output(_) => false,
            _ => true,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Output(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Output(e.to_string())
    }
}
