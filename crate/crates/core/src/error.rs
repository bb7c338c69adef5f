use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sentence has no tokens")]
    EmptySentence,

    #[error("document has no sentences")]
    EmptyDocument,

    #[error("n-gram order {n} exceeds the token count of both documents")]
    ZeroNgrams { n: usize },

    #[error("n-gram order must be positive")]
    InvalidNgramOrder,

    #[error("threshold {0} is outside [0, 1]")]
    InvalidThreshold(f64),

    #[error("invalid noise distribution: {0}")]
    InvalidDistribution(String),

    #[error("requested {requested} extra sentences but the article has only {available} unmatched sentences")]
    InsufficientArticle { requested: usize, available: usize },

    #[error("requested {requested} noisy sentences but the summary has only {available}")]
    InsufficientSummary { requested: usize, available: usize },

    #[error("noise type `mixture` must be resolved to a concrete type before it is applied")]
    UnresolvedMixture,

    #[error("external denoiser protocol violation at record {record}: {reason}")]
    ProtocolViolation { record: usize, reason: String },

    #[error("sentence in record {record} contains the reserved separator or a line break")]
    ReservedSeparator { record: usize },

    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("line {line}: duplicate record id `{id}`")]
    DuplicateId { line: usize, id: String },

    #[error("streams are not aligned: first mismatched id `{id}`")]
    AlignmentError { id: String },

    #[error("corpus has no records")]
    EmptyCorpus,

    #[error("record `{id}`: {source}")]
    Record {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Process(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_record(self, id: impl Into<String>) -> Self {
        Error::Record {
            id: id.into(),
            source: Box::new(self),
        }
    }
}
