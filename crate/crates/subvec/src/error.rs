//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // embedding file parsing
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated record for entry {0}")]
    TruncatedRecord(usize),
    #[error("non-finite value in vector for token {0:?}")]
    NonFiniteValue(String),
    #[error("no usable vocabulary entries after filtering")]
    EmptyVocabulary,
    #[error("line {0}: vector dimension differs from the first line")]
    InconsistentDimension(usize),
    #[error("line {0}: unparsable or non-finite number")]
    UnparsableNumber(usize),
    #[error("duplicate token {0:?}")]
    DuplicateToken(String),
    #[error("token {0:?} is empty or contains whitespace")]
    InvalidToken(String),

    // space queries
    #[error("out of vocabulary: {0:?}")]
    OutOfVocabulary(String),
    #[error("query vector has zero norm")]
    ZeroQueryVector,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    // decomposition
    #[error("zero delta is a sub-vector of every vector; query rejected as uninformative")]
    ZeroDelta,
    #[error("support vectors sum to zero; no shared direction")]
    ZeroSum,
    #[error("degenerate support set: some support projects non-positively on the shared direction")]
    DegenerateSupportSet,
    #[error("support set is empty")]
    EmptySupportSet,
    #[error("support index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("scale {0} outside [0, 1]")]
    ScaleOutOfRange(f64),

    // categorization / analogy
    #[error("gold set is empty")]
    EmptyGold,
    #[error("a training class is empty")]
    EmptyClass,
    #[error("pair list is empty")]
    EmptyPairs,

    // corpus parsing
    #[error("line {0}: analogy line is not a 4-token question")]
    MalformedLine(usize),
    #[error("no section headers found in analogy corpus")]
    NoSections,
    #[error("category corpus schema: {0}")]
    SchemaViolation(String),
    #[error("duplicate category {0:?}")]
    DuplicateCategory(String),
    #[error("category {0:?} has no members")]
    EmptyCategory(String),

    // interface plumbing
    #[error("word count {got} does not fit the requested shape (needs {expected})")]
    ArityMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
