use thiserror::Error;

/// Errors produced by dataset parsing, transforms, model building and the
/// evaluation harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: series has {found} values, expected {expected}")]
    UnequalLength {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: series contains missing values")]
    MissingValues { line: usize },

    #[error("dataset has no cases")]
    EmptyDataset,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("incompatible datasets: {0}")]
    IncompatibleDatasets(String),

    #[error("cannot stratify: class {class} needs {required} cases but the pool has {available}")]
    StratificationImpossible {
        class: String,
        required: usize,
        available: usize,
    },

    #[error("window of length {window} too short: {required} samples required")]
    InsufficientWindow { window: usize, required: usize },

    #[error("series of length {length} shorter than window length {window}")]
    SeriesTooShort { length: usize, window: usize },

    #[error("series has length {found}, classifier expects {expected}")]
    SeriesLengthMismatch { expected: usize, found: usize },

    #[error("no legal parameter combinations for this dataset")]
    NoLegalParameters,

    #[error("parameter encoding failed: {0}")]
    EncodingError(String),

    #[error("kernel matrix is singular (duplicate inputs with zero noise?)")]
    SingularKernel,

    #[error("score matrix is incomplete; missing cells: {}", missing.join(", "))]
    IncompleteMatrix { missing: Vec<String> },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("model file error: {0}")]
    Model(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
