use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: invalid birth-death pair ({birth}, {death}): death must exceed birth")]
    InvalidPair { line: usize, birth: f64, death: f64 },

    #[error("NaN is not a valid extended real")]
    NotANumber,

    #[error("truncating ({birth}, {death}) at {cutoff} leaves an empty interval")]
    Truncation { birth: f64, death: f64, cutoff: f64 },

    #[error("value {value} lies outside the grid [{begin}, {end}]")]
    OutsideGrid { value: f64, begin: f64, end: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid specifications differ")]
    GridMismatch,

    #[error("layer {layer} takes infinite values; truncate infinite intervals first")]
    InfiniteLayer { layer: usize },

    #[error("expected {expected} coefficients, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("at least one input is required")]
    NoInput,

    #[error("need at least {required} classes, got {actual}")]
    TooFewClasses { required: usize, actual: usize },

    #[error("class {0} is empty")]
    EmptyClass(usize),

    #[error("invalid norm exponent {0}: expected p >= 1 or p = -1")]
    InvalidExponent(f64),

    #[error("invalid segment [{x0}, {x1}]")]
    InvalidSegment { x0: f64, x1: f64 },

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("class labels differ between degrees")]
    ClassMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}
