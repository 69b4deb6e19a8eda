use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: usize, column: usize, message: String },

    #[error("ragged rows: row {row} has {found} columns, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("class id {class} out of range 1..={classes}")]
    ClassOutOfRange { class: usize, classes: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("zero scale: {0}")]
    ZeroScale(String),

    #[error("lambda = {0} exceeds 2; similarity may turn negative (use the override to allow)")]
    LambdaTooLarge(f64),

    #[error("negative similarity {value} at ({row}, {col})")]
    NegativeSimilarity { row: usize, col: usize, value: f64 },

    #[error("similarity matrix is identically zero")]
    ZeroSimilarity,

    #[error("regularizer cap violated: {name} = {value} > {cap}")]
    CapViolated { name: &'static str, value: f64, cap: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm})")]
    EigenNoConvergence { sweeps: usize, off_norm: f64 },

    #[error("singular system: {0}")]
    Singular(String),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::EigenNoConvergence { .. }
                | Error::Singular(_)
                | Error::ZeroSimilarity
                | Error::NegativeSimilarity { .. }
                | Error::CapViolated { .. }
                | Error::ZeroScale(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
