use thiserror::Error;

/// Errors raised by the library. Verdicts such as "refuted" or
/// "inconclusive" are ordinary return values, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a negative entry at ({row}, {col})")]
    Negative { row: usize, col: usize },

    #[error("imprimitive/reducible matrix: no power up to {bound} is strictly positive")]
    NotPrimitive { bound: usize },

    #[error("invalid relation: {0}")]
    Relation(String),

    #[error("invalid scale vector: {0}")]
    Scale(String),

    #[error("strong order oracle requires nest structure: {0}")]
    NotNest(String),

    #[error("invalid embedding: {0}")]
    Embedding(String),

    #[error("invalid diagram: {0}")]
    Diagram(String),

    #[error("stage {stage} out of range (available: {available})")]
    Stage { stage: usize, available: usize },

    #[error("partial column sum not constant: block ({i}, {j}) gives {first} in column {col_a} but {second} in column {col_b}")]
    PartialColumnSum {
        i: usize,
        j: usize,
        col_a: usize,
        col_b: usize,
        first: String,
        second: String,
    },

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("size guard: {0}")]
    TooLarge(String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
