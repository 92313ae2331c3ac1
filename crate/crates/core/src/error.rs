//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Dataset ingestion or validation failed (bad files, shape mismatch,
    /// manifest disagreement).
    #[error("dataset error: {0}")]
    Dataset(String),

    /// Matrix dimensions disagree between operands.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A numerical routine failed (non-finite input, factorization or
    /// eigensolver breakdown).
    #[error("numerical failure: {0}")]
    Numerics(String),

    /// Metric inputs are inconsistent (e.g. label vectors of unequal length).
    #[error("metric error: {0}")]
    Metric(String),

    /// An argument violates a precondition (e.g. k > n for k-means).
    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
