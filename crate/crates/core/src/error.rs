use thiserror::Error;

use crate::torus::CellSpan;

pub type Result<T> = std::result::Result<T, GmraError>;

#[derive(Debug, Error)]
pub enum GmraError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("expected {expected} values for the partition, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dilation must be at least 2, got {0}")]
    InvalidDilation(u32),

    #[error("multiplicity function must take a positive value somewhere")]
    ZeroMultiplicity,

    #[error("conjugate multiplicity is {value} < 0 on {cell}")]
    NegativeConjugate { cell: CellSpan, value: i64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("filter bank rejected: {equation} fails on {cell} (residual {residual:e})")]
    InvalidBank {
        equation: String,
        cell: CellSpan,
        residual: f64,
    },

    #[error("matrix on {cell} is not unitary (residual {residual:e})")]
    NotUnitary { cell: CellSpan, residual: f64 },

    #[error("not an M-system: {reason} on {cell}")]
    InvalidMSystem { reason: String, cell: CellSpan },

    #[error("{0}")]
    ProfileMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
