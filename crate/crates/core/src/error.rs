use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("alphabet of size {size} exceeds the limit of {limit} for grid search")]
    OversizedAlphabet { size: usize, limit: usize },

    #[error("invalid grid step {0}: expected 1/m for an integer m with step in (0, 0.5]")]
    InvalidGridStep(f64),

    #[error("grid of {points} points exceeds the cap of {cap}")]
    GridTooLarge { points: u128, cap: u128 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("block length mismatch: {0}")]
    LengthMismatch(String),

    #[error("no feasible output for input block {x:?} with noise block {z:?} at s = {s}")]
    NoFeasibleOutput { x: Vec<f64>, z: Vec<f64>, s: f64 },

    #[error("policy violates its invariants:\n{0}")]
    InvalidPolicy(ValidationReport),

    #[error("block length {k} exceeds the cap of {cap}")]
    BlockCap { k: usize, cap: usize },

    #[error("symbol {0} is not in the alphabet")]
    UnknownSymbol(f64),

    #[error("enumeration of {sequences} sequences exceeds the cap of {cap}; i.i.d. single-slot laws can use the type-class method")]
    EnumerationCap { sequences: u128, cap: u128 },

    #[error("operation requires single-slot (k = 1) laws, got k = {0}")]
    NotSingleSlot(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
