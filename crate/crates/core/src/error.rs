use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed scenario: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("unknown segment id {0}")]
    UnknownSegment(usize),

    #[error("vehicle {vehicle} has only {found} distinct paths, {requested} requested")]
    Infeasible {
        vehicle: usize,
        found: usize,
        requested: usize,
    },

    #[error("penalty strength must be positive, got {0}")]
    NonPositivePenalty(f64),

    #[error("partial QUBOs do not share a variable map")]
    VarMapMismatch,

    #[error("assignment has {got} bits, problem has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{what} exceeds the enumeration cap ({size} > {cap})")]
    SizeCap { what: &'static str, size: u128, cap: u128 },

    #[error("invalid annealing parameters: {0}")]
    AnnealParams(String),

    #[error("no valid solution in sample set; raise num_reads or the penalty strength")]
    NoValidSolution,

    #[error("assignment is not valid (some vehicle does not have exactly one route)")]
    InvalidAssignment,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
