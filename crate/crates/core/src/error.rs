use thiserror::Error;

use crate::model::FeasibilityReport;

pub type Result<T> = std::result::Result<T, RsepError>;

#[derive(Debug, Error)]
pub enum RsepError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// Some base station is asked for more resource blocks than its grid holds.
    #[error("infeasible instance: BS {bs} demands {demand} RBs but the grid has {capacity}")]
    Overloaded {
        bs: usize,
        demand: u64,
        capacity: u64,
    },

    #[error("infeasible allocation: {0}")]
    InfeasibleAllocation(FeasibilityReport),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no interference; RSEP objective identically zero")]
    NoInterference,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle budget exceeded after {0} partial states")]
    OracleBudgetExceeded(u64),

    #[error("instance is not aggregable")]
    NotAggregable,

    /// A link-preserving partial swap could not be found while pairing a row.
    #[error("aggregation mapping stuck on row {row}: {reason}\n{state}")]
    AggregationStuck {
        row: usize,
        reason: String,
        state: String,
    },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
