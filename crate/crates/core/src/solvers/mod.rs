//! Solvers for the slicing enforcement problem and the exhaustive oracle.

mod brute;
mod exact;
mod mlf;
mod relaxed;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::RsepError;
use crate::model::Allocation;

pub use brute::{solve_brute_force, solve_brute_force_with_budget, DEFAULT_ORACLE_BUDGET};
pub use exact::{solve_exact, solve_exact_with, ExactOptions, DEFAULT_NODE_BUDGET};
pub use mlf::{linking_index, solve_mlf};
pub use relaxed::{solve_relaxed, RelaxParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverId {
    Exact,
    Relaxed,
    Mlf,
    #[serde(rename = "brute")]
    BruteForce,
}

impl SolverId {
    pub fn name(self) -> &'static str {
        match self {
            SolverId::Exact => "exact",
            SolverId::Relaxed => "relaxed",
            SolverId::Mlf => "mlf",
            SolverId::BruteForce => "brute",
        }
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverId {
    type Err = RsepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(SolverId::Exact),
            "relaxed" => Ok(SolverId::Relaxed),
            "mlf" => Ok(SolverId::Mlf),
            "brute" => Ok(SolverId::BruteForce),
            other => Err(RsepError::InvalidParameter(format!("unknown solver `{other}`"))),
        }
    }
}

/// Outcome of one solver call. The allocation is always feasible and
/// `objective` is its linked-RB count.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub allocation: Allocation,
    pub objective: u64,
    pub solver: SolverId,
    pub elapsed: Duration,
    /// Only exact and brute-force runs that completed set this.
    pub certified: bool,
    /// Search nodes (exact, brute force) or applied moves (relaxed).
    pub nodes: u64,
}

#[derive(Serialize, Deserialize)]
struct SolveResultDoc {
    solver: SolverId,
    objective: u64,
    certified: bool,
    elapsed_ms: f64,
    #[serde(default)]
    nodes: u64,
    allocation: Allocation,
}

impl Serialize for SolveResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SolveResultDoc {
            solver: self.solver,
            objective: self.objective,
            certified: self.certified,
            elapsed_ms: self.elapsed.as_secs_f64() * 1e3,
            nodes: self.nodes,
            allocation: self.allocation.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SolveResult {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = SolveResultDoc::deserialize(deserializer)?;
        Ok(SolveResult {
            allocation: doc.allocation,
            objective: doc.objective,
            solver: doc.solver,
            elapsed: Duration::from_secs_f64(doc.elapsed_ms.max(0.0) / 1e3),
            certified: doc.certified,
            nodes: doc.nodes,
        })
    }
}

impl SolveResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serializes")
    }
}
