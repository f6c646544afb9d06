//! Solvers for RAN slicing enforcement: assign each base station's resource
//! blocks to MVNOs so that every MVNO gets its quota and the number of RBs
//! given to the same MVNO on interfering base stations ("linked" RBs) is
//! maximal.

pub mod bench;
pub mod cli;
pub mod error;
pub mod model;
pub mod pipeline;
pub mod reduction;
pub mod scenario;
pub mod solvers;

pub use error::{Result, RsepError};
pub use model::{check_feasibility, count_linked, Allocation, FeasibilityReport, Instance, QMatrix};
pub use reduction::{aggregate_solution, eliminate_sparse, expand_solution, plan_aggregation, AggregationPlan, Rbam};
pub use solvers::{
    linking_index, solve_brute_force, solve_exact, solve_mlf, solve_relaxed, RelaxParams, SolveResult, SolverId,
};
