//! Problem-size reductions: fixing variables of zero quotas, and grouping
//! resource blocks into `K`-sized aggregates when every quota shares the
//! factor `K`.

mod aggregation;
mod mapping;
mod rbam;
mod sparsity;

pub use aggregation::{expand_solution, plan_aggregation, AggregationAxis, AggregationPlan};
pub use mapping::aggregate_solution;
pub use rbam::Rbam;
pub use sparsity::{eliminate_sparse, EliminatedSet};
