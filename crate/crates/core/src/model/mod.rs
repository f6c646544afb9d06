//! Problem representation: instances, allocations, feasibility and the
//! linked-RB objective with its quadratic-form matrix.

mod allocation;
mod instance;
mod qmatrix;

pub use allocation::{
    check_feasibility, count_linked, Allocation, FeasibilityReport, OverlapViolation, QuotaViolation,
};
pub use instance::Instance;
pub use qmatrix::{QMatrix, DENSE_CAP};
