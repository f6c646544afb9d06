use num_integer::Integer;
use serde::Serialize;

use crate::error::{Result, RsepError};
use crate::model::{check_feasibility, Allocation, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationAxis {
    Subcarrier,
    TimeSlot,
}

/// How an aggregable instance shrinks: every `k` consecutive RBs along
/// `axis` become one aggregated RB, and every quota is divided by `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregationPlan {
    pub k: usize,
    pub axis: AggregationAxis,
    pub scaled_instance: Instance,
    original_subcarriers: usize,
    original_slots: usize,
}

impl AggregationPlan {
    /// Original RBs (linear indices) covered by aggregated RB `scaled_rb`.
    pub fn members(&self, scaled_rb: usize) -> Vec<usize> {
        let scaled = &self.scaled_instance;
        let (n, t) = scaled.rb_coords(scaled_rb);
        (0..self.k)
            .map(|j| match self.axis {
                AggregationAxis::TimeSlot => (t * self.k + j) * self.original_subcarriers + n,
                AggregationAxis::Subcarrier => t * self.original_subcarriers + n * self.k + j,
            })
            .collect()
    }

    pub fn original_num_rbs(&self) -> usize {
        self.original_subcarriers * self.original_slots
    }
}

/// GCD of the positive entries of `L`, or `None` if every quota is zero.
pub fn profile_gcd(instance: &Instance) -> Option<u64> {
    instance
        .profile()
        .iter()
        .flatten()
        .copied()
        .filter(|&l| l > 0)
        .reduce(|a, b| a.gcd(&b))
}

/// Aggregation plan when `K = gcd(L) > 1` divides `T` (preferred) or `N_RB`.
pub fn plan_aggregation(instance: &Instance) -> Option<AggregationPlan> {
    let k = profile_gcd(instance)? as usize;
    if k <= 1 {
        return None;
    }
    let (n_rb, t) = (instance.num_subcarriers(), instance.num_slots());
    let (axis, scaled_n, scaled_t) = if t % k == 0 {
        (AggregationAxis::TimeSlot, n_rb, t / k)
    } else if n_rb % k == 0 {
        (AggregationAxis::Subcarrier, n_rb / k, t)
    } else {
        return None;
    };
    let profile = instance
        .profile()
        .iter()
        .map(|row| row.iter().map(|&l| l / k as u64).collect())
        .collect();
    let scaled_instance = instance
        .with_grid(scaled_n, scaled_t, profile)
        .expect("scaling preserves instance validity");
    Some(AggregationPlan {
        k,
        axis,
        scaled_instance,
        original_subcarriers: n_rb,
        original_slots: t,
    })
}

/// Replicates each aggregated RB's owner onto its `k` original RBs.
pub fn expand_solution(plan: &AggregationPlan, aggregated: &Allocation) -> Result<Allocation> {
    let report = check_feasibility(&plan.scaled_instance, aggregated)?;
    if !report.is_feasible() {
        return Err(RsepError::InfeasibleAllocation(report));
    }
    let nb = plan.scaled_instance.num_bs();
    let mut out = Allocation::unassigned(nb, plan.original_num_rbs());
    for b in 0..nb {
        for scaled_rb in 0..plan.scaled_instance.num_rbs() {
            if let Some(m) = aggregated.owner(b, scaled_rb) {
                for rb in plan.members(scaled_rb) {
                    out.assign(b, rb, m);
                }
            }
        }
    }
    Ok(out)
}
