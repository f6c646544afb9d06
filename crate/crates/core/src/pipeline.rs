//! Runs a solver with optional sparsity elimination and RB aggregation.

use std::time::Instant;

use crate::error::Result;
use crate::model::{count_linked, Instance};
use crate::reduction::{eliminate_sparse, expand_solution, plan_aggregation};
use crate::solvers::{
    solve_brute_force, solve_exact_with, solve_mlf, solve_relaxed, ExactOptions, RelaxParams, SolveResult, SolverId,
    DEFAULT_NODE_BUDGET,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub node_budget: u64,
    /// Penalty weight; `None` picks `z* + 1` for the instance actually solved.
    pub lambda: Option<f64>,
    pub restarts: usize,
    pub seed: u64,
    pub sparsity: bool,
    pub aggregation: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_budget: DEFAULT_NODE_BUDGET,
            lambda: None,
            restarts: 8,
            seed: 0,
            sparsity: false,
            aggregation: false,
        }
    }
}

fn solve_direct(instance: &Instance, solver: SolverId, config: &SolverConfig) -> Result<SolveResult> {
    match solver {
        SolverId::Exact => solve_exact_with(
            instance,
            &ExactOptions {
                node_budget: config.node_budget,
                eliminated: config.sparsity.then(|| eliminate_sparse(instance)),
            },
        ),
        SolverId::Relaxed => {
            let params = match config.lambda {
                Some(lambda) => RelaxParams::new(instance, lambda, config.restarts.max(1), config.seed, 0.5)?,
                None => RelaxParams::for_instance(instance)
                    .with_restarts(config.restarts)
                    .with_seed(config.seed),
            };
            solve_relaxed(instance, &params)
        }
        SolverId::Mlf => solve_mlf(instance),
        SolverId::BruteForce => solve_brute_force(instance),
    }
}

/// Solves `instance`, on the aggregated grid when aggregation is requested
/// and the instance is aggregable. The returned allocation and objective
/// always refer to the original grid, and `elapsed` covers the reductions.
pub fn solve(instance: &Instance, solver: SolverId, config: &SolverConfig) -> Result<SolveResult> {
    let start = Instant::now();
    instance.check_capacity()?;
    let plan = if config.aggregation { plan_aggregation(instance) } else { None };
    let Some(plan) = plan else {
        let mut res = solve_direct(instance, solver, config)?;
        res.elapsed = start.elapsed();
        return Ok(res);
    };
    let scaled = solve_direct(&plan.scaled_instance, solver, config)?;
    let allocation = expand_solution(&plan, &scaled.allocation)?;
    let objective = count_linked(instance, &allocation)?;
    Ok(SolveResult {
        allocation,
        objective,
        solver,
        elapsed: start.elapsed(),
        certified: scaled.certified,
        nodes: scaled.nodes,
    })
}
