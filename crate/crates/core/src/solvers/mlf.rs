use std::time::Instant;

use crate::error::Result;
use crate::model::Instance;
use crate::reduction::Rbam;
use crate::solvers::{SolveResult, SolverId};

/// Linking index of every MVNO: `Σ_b Σ_{b'≠b} min(L[m][b], L[m][b']) · y[b][b']`.
///
/// Ordered pairs are summed, so each interfering pair contributes twice.
pub fn linking_index(instance: &Instance) -> Vec<u64> {
    let nb = instance.num_bs();
    (0..instance.num_mvnos())
        .map(|m| {
            let mut l = 0;
            for b in 0..nb {
                for c in 0..nb {
                    if c != b && instance.interferes(b, c) {
                        l += instance.quota(m, b).min(instance.quota(m, c));
                    }
                }
            }
            l
        })
        .collect()
}

/// MVNO order used by the greedy fill: linking index descending, ties by id.
pub(crate) fn mlf_order(instance: &Instance) -> Vec<usize> {
    let index = linking_index(instance);
    let mut order: Vec<usize> = (0..instance.num_mvnos()).collect();
    order.sort_by(|&a, &b| index[b].cmp(&index[a]).then(a.cmp(&b)));
    order
}

/// Greedy fill: higher-index MVNOs are placed first and take the lowest free
/// RBs on every BS, so MVNOs with similar quotas line up across neighbors.
pub(crate) fn mlf_rbam(instance: &Instance) -> Rbam {
    let z = instance.num_rbs();
    let mut grid = Rbam::new(instance.num_bs(), z);
    let mut next_free = vec![0usize; instance.num_bs()];
    for m in mlf_order(instance) {
        for (b, next) in next_free.iter_mut().enumerate() {
            let quota = instance.quota(m, b) as usize;
            for rb in *next..*next + quota {
                grid.set(b, rb, Some(m));
            }
            *next += quota;
        }
    }
    grid
}

/// Most-Linked-First greedy heuristic.
pub fn solve_mlf(instance: &Instance) -> Result<SolveResult> {
    let start = Instant::now();
    instance.check_capacity()?;
    let grid = mlf_rbam(instance);
    let objective = grid.links(instance);
    Ok(SolveResult {
        allocation: grid.to_allocation(),
        objective,
        solver: SolverId::Mlf,
        elapsed: start.elapsed(),
        certified: false,
        nodes: 0,
    })
}
