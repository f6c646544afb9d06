use std::time::Instant;

use crate::error::{Result, RsepError};
use crate::model::Instance;
use crate::reduction::Rbam;
use crate::solvers::{SolveResult, SolverId};

pub const DEFAULT_ORACLE_BUDGET: u64 = 10_000_000;

/// Exhaustive search over all feasible allocations.
pub fn solve_brute_force(instance: &Instance) -> Result<SolveResult> {
    solve_brute_force_with_budget(instance, DEFAULT_ORACLE_BUDGET)
}

/// Enumerates every distinct arrangement of each BS's label multiset and
/// keeps the best. Columns are interchangeable, so BS 0 is held at its sorted
/// arrangement. Exceeding `budget` partial states is an error.
pub fn solve_brute_force_with_budget(instance: &Instance, budget: u64) -> Result<SolveResult> {
    let start = Instant::now();
    instance.check_capacity()?;
    let nb = instance.num_bs();
    let z = instance.num_rbs();

    let mut states = 0u64;
    let mut arrangements: Vec<Vec<Vec<Option<usize>>>> = Vec::with_capacity(nb);
    for b in 0..nb {
        let mut labels: Vec<Option<usize>> = Vec::with_capacity(z);
        for m in 0..instance.num_mvnos() {
            labels.extend(std::iter::repeat_n(Some(m), instance.quota(m, b) as usize));
        }
        labels.resize(z, None);
        labels.sort();
        if b == 0 {
            arrangements.push(vec![labels]);
            continue;
        }
        let mut all = vec![labels.clone()];
        while next_permutation(&mut labels) {
            states += 1;
            if states > budget {
                return Err(RsepError::OracleBudgetExceeded(states));
            }
            all.push(labels.clone());
        }
        arrangements.push(all);
    }

    let neighbors_below: Vec<Vec<usize>> =
        (0..nb).map(|b| (0..b).filter(|&c| instance.interferes(b, c)).collect()).collect();
    let mut choice = vec![0usize; nb];
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut partial = vec![0u64; nb + 1];
    let mut depth = 0usize;
    // iterative DFS over the arrangement index of each BS
    loop {
        if depth == nb {
            let links = partial[nb];
            if best.as_ref().is_none_or(|(v, _)| links > *v) {
                best = Some((links, choice.clone()));
            }
            depth -= 1;
            if !advance(&mut choice, &arrangements, &mut depth) {
                break;
            }
            continue;
        }
        states += 1;
        if states > budget {
            return Err(RsepError::OracleBudgetExceeded(states));
        }
        let row = &arrangements[depth][choice[depth]];
        let mut gained = 0;
        for &c in &neighbors_below[depth] {
            let other = &arrangements[c][choice[c]];
            gained += row
                .iter()
                .zip(other)
                .filter(|(a, b)| a.is_some() && a == b)
                .count() as u64;
        }
        partial[depth + 1] = partial[depth] + gained;
        depth += 1;
        if depth < nb {
            choice[depth] = 0;
        }
    }

    let (objective, picks) = best.expect("at least one allocation exists");
    let mut grid = Rbam::new(nb, z);
    for b in 0..nb {
        for (rb, &m) in arrangements[b][picks[b]].iter().enumerate() {
            grid.set(b, rb, m);
        }
    }
    Ok(SolveResult {
        allocation: grid.to_allocation(),
        objective,
        solver: SolverId::BruteForce,
        elapsed: start.elapsed(),
        certified: true,
        nodes: states,
    })
}

/// Moves to the next sibling at `depth`, backtracking as needed. Returns
/// false once the whole tree is exhausted.
fn advance(choice: &mut [usize], arrangements: &[Vec<Vec<Option<usize>>>], depth: &mut usize) -> bool {
    loop {
        choice[*depth] += 1;
        if choice[*depth] < arrangements[*depth].len() {
            return true;
        }
        if *depth == 0 {
            return false;
        }
        choice[*depth] = 0;
        *depth -= 1;
    }
}

/// Lexicographic next permutation; false when already at the last one.
fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
