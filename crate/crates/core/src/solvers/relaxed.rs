use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, RsepError};
use crate::model::{Instance, QMatrix};
use crate::reduction::Rbam;
use crate::solvers::{SolveResult, SolverId};

/// Parameters of the penalty relaxation.
///
/// The objective `½ xᵀ(Q + 2λI)x − λ eᵀx` is convex on the unit hypercube
/// once `λ ≥ z*`, the largest eigenvalue of `Q`; constructors reject smaller
/// penalties.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxParams {
    lambda: f64,
    max_restarts: usize,
    rounding_seed: u64,
    convergence_tol: f64,
}

/// `z*` of the instance, or 0 when nothing interferes (then `Q = 0`).
fn top_eigenvalue(instance: &Instance) -> f64 {
    QMatrix::new(instance).largest_eigenvalue().unwrap_or(0.0)
}

fn check_lambda(lambda: f64, z_star: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < z_star - 1e-12 * z_star.max(1.0) {
        return Err(RsepError::InvalidParameter(format!(
            "lambda = {lambda} is below the largest eigenvalue z* = {z_star}; the relaxation is not convex"
        )));
    }
    Ok(())
}

impl RelaxParams {
    pub fn new(
        instance: &Instance,
        lambda: f64,
        max_restarts: usize,
        rounding_seed: u64,
        convergence_tol: f64,
    ) -> Result<Self> {
        check_lambda(lambda, top_eigenvalue(instance))?;
        if max_restarts == 0 {
            return Err(RsepError::InvalidParameter("max_restarts must be positive".into()));
        }
        if convergence_tol.is_nan() || convergence_tol < 0.0 {
            return Err(RsepError::InvalidParameter("convergence_tol must be non-negative".into()));
        }
        Ok(RelaxParams {
            lambda,
            max_restarts,
            rounding_seed,
            convergence_tol,
        })
    }

    /// `λ = z* + 1`, 8 restarts, seed 0.
    pub fn for_instance(instance: &Instance) -> Self {
        RelaxParams {
            lambda: top_eigenvalue(instance) + 1.0,
            max_restarts: 8,
            rounding_seed: 0,
            convergence_tol: 0.5,
        }
    }

    pub fn with_restarts(mut self, max_restarts: usize) -> Self {
        self.max_restarts = max_restarts.max(1);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rounding_seed = seed;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn max_restarts(&self) -> usize {
        self.max_restarts
    }

    pub fn rounding_seed(&self) -> u64 {
        self.rounding_seed
    }

    pub fn convergence_tol(&self) -> f64 {
        self.convergence_tol
    }
}

/// Vertex-restricted local search on the penalized objective.
///
/// Every iterate is a 0/1 point of the feasible polytope, where the penalty
/// term vanishes and the surrogate equals the linked-RB count, so moves are
/// scored in integers. A move exchanges the entries of two RB columns on one
/// BS, or on both ends of an interfering pair; both preserve every quota.
pub fn solve_relaxed(instance: &Instance, params: &RelaxParams) -> Result<SolveResult> {
    let start = Instant::now();
    instance.check_capacity()?;
    check_lambda(params.lambda, top_eigenvalue(instance))?;

    let mut search = LocalSearch::new(instance);
    let mut best: Option<(i64, Vec<u16>)> = None;
    let mut moves = 0u64;
    for restart in 0..params.max_restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(params.rounding_seed);
        rng.set_stream(restart as u64);
        search.randomize(instance, &mut rng);
        moves += search.climb(params.convergence_tol);
        let value = search.links();
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, search.grid.clone()));
        }
    }

    let (objective, cells) = best.expect("at least one restart");
    let grid = search.to_rbam(&cells);
    debug_assert_eq!(grid.links(instance), objective as u64);
    Ok(SolveResult {
        allocation: grid.to_allocation(),
        objective: objective as u64,
        solver: SolverId::Relaxed,
        elapsed: start.elapsed(),
        certified: false,
        nodes: moves,
    })
}

const NONE: u16 = u16::MAX;

struct LocalSearch {
    nb: usize,
    z: usize,
    neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    grid: Vec<u16>,
}

#[inline]
fn same(a: u16, b: u16) -> i64 {
    i64::from(a != NONE && a == b)
}

impl LocalSearch {
    fn new(instance: &Instance) -> Self {
        let nb = instance.num_bs();
        LocalSearch {
            nb,
            z: instance.num_rbs(),
            neighbors: (0..nb).map(|b| instance.neighbors(b)).collect(),
            edges: instance.edges(),
            grid: vec![NONE; nb * instance.num_rbs()],
        }
    }

    #[inline]
    fn at(&self, b: usize, col: usize) -> u16 {
        self.grid[b * self.z + col]
    }

    fn randomize(&mut self, instance: &Instance, rng: &mut ChaCha8Rng) {
        for b in 0..self.nb {
            let row = &mut self.grid[b * self.z..(b + 1) * self.z];
            let mut i = 0;
            for m in 0..instance.num_mvnos() {
                for _ in 0..instance.quota(m, b) {
                    row[i] = m as u16;
                    i += 1;
                }
            }
            row[i..].fill(NONE);
            row.shuffle(rng);
        }
    }

    fn links(&self) -> i64 {
        let mut total = 0;
        for &(u, v) in &self.edges {
            for col in 0..self.z {
                total += same(self.at(u, col), self.at(v, col));
            }
        }
        total
    }

    /// Gain from exchanging columns `c1`, `c2` on row `u`, ignoring the
    /// neighbor `skip` (which moves together with `u`).
    fn row_delta(&self, u: usize, skip: usize, c1: usize, c2: usize) -> i64 {
        let (u1, u2) = (self.at(u, c1), self.at(u, c2));
        let mut delta = 0;
        for &v in &self.neighbors[u] {
            if v == skip {
                continue;
            }
            let (v1, v2) = (self.at(v, c1), self.at(v, c2));
            delta += same(u2, v1) + same(u1, v2) - same(u1, v1) - same(u2, v2);
        }
        delta
    }

    /// Best-improvement hill climb; returns the number of applied moves.
    fn climb(&mut self, tol: f64) -> u64 {
        let mut applied = 0;
        loop {
            // (delta, row a, row b or usize::MAX, c1, c2)
            let mut best = (0i64, 0usize, usize::MAX, 0usize, 0usize);
            for u in 0..self.nb {
                for c1 in 0..self.z {
                    for c2 in c1 + 1..self.z {
                        if self.at(u, c1) == self.at(u, c2) {
                            continue;
                        }
                        let d = self.row_delta(u, usize::MAX, c1, c2);
                        if d > best.0 {
                            best = (d, u, usize::MAX, c1, c2);
                        }
                    }
                }
            }
            for &(u, v) in &self.edges {
                for c1 in 0..self.z {
                    for c2 in c1 + 1..self.z {
                        if self.at(u, c1) == self.at(u, c2) || self.at(v, c1) == self.at(v, c2) {
                            continue;
                        }
                        let d = self.row_delta(u, v, c1, c2) + self.row_delta(v, u, c1, c2);
                        if d > best.0 {
                            best = (d, u, v, c1, c2);
                        }
                    }
                }
            }
            let (delta, u, v, c1, c2) = best;
            if (delta as f64) <= tol {
                return applied;
            }
            self.grid.swap(u * self.z + c1, u * self.z + c2);
            if v != usize::MAX {
                self.grid.swap(v * self.z + c1, v * self.z + c2);
            }
            applied += 1;
        }
    }

    fn to_rbam(&self, cells: &[u16]) -> Rbam {
        let mut grid = Rbam::new(self.nb, self.z);
        for (i, &m) in cells.iter().enumerate() {
            if m != NONE {
                grid.set(i / self.z, i % self.z, Some(m as usize));
            }
        }
        grid
    }
}
