use std::time::Instant;

use crate::error::Result;
use crate::model::Instance;
use crate::reduction::{EliminatedSet, Rbam};
use crate::solvers::mlf::mlf_rbam;
use crate::solvers::{SolveResult, SolverId};

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone)]
pub struct ExactOptions {
    pub node_budget: u64,
    /// `(m, b)` pairs fixed to zero; when present the search only ever
    /// considers MVNOs with a positive quota on each BS.
    pub eliminated: Option<EliminatedSet>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            eliminated: None,
        }
    }
}

pub fn solve_exact(instance: &Instance, node_budget: u64) -> Result<SolveResult> {
    solve_exact_with(
        instance,
        &ExactOptions {
            node_budget,
            eliminated: None,
        },
    )
}

/// Branch and bound over per-RB MVNO choices.
///
/// Cells are visited column by column (RB index ascending) and, inside a
/// column, by BS in descending interference degree. Columns are kept in
/// non-increasing lexicographic order since any column permutation of a
/// solution scores the same. The search is seeded with the greedy solution
/// and stops early when `node_budget` is exhausted, returning the incumbent
/// uncertified.
pub fn solve_exact_with(instance: &Instance, options: &ExactOptions) -> Result<SolveResult> {
    let start = Instant::now();
    instance.check_capacity()?;

    let seed = mlf_rbam(instance);
    let mut search = Search::new(instance, options, &seed);
    search.dfs(0, false);

    let grid = search.best_rbam();
    Ok(SolveResult {
        allocation: grid.to_allocation(),
        objective: search.best,
        solver: SolverId::Exact,
        elapsed: start.elapsed(),
        certified: !search.exhausted,
        nodes: search.nodes,
    })
}

const UNSET: u16 = u16::MAX;

struct Search {
    nb: usize,
    z: usize,
    /// label used for an unassigned RB; sorts after every MVNO id
    none: u16,
    order: Vec<usize>,
    position: Vec<usize>,
    candidates: Vec<Vec<u16>>,
    /// interfering BSs of each BS that come earlier within a column
    earlier_neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize, Vec<u16>)>,
    grid: Vec<u16>,
    remaining: Vec<Vec<u64>>,
    slack: Vec<u64>,
    links: u64,
    best: u64,
    best_grid: Vec<u16>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search {
    fn new(instance: &Instance, options: &ExactOptions, seed: &Rbam) -> Self {
        let nb = instance.num_bs();
        let z = instance.num_rbs();
        let nm = instance.num_mvnos();
        let none = nm as u16;

        let mut order: Vec<usize> = (0..nb).collect();
        order.sort_by(|&a, &b| instance.degree(b).cmp(&instance.degree(a)).then(a.cmp(&b)));
        let mut position = vec![0; nb];
        for (p, &b) in order.iter().enumerate() {
            position[b] = p;
        }

        let candidates: Vec<Vec<u16>> = (0..nb)
            .map(|b| match &options.eliminated {
                Some(set) => set.active_mvnos(b).into_iter().map(|m| m as u16).collect(),
                None => (0..nm as u16).collect(),
            })
            .collect();

        let earlier_neighbors = (0..nb)
            .map(|b| {
                instance
                    .neighbors(b)
                    .into_iter()
                    .filter(|&c| position[c] < position[b])
                    .collect()
            })
            .collect();

        let edges = instance
            .edges()
            .into_iter()
            .map(|(u, v)| {
                let common = candidates[u]
                    .iter()
                    .copied()
                    .filter(|m| candidates[v].contains(m))
                    .collect();
                (u, v, common)
            })
            .collect();

        let remaining: Vec<Vec<u64>> = (0..nb)
            .map(|b| (0..nm).map(|m| instance.quota(m, b)).collect())
            .collect();
        let slack = (0..nb).map(|b| z as u64 - instance.demand(b)).collect();

        let encode = |m: Option<usize>| m.map_or(none, |m| m as u16);
        let best_grid = (0..nb * z).map(|i| encode(seed.get(i / z, i % z))).collect();

        Search {
            nb,
            z,
            none,
            order,
            position,
            candidates,
            earlier_neighbors,
            edges,
            grid: vec![UNSET; nb * z],
            remaining,
            slack,
            links: 0,
            best: seed.links(instance),
            best_grid,
            nodes: 0,
            budget: options.node_budget,
            exhausted: false,
        }
    }

    #[inline]
    fn cell(&self, b: usize, col: usize) -> u16 {
        self.grid[b * self.z + col]
    }

    /// Optimistic count of links still obtainable, given that the first `p`
    /// BSs (in search order) of column `col` are already fixed.
    fn bound(&self, col: usize, p: usize) -> u64 {
        let columns_left = (self.z - col) as u64;
        let mut total = 0;
        for (u, v, common) in &self.edges {
            let (u, v) = (*u, *v);
            let u_set = self.position[u] < p;
            let v_set = self.position[v] < p;
            if u_set && v_set {
                // this column is settled for the edge; only later ones count
                let later: u64 = common
                    .iter()
                    .map(|&m| self.remaining[u][m as usize].min(self.remaining[v][m as usize]))
                    .sum();
                total += later.min(columns_left - 1);
                continue;
            }
            let cu = if u_set { self.cell(u, col) } else { UNSET };
            let cv = if v_set { self.cell(v, col) } else { UNSET };
            let mut quota_bound = 0;
            for &m in common {
                let ru = self.remaining[u][m as usize] + u64::from(cu == m);
                let rv = self.remaining[v][m as usize] + u64::from(cv == m);
                quota_bound += ru.min(rv);
            }
            total += quota_bound.min(columns_left);
        }
        total
    }

    fn dfs(&mut self, k: usize, tight: bool) {
        if self.exhausted {
            return;
        }
        if k == self.nb * self.z {
            if self.links > self.best {
                self.best = self.links;
                self.best_grid.clone_from(&self.grid);
            }
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let col = k / self.nb;
        let p = k % self.nb;
        let b = self.order[p];
        // a fresh column starts tight against its predecessor
        let tight = if p == 0 { col > 0 } else { tight };

        if self.links + self.bound(col, p) <= self.best {
            return;
        }

        let ceiling = if tight { self.cell(b, col - 1) } else { self.none };
        let mut options: Vec<(u64, u16)> = Vec::with_capacity(self.candidates[b].len() + 1);
        for &m in &self.candidates[b] {
            if m <= ceiling && self.remaining[b][m as usize] > 0 {
                let gain = self.earlier_neighbors[b]
                    .iter()
                    .filter(|&&c| self.cell(c, col) == m)
                    .count() as u64;
                options.push((gain, m));
            }
        }
        if self.slack[b] > 0 && self.none <= ceiling {
            options.push((0, self.none));
        }
        options.sort_by(|a, b| b.cmp(a));

        for (gain, m) in options {
            self.grid[b * self.z + col] = m;
            if m == self.none {
                self.slack[b] -= 1;
            } else {
                self.remaining[b][m as usize] -= 1;
            }
            self.links += gain;

            self.dfs(k + 1, tight && m == ceiling);

            self.links -= gain;
            if m == self.none {
                self.slack[b] += 1;
            } else {
                self.remaining[b][m as usize] += 1;
            }
            self.grid[b * self.z + col] = UNSET;
            if self.exhausted {
                return;
            }
        }
    }

    fn best_rbam(&self) -> Rbam {
        let mut grid = Rbam::new(self.nb, self.z);
        for (i, &m) in self.best_grid.iter().enumerate() {
            if m != self.none {
                grid.set(i / self.z, i % self.z, Some(m as usize));
            }
        }
        grid
    }
}
