use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, RsepError};
use crate::model::{check_feasibility, Allocation, Instance};

/// RB allocation matrix: row `b` is a base station, column `τ` a resource
/// block, and each entry the single MVNO owning it (or `None`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rbam {
    rows: usize,
    cols: usize,
    cells: Vec<Option<usize>>,
}

impl Rbam {
    pub fn new(rows: usize, cols: usize) -> Self {
        Rbam {
            rows,
            cols,
            cells: vec![None; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<Option<usize>>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != cols) {
            return Err(RsepError::DimensionMismatch("RBAM rows differ in length".into()));
        }
        Ok(Rbam {
            rows: rows.len(),
            cols,
            cells: rows.iter().flatten().copied().collect(),
        })
    }

    /// Fails if any cell has more than one owner.
    pub fn from_allocation(alloc: &Allocation) -> Result<Self> {
        let mut out = Rbam::new(alloc.num_bs(), alloc.num_rbs());
        for b in 0..alloc.num_bs() {
            for rb in 0..alloc.num_rbs() {
                match alloc.owners(b, rb) {
                    [] => {}
                    [m] => out.set(b, rb, Some(*m)),
                    many => {
                        return Err(RsepError::InvalidParameter(format!(
                            "cell (b={b}, rb={rb}) has owners {many:?}"
                        )))
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn to_allocation(&self) -> Allocation {
        let mut alloc = Allocation::unassigned(self.rows, self.cols);
        for b in 0..self.rows {
            for rb in 0..self.cols {
                if let Some(m) = self.get(b, rb) {
                    alloc.assign(b, rb, m);
                }
            }
        }
        alloc
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, b: usize, col: usize) -> Option<usize> {
        self.cells[b * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, b: usize, col: usize, m: Option<usize>) {
        self.cells[b * self.cols + col] = m;
    }

    pub fn row(&self, b: usize) -> &[Option<usize>] {
        &self.cells[b * self.cols..(b + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<Option<usize>> {
        (0..self.rows).map(|b| self.get(b, col)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.rows).map(|b| self.row(b).to_vec()).collect()
    }

    /// Builds an RBAM whose columns are the given column vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Option<usize>>]) -> Self {
        let mut out = Rbam::new(rows, columns.len());
        for (col, entries) in columns.iter().enumerate() {
            for (b, &m) in entries.iter().enumerate() {
                out.set(b, col, m);
            }
        }
        out
    }

    /// Occurrences of each label (including `None`) in row `b`.
    pub fn row_counts(&self, b: usize) -> BTreeMap<Option<usize>, usize> {
        let mut counts = BTreeMap::new();
        for &m in self.row(b) {
            *counts.entry(m).or_insert(0) += 1;
        }
        counts
    }

    /// Distinct MVNOs appearing in row `b` (unassigned cells not counted).
    pub fn distinct_mvnos(&self, b: usize) -> usize {
        self.row_counts(b).keys().filter(|k| k.is_some()).count()
    }

    /// Exchanges two whole columns.
    pub fn swap_columns(&mut self, c1: usize, c2: usize) {
        for b in 0..self.rows {
            self.cells.swap(b * self.cols + c1, b * self.cols + c2);
        }
    }

    /// Exchanges columns `c1` and `c2` on the given rows only.
    pub fn partial_swap(&mut self, rows: &[usize], c1: usize, c2: usize) {
        for &b in rows {
            self.cells.swap(b * self.cols + c1, b * self.cols + c2);
        }
    }

    /// Links contributed by one column.
    pub fn column_links(&self, instance: &Instance, col: usize) -> u64 {
        let mut links = 0;
        for (b, c) in instance.edges() {
            if let Some(m) = self.get(b, col) {
                if self.get(c, col) == Some(m) {
                    links += 1;
                }
            }
        }
        links
    }

    /// Total linked RBs of the matrix under the instance's interference graph.
    pub fn links(&self, instance: &Instance) -> u64 {
        assert_eq!(self.rows, instance.num_bs(), "RBAM row count must equal B");
        let edges = instance.edges();
        let mut links = 0;
        for col in 0..self.cols {
            for &(b, c) in &edges {
                if let Some(m) = self.get(b, col) {
                    if self.get(c, col) == Some(m) {
                        links += 1;
                    }
                }
            }
        }
        links
    }

    /// Links between two specific rows.
    pub fn shared_links(&self, instance: &Instance, b: usize, c: usize) -> u64 {
        if !instance.interferes(b, c) {
            return 0;
        }
        (0..self.cols)
            .filter(|&col| self.get(b, col).is_some() && self.get(b, col) == self.get(c, col))
            .count() as u64
    }

    /// Change in total links if columns `c1`, `c2` were exchanged on `rows`.
    /// Only pairs with exactly one endpoint in `rows` can change.
    pub fn partial_swap_delta(&self, instance: &Instance, rows: &[usize], c1: usize, c2: usize) -> i64 {
        let mut in_set = vec![false; self.rows];
        for &b in rows {
            in_set[b] = true;
        }
        let same = |a: Option<usize>, b: Option<usize>| i64::from(a.is_some() && a == b);
        let mut delta = 0;
        for &u in rows {
            let (u1, u2) = (self.get(u, c1), self.get(u, c2));
            for v in 0..self.rows {
                if in_set[v] || !instance.interferes(u, v) {
                    continue;
                }
                let (v1, v2) = (self.get(v, c1), self.get(v, c2));
                delta += same(u2, v1) + same(u1, v2) - same(u1, v1) - same(u2, v2);
            }
        }
        delta
    }

    /// Expands every column `k` times, keeping replicas adjacent.
    pub fn replicate_columns(&self, k: usize) -> Rbam {
        let mut out = Rbam::new(self.rows, self.cols * k);
        for b in 0..self.rows {
            for col in 0..self.cols {
                for j in 0..k {
                    out.set(b, col * k + j, self.get(b, col));
                }
            }
        }
        out
    }

    /// Checks row multiplicities against `L / divisor` for every MVNO.
    pub fn check_quotas(&self, instance: &Instance, divisor: u64) -> Result<()> {
        let scaled: Vec<Vec<u64>> = instance
            .profile()
            .iter()
            .map(|row| row.iter().map(|&l| l / divisor).collect())
            .collect();
        let inst = Instance::new(
            instance.num_mvnos(),
            instance.num_bs(),
            1,
            self.cols,
            instance.adjacency().to_vec(),
            scaled,
        )?;
        let report = check_feasibility(&inst, &self.to_allocation())?;
        if report.is_feasible() {
            Ok(())
        } else {
            Err(RsepError::InfeasibleAllocation(report))
        }
    }
}

impl fmt::Display for Rbam {
    /// One line per BS; MVNO ids are printed 1-based, unassigned as `.`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .cells
            .iter()
            .flatten()
            .map(|m| (m + 1).to_string().len())
            .max()
            .unwrap_or(1);
        write!(f, "{:>5} |", "")?;
        for col in 0..self.cols {
            write!(f, " {:>width$}", col % 10)?;
        }
        writeln!(f)?;
        for b in 0..self.rows {
            write!(f, "BS{:<3} |", b + 1)?;
            for col in 0..self.cols {
                match self.get(b, col) {
                    Some(m) => write!(f, " {:>width$}", m + 1)?,
                    None => write!(f, " {:>width$}", ".")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Serialize for Rbam {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rbam {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Option<usize>>> = Vec::deserialize(deserializer)?;
        Rbam::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}
