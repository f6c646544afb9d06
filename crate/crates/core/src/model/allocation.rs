use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, RsepError};
use crate::model::Instance;

/// Assignment of resource blocks to MVNOs, one grid row per base station.
///
/// Each cell lists the MVNOs holding that RB. A feasible allocation has at
/// most one owner per cell; more than one is representable so that
/// indicator vectors violating the one-owner constraint can be loaded and
/// reported on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    num_bs: usize,
    num_rbs: usize,
    cells: Vec<Vec<usize>>,
}

impl Allocation {
    pub fn unassigned(num_bs: usize, num_rbs: usize) -> Self {
        Allocation {
            num_bs,
            num_rbs,
            cells: vec![Vec::new(); num_bs * num_rbs],
        }
    }

    /// Builds an allocation from per-BS rows of optional owners.
    pub fn from_rows(rows: &[Vec<Option<usize>>]) -> Result<Self> {
        let num_rbs = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != num_rbs) {
            return Err(RsepError::DimensionMismatch("allocation rows differ in length".into()));
        }
        let cells = rows
            .iter()
            .flat_map(|row| row.iter().map(|cell| cell.iter().copied().collect()))
            .collect();
        Ok(Allocation {
            num_bs: rows.len(),
            num_rbs,
            cells,
        })
    }

    /// Decodes the flat indicator vector `x`, indexed as
    /// `m * (B * Z) + b * Z + rb` with `Z = N_RB * T`.
    pub fn from_indicator(instance: &Instance, x: &[u8]) -> Result<Self> {
        let (nb, z) = (instance.num_bs(), instance.num_rbs());
        if x.len() != instance.num_variables() {
            return Err(RsepError::DimensionMismatch(format!(
                "indicator has length {}, expected {}",
                x.len(),
                instance.num_variables()
            )));
        }
        let mut alloc = Allocation::unassigned(nb, z);
        for (i, &bit) in x.iter().enumerate() {
            match bit {
                0 => {}
                1 => {
                    let m = i / (nb * z);
                    let rest = i % (nb * z);
                    alloc.assign(rest / z, rest % z, m);
                }
                other => {
                    return Err(RsepError::InvalidParameter(format!(
                        "indicator entry {i} is {other}, not binary"
                    )))
                }
            }
        }
        Ok(alloc)
    }

    pub fn to_indicator(&self, num_mvnos: usize) -> Vec<u8> {
        let z = self.num_rbs;
        let mut x = vec![0u8; num_mvnos * self.num_bs * z];
        for b in 0..self.num_bs {
            for rb in 0..z {
                for &m in self.owners(b, rb) {
                    if m < num_mvnos {
                        x[m * self.num_bs * z + b * z + rb] = 1;
                    }
                }
            }
        }
        x
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_rbs(&self) -> usize {
        self.num_rbs
    }

    pub fn owners(&self, b: usize, rb: usize) -> &[usize] {
        &self.cells[b * self.num_rbs + rb]
    }

    /// Single owner of a cell; `None` for unassigned or contested cells.
    pub fn owner(&self, b: usize, rb: usize) -> Option<usize> {
        match self.owners(b, rb) {
            [m] => Some(*m),
            _ => None,
        }
    }

    /// Adds `m` as an owner of `(b, rb)`; no-op if it already is one.
    pub fn assign(&mut self, b: usize, rb: usize, m: usize) {
        let cell = &mut self.cells[b * self.num_rbs + rb];
        if !cell.contains(&m) {
            cell.push(m);
        }
    }

    pub fn clear(&mut self, b: usize, rb: usize) {
        self.cells[b * self.num_rbs + rb].clear();
    }

    /// Rows of optional owners; contested cells collapse to `None`.
    pub fn rows(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.num_bs)
            .map(|b| (0..self.num_rbs).map(|rb| self.owner(b, rb)).collect())
            .collect()
    }

    pub fn count_for(&self, m: usize, b: usize) -> u64 {
        (0..self.num_rbs).filter(|&rb| self.owners(b, rb).contains(&m)).count() as u64
    }

    pub fn ensure_shape(&self, instance: &Instance) -> Result<()> {
        if self.num_bs != instance.num_bs() || self.num_rbs != instance.num_rbs() {
            return Err(RsepError::DimensionMismatch(format!(
                "allocation is {}x{}, instance expects {}x{}",
                self.num_bs,
                self.num_rbs,
                instance.num_bs(),
                instance.num_rbs()
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("allocation serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CellDoc {
    One(usize),
    Many(Vec<usize>),
}

impl Serialize for Allocation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Option<CellDoc>>> = (0..self.num_bs)
            .map(|b| {
                (0..self.num_rbs)
                    .map(|rb| match self.owners(b, rb) {
                        [] => None,
                        [m] => Some(CellDoc::One(*m)),
                        many => Some(CellDoc::Many(many.to_vec())),
                    })
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Allocation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Option<CellDoc>>> = Vec::deserialize(deserializer)?;
        let num_rbs = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != num_rbs) {
            return Err(serde::de::Error::custom("allocation rows differ in length"));
        }
        let mut alloc = Allocation::unassigned(rows.len(), num_rbs);
        for (b, row) in rows.iter().enumerate() {
            for (rb, cell) in row.iter().enumerate() {
                match cell {
                    None => {}
                    Some(CellDoc::One(m)) => alloc.assign(b, rb, *m),
                    Some(CellDoc::Many(ms)) => ms.iter().for_each(|&m| alloc.assign(b, rb, m)),
                }
            }
        }
        Ok(alloc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotaViolation {
    pub mvno: usize,
    pub bs: usize,
    pub required: u64,
    pub assigned: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapViolation {
    pub bs: usize,
    pub subcarrier: usize,
    pub slot: usize,
    pub owners: Vec<usize>,
}

/// Per-constraint outcome of [`check_feasibility`]; empty iff feasible.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    /// C1: `(m, b)` pairs whose assigned count differs from the quota.
    pub quota: Vec<QuotaViolation>,
    /// C2: cells owned by more than one MVNO.
    pub overlap: Vec<OverlapViolation>,
    /// Owner ids that are not MVNOs of the instance.
    pub unknown_mvnos: Vec<usize>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.quota.is_empty() && self.overlap.is_empty() && self.unknown_mvnos.is_empty()
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_feasible() {
            return write!(f, "feasible");
        }
        let mut parts = Vec::new();
        for v in &self.quota {
            parts.push(format!(
                "C1 violated at (m={}, b={}): required {}, assigned {}",
                v.mvno, v.bs, v.required, v.assigned
            ));
        }
        for v in &self.overlap {
            parts.push(format!(
                "C2 violated at (b={}, n={}, t={}): owners {:?}",
                v.bs, v.subcarrier, v.slot, v.owners
            ));
        }
        if !self.unknown_mvnos.is_empty() {
            parts.push(format!("unknown MVNO ids {:?}", self.unknown_mvnos));
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks constraints C1 (exact quotas) and C2 (one owner per cell).
/// Fails only when the allocation grid does not match the instance shape.
pub fn check_feasibility(instance: &Instance, alloc: &Allocation) -> Result<FeasibilityReport> {
    alloc.ensure_shape(instance)?;
    let mut report = FeasibilityReport::default();
    let mut counts = vec![vec![0u64; instance.num_bs()]; instance.num_mvnos()];
    for b in 0..instance.num_bs() {
        for rb in 0..instance.num_rbs() {
            let owners = alloc.owners(b, rb);
            if owners.len() > 1 {
                let (subcarrier, slot) = instance.rb_coords(rb);
                report.overlap.push(OverlapViolation {
                    bs: b,
                    subcarrier,
                    slot,
                    owners: owners.to_vec(),
                });
            }
            for &m in owners {
                match counts.get_mut(m) {
                    Some(row) => row[b] += 1,
                    None => {
                        if !report.unknown_mvnos.contains(&m) {
                            report.unknown_mvnos.push(m);
                        }
                    }
                }
            }
        }
    }
    for (m, row) in counts.iter().enumerate() {
        for (b, &assigned) in row.iter().enumerate() {
            let required = instance.quota(m, b);
            if assigned != required {
                report.quota.push(QuotaViolation {
                    mvno: m,
                    bs: b,
                    required,
                    assigned,
                });
            }
        }
    }
    Ok(report)
}

/// Total linked RBs: for every interfering pair and every RB, one link when
/// both base stations give that RB to the same MVNO.
pub fn count_linked(instance: &Instance, alloc: &Allocation) -> Result<u64> {
    let report = check_feasibility(instance, alloc)?;
    if !report.is_feasible() {
        return Err(RsepError::InfeasibleAllocation(report));
    }
    let mut links = 0u64;
    for (b, c) in instance.edges() {
        for rb in 0..instance.num_rbs() {
            if let (Some(p), Some(q)) = (alloc.owner(b, rb), alloc.owner(c, rb)) {
                if p == q {
                    links += 1;
                }
            }
        }
    }
    Ok(links)
}
