use serde::{Deserialize, Serialize};

use crate::error::{Result, RsepError};

/// A RAN slicing enforcement problem: which base stations interfere, and how
/// many resource blocks each MVNO must receive on each base station.
///
/// Resource blocks are addressed by a single linear index
/// `rb = slot * num_subcarriers + subcarrier` (time-major).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceDoc", into = "InstanceDoc")]
pub struct Instance {
    num_mvnos: usize,
    num_bs: usize,
    num_subcarriers: usize,
    num_slots: usize,
    adjacency: Vec<Vec<u8>>,
    profile: Vec<Vec<u64>>,
}

/// On-disk layout: `{"M", "B", "N_RB", "T", "Y": B×B, "L": M×B}`.
#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "B")]
    b: usize,
    #[serde(rename = "N_RB")]
    n_rb: usize,
    #[serde(rename = "T")]
    t: usize,
    #[serde(rename = "Y")]
    y: Vec<Vec<u8>>,
    #[serde(rename = "L")]
    l: Vec<Vec<u64>>,
}

impl TryFrom<InstanceDoc> for Instance {
    type Error = RsepError;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        Instance::new(doc.m, doc.b, doc.n_rb, doc.t, doc.y, doc.l)
    }
}

impl From<Instance> for InstanceDoc {
    fn from(inst: Instance) -> Self {
        InstanceDoc {
            m: inst.num_mvnos,
            b: inst.num_bs,
            n_rb: inst.num_subcarriers,
            t: inst.num_slots,
            y: inst.adjacency,
            l: inst.profile,
        }
    }
}

impl Instance {
    /// Builds an instance after checking shapes, symmetry and the zero
    /// diagonal of `adjacency`. Per-BS capacity is checked separately by
    /// [`Instance::check_capacity`] so that overloaded instances can still be
    /// loaded and reported on.
    pub fn new(
        num_mvnos: usize,
        num_bs: usize,
        num_subcarriers: usize,
        num_slots: usize,
        adjacency: Vec<Vec<u8>>,
        profile: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(RsepError::InvalidInstance(msg));
        if num_mvnos == 0 || num_bs == 0 || num_subcarriers == 0 || num_slots == 0 {
            return bad("M, B, N_RB and T must all be positive".into());
        }
        if adjacency.len() != num_bs || adjacency.iter().any(|row| row.len() != num_bs) {
            return bad(format!("Y must be {num_bs}x{num_bs}"));
        }
        for (b, row) in adjacency.iter().enumerate() {
            if row[b] != 0 {
                return bad(format!("Y[{b}][{b}] must be 0"));
            }
            for (c, &y) in row.iter().enumerate() {
                if y > 1 {
                    return bad(format!("Y[{b}][{c}] = {y} is not binary"));
                }
                if y != adjacency[c][b] {
                    return bad(format!("Y is not symmetric at ({b},{c})"));
                }
            }
        }
        if profile.len() != num_mvnos || profile.iter().any(|row| row.len() != num_bs) {
            return bad(format!("L must be {num_mvnos}x{num_bs} (MVNOs by BSs)"));
        }
        Ok(Instance {
            num_mvnos,
            num_bs,
            num_subcarriers,
            num_slots,
            adjacency,
            profile,
        })
    }

    pub fn num_mvnos(&self) -> usize {
        self.num_mvnos
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    /// Resource blocks per base station, `N_RB * T`.
    pub fn num_rbs(&self) -> usize {
        self.num_subcarriers * self.num_slots
    }

    /// Length of the flat indicator vector, `M * B * N_RB * T`.
    pub fn num_variables(&self) -> usize {
        self.num_mvnos * self.num_bs * self.num_rbs()
    }

    pub fn adjacency(&self) -> &[Vec<u8>] {
        &self.adjacency
    }

    pub fn interferes(&self, b: usize, c: usize) -> bool {
        self.adjacency[b][c] == 1
    }

    pub fn profile(&self) -> &[Vec<u64>] {
        &self.profile
    }

    /// Quota of MVNO `m` on base station `b`.
    pub fn quota(&self, m: usize, b: usize) -> u64 {
        self.profile[m][b]
    }

    /// Total demand placed on base station `b`.
    pub fn demand(&self, b: usize) -> u64 {
        self.profile.iter().map(|row| row[b]).sum()
    }

    /// MVNOs with a positive quota on `b`.
    pub fn mvnos_on(&self, b: usize) -> Vec<usize> {
        (0..self.num_mvnos).filter(|&m| self.profile[m][b] > 0).collect()
    }

    pub fn neighbors(&self, b: usize) -> Vec<usize> {
        (0..self.num_bs).filter(|&c| self.adjacency[b][c] == 1).collect()
    }

    pub fn degree(&self, b: usize) -> usize {
        self.adjacency[b].iter().filter(|&&y| y == 1).count()
    }

    /// Unordered interfering pairs `(b, c)` with `b < c`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.num_bs {
            for c in b + 1..self.num_bs {
                if self.adjacency[b][c] == 1 {
                    out.push((b, c));
                }
            }
        }
        out
    }

    pub fn has_interference(&self) -> bool {
        self.adjacency.iter().flatten().any(|&y| y == 1)
    }

    /// Fails with [`RsepError::Overloaded`] on the first BS whose quotas
    /// exceed `N_RB * T`.
    pub fn check_capacity(&self) -> Result<()> {
        let capacity = self.num_rbs() as u64;
        for b in 0..self.num_bs {
            let demand = self.demand(b);
            if demand > capacity {
                return Err(RsepError::Overloaded {
                    bs: b,
                    demand,
                    capacity,
                });
            }
        }
        Ok(())
    }

    /// `(subcarrier, slot)` of a linear RB index.
    pub fn rb_coords(&self, rb: usize) -> (usize, usize) {
        (rb % self.num_subcarriers, rb / self.num_subcarriers)
    }

    pub fn rb_index(&self, subcarrier: usize, slot: usize) -> usize {
        slot * self.num_subcarriers + subcarrier
    }

    /// Same network and profile on a different grid.
    pub fn with_grid(&self, num_subcarriers: usize, num_slots: usize, profile: Vec<Vec<u64>>) -> Result<Self> {
        Instance::new(
            self.num_mvnos,
            self.num_bs,
            num_subcarriers,
            num_slots,
            self.adjacency.clone(),
            profile,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}
