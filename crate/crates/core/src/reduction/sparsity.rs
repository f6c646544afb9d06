use serde::Serialize;

use crate::model::Instance;

/// `(mvno, bs)` pairs with zero quota. Their indicator variables are zero in
/// every feasible allocation, so solvers can drop them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EliminatedSet {
    pairs: Vec<(usize, usize)>,
    #[serde(skip)]
    mask: Vec<Vec<bool>>,
}

impl EliminatedSet {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_eliminated(&self, m: usize, b: usize) -> bool {
        self.mask[m][b]
    }

    /// MVNOs that keep their variables on `b`.
    pub fn active_mvnos(&self, b: usize) -> Vec<usize> {
        (0..self.mask.len()).filter(|&m| !self.mask[m][b]).collect()
    }

    /// Number of indicator variables that survive the elimination.
    pub fn remaining_variables(&self, instance: &Instance) -> usize {
        instance.num_variables() - self.pairs.len() * instance.num_rbs()
    }
}

pub fn eliminate_sparse(instance: &Instance) -> EliminatedSet {
    let mut pairs = Vec::new();
    let mut mask = vec![vec![false; instance.num_bs()]; instance.num_mvnos()];
    for (m, row) in mask.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            if instance.quota(m, b) == 0 {
                pairs.push((m, b));
                *slot = true;
            }
        }
    }
    EliminatedSet { pairs, mask }
}
