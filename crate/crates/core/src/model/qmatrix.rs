use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Result, RsepError};
use crate::model::Instance;

/// Default cap on `V` for dense materialization.
pub const DENSE_CAP: usize = 4096;

/// The objective matrix `Q = I_M ⊗ (Y ⊗ I_Z)` kept in factored form.
///
/// Row/column index `i = m * (B * Z) + b * Z + rb`. Entry `Q[i][j]` is
/// `y[b][b']` when `i` and `j` share MVNO and RB, zero otherwise.
#[derive(Debug, Clone)]
pub struct QMatrix {
    num_mvnos: usize,
    num_rbs: usize,
    adjacency: Vec<Vec<u8>>,
    dense_cap: usize,
}

impl QMatrix {
    pub fn new(instance: &Instance) -> Self {
        QMatrix {
            num_mvnos: instance.num_mvnos(),
            num_rbs: instance.num_rbs(),
            adjacency: instance.adjacency().to_vec(),
            dense_cap: DENSE_CAP,
        }
    }

    pub fn with_dense_cap(mut self, cap: usize) -> Self {
        self.dense_cap = cap;
        self
    }

    pub fn num_bs(&self) -> usize {
        self.adjacency.len()
    }

    /// Dimension `V = M * B * Z`.
    pub fn dim(&self) -> usize {
        self.num_mvnos * self.num_bs() * self.num_rbs
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(RsepError::DimensionMismatch(format!(
                "vector has length {len}, Q is {0}x{0}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// `Q v` in `O(V * B)` without forming `Q`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        let (nb, z) = (self.num_bs(), self.num_rbs);
        let mut out = vec![0.0; v.len()];
        for m in 0..self.num_mvnos {
            let block = m * nb * z;
            for b in 0..nb {
                for c in 0..nb {
                    if self.adjacency[b][c] == 0 {
                        continue;
                    }
                    for rb in 0..z {
                        out[block + b * z + rb] += v[block + c * z + rb];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `x^T Q x` for a 0/1 vector, in integers.
    pub fn quadratic_form_binary(&self, x: &[u8]) -> Result<u64> {
        self.check_len(x.len())?;
        let (nb, z) = (self.num_bs(), self.num_rbs);
        let mut total = 0u64;
        for m in 0..self.num_mvnos {
            let block = m * nb * z;
            for b in 0..nb {
                for c in 0..nb {
                    if self.adjacency[b][c] == 0 {
                        continue;
                    }
                    for rb in 0..z {
                        total += u64::from(x[block + b * z + rb] & x[block + c * z + rb]);
                    }
                }
            }
        }
        Ok(total)
    }

    /// Penalized objective `½ xᵀ(Q + 2λI)x − λ eᵀx` at any point of the
    /// unit hypercube.
    pub fn surrogate_value(&self, x: &[f64], lambda: f64) -> Result<f64> {
        let qx = self.matvec(x)?;
        let quad: f64 = x.iter().zip(&qx).map(|(a, b)| a * b).sum();
        // xᵀx − eᵀx is exactly zero at 0/1 points
        let penalty: f64 = x.iter().map(|v| v * v - v).sum();
        Ok(0.5 * quad + lambda * penalty)
    }

    /// Dense `Q`, only when `V` does not exceed the dense cap.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let v = self.dim();
        if v > self.dense_cap {
            return Err(RsepError::InvalidParameter(format!(
                "V = {v} exceeds dense cap {}",
                self.dense_cap
            )));
        }
        let (nb, z) = (self.num_bs(), self.num_rbs);
        let mut q = DMatrix::zeros(v, v);
        for m in 0..self.num_mvnos {
            for b in 0..nb {
                for c in 0..nb {
                    if self.adjacency[b][c] == 1 {
                        for rb in 0..z {
                            q[(m * nb * z + b * z + rb, m * nb * z + c * z + rb)] = 1.0;
                        }
                    }
                }
            }
        }
        Ok(q)
    }

    /// Eigenvalues of `Y`; every eigenvalue of `Q` is one of these, repeated
    /// `M * Z` times.
    pub fn adjacency_spectrum(&self) -> Vec<f64> {
        let nb = self.num_bs();
        let y = DMatrix::from_fn(nb, nb, |i, j| f64::from(self.adjacency[i][j]));
        let mut eig: Vec<f64> = SymmetricEigen::new(y).eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| a.total_cmp(b));
        eig
    }

    /// Largest eigenvalue `z*` of `Q`, computed on the `B x B` matrix `Y`.
    pub fn largest_eigenvalue(&self) -> Result<f64> {
        if self.adjacency.iter().flatten().all(|&y| y == 0) {
            return Err(RsepError::NoInterference);
        }
        Ok(*self.adjacency_spectrum().last().expect("B >= 1"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exchange() -> QMatrix {
        let inst = Instance::new(1, 2, 1, 1, vec![vec![0, 1], vec![1, 0]], vec![vec![0, 0]]).unwrap();
        QMatrix::new(&inst)
    }

    #[test]
    fn exchange_matrix_swaps_entries() {
        assert_eq!(exchange().matvec(&[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn zero_vector_maps_to_zero() {
        assert_eq!(exchange().matvec(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert!(matches!(exchange().matvec(&[1.0]), Err(RsepError::DimensionMismatch(_))));
    }

    #[test]
    fn path_spectrum() {
        assert!((exchange().largest_eigenvalue().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_spectrum() {
        let y = vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
        let inst = Instance::new(1, 3, 1, 1, y, vec![vec![0; 3]]).unwrap();
        let q = QMatrix::new(&inst);
        assert!((q.largest_eigenvalue().unwrap() - 2.0).abs() < 1e-12);
        let spec = q.adjacency_spectrum();
        assert!((spec[0] + 1.0).abs() < 1e-12 && (spec[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_adjacency_has_no_top_eigenvalue() {
        let inst = Instance::new(1, 2, 1, 1, vec![vec![0, 0], vec![0, 0]], vec![vec![0, 0]]).unwrap();
        assert!(matches!(QMatrix::new(&inst).largest_eigenvalue(), Err(RsepError::NoInterference)));
    }

    #[test]
    fn dense_cap_is_enforced() {
        let q = exchange().with_dense_cap(1);
        assert!(q.to_dense().is_err());
    }
}
