//! Hermitian eigendecomposition via `nalgebra`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::liealg::matrix::ComplexMatrix;

/// Eigen-decomposition `A = V diag(values) V†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

/// Diagonalizes the Hermitian part of `m`.
pub fn eigh(m: &ComplexMatrix) -> Eigh {
    let n = m.dim();
    let a = m.hermitian_part();
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, a.as_slice()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new)] = eig.eigenvectors[(k, old)];
        }
    }
    Eigh { values, vectors }
}
