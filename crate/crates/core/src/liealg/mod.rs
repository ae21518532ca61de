//! Dense complex-matrix kernels for su(n).
//!
//! Hermitian matrices stand in for Lie-algebra elements throughout; a
//! generator `ξ ∈ su(n)` is represented by the Hermitian `H` with `ξ = −iH`,
//! and the `−i` is applied where the generator is used.

pub mod basis;
pub mod eigen;
pub mod matrix;
pub mod random;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use basis::{standard_basis, structure_constants, Basis, StructureConstants, BASIS_NORM};
pub use eigen::{eigh, Eigh};
pub use matrix::{ComplexMatrix, DensityMatrix, HermitianOperator, HERMITIAN_TOL, PSD_FLOOR, TRACE_TOL};
pub use random::{
    haar_unitary, haar_unitary_seeded, random_density, random_density_seeded, random_hermitian,
    random_hermitian_seeded, SeededRng,
};

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.same_dim(b)?;
    Ok(a.comm(b))
}

/// `AB + BA`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.same_dim(b)?;
    Ok(a.anticomm(b))
}

/// Hilbert–Schmidt inner product `Tr(A†B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    a.same_dim(b)?;
    Ok(hs_inner_unchecked(a, b))
}

pub(crate) fn hs_inner_unchecked(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * y).sum()
}

/// `sqrt(Re Tr(A†A))`.
pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.hs_norm()
}

/// Basis coordinates `r_a = Tr(X λ_a)` of the traceless part of `X`.
pub fn coefficients(x: &ComplexMatrix, basis: &Basis) -> Result<Vec<f64>> {
    if x.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: basis.dim(),
        });
    }
    Ok(coefficients_unchecked(x, basis))
}

pub(crate) fn coefficients_unchecked(x: &ComplexMatrix, basis: &Basis) -> Vec<f64> {
    // Tr(X λ) = Σ_ij X_ij λ_ji; real for Hermitian X.
    let n = x.dim();
    basis
        .elements()
        .iter()
        .map(|l| {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    s += x[(i, j)] * l[(j, i)];
                }
            }
            s.re
        })
        .collect()
}

/// `½ Σ_a r_a λ_a`, the traceless Hermitian operator with coordinates `r`.
///
/// Together with [`coefficients`], `X = (Tr X / n) I + from_coefficients(coefficients(X))`.
pub fn from_coefficients(r: &[f64], basis: &Basis) -> Result<HermitianOperator> {
    if r.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            left: r.len(),
            right: basis.len(),
        });
    }
    let mut m = ComplexMatrix::zeros(basis.dim());
    for (ra, la) in r.iter().zip(basis.elements()) {
        m.axpy(0.5 * ra, la);
    }
    Ok(HermitianOperator::from_hermitian_part(&m))
}
