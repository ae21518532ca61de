//! Trace-orthogonal Hermitian bases of su(n) and their structure constants.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::liealg::matrix::{ComplexMatrix, HermitianOperator};

/// Normalization `Tr(λ_a λ_b) = 2 δ_ab` shared by every basis in this crate.
pub const BASIS_NORM: f64 = 2.0;

/// Hermitian traceless basis `{λ_a}` of su(n) with `Tr(λ_a λ_b) = 2δ_ab`.
///
/// For `n = 2` this is `(σ_x, σ_y, σ_z)`; for `n ≥ 3` the generalized
/// Gell-Mann matrices ordered so that `n = 3` reproduces `λ_1 … λ_8`:
/// for each level `k = 2..n`, the symmetric and antisymmetric pairs `(j, k)`
/// with `j < k`, followed by the diagonal element with `k − 1` leading ones.
#[derive(Clone, Debug)]
pub struct Basis {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `n² − 1`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    /// Zero-based access; `basis.get(2)` is `λ_3`.
    pub fn get(&self, a: usize) -> &HermitianOperator {
        &self.elements[a]
    }

    pub fn normalization(&self) -> f64 {
        BASIS_NORM
    }

    /// Largest `|Tr(λ_a λ_b) − 2δ_ab|` and largest `|Tr λ_a|`.
    pub fn orthogonality_defect(&self) -> (f64, f64) {
        let mut gram = 0.0_f64;
        let mut trace = 0.0_f64;
        for (a, la) in self.elements.iter().enumerate() {
            trace = trace.max(la.trace().norm());
            for (b, lb) in self.elements.iter().enumerate() {
                let want = if a == b { BASIS_NORM } else { 0.0 };
                gram = gram.max(((&**la * &**lb).trace() - want).norm());
            }
        }
        (gram, trace)
    }
}

/// Pauli basis for `n = 2`, generalized Gell-Mann basis for `n ≥ 3`.
pub fn standard_basis(n: usize) -> Result<Basis> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("su(n) basis needs n >= 2, got {n}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut elements = Vec::with_capacity(n * n - 1);
    for k in 1..n {
        for j in 0..k {
            let mut sym = ComplexMatrix::zeros(n);
            sym[(j, k)] = one;
            sym[(k, j)] = one;
            elements.push(HermitianOperator::new(sym)?);

            let mut anti = ComplexMatrix::zeros(n);
            anti[(j, k)] = -i;
            anti[(k, j)] = i;
            elements.push(HermitianOperator::new(anti)?);
        }
        let scale = (2.0 / (k * (k + 1)) as f64).sqrt();
        let mut diag = vec![0.0; n];
        for d in diag.iter_mut().take(k) {
            *d = scale;
        }
        diag[k] = -(k as f64) * scale;
        elements.push(HermitianOperator::new(ComplexMatrix::diag(&diag))?);
    }
    Ok(Basis { dim: n, elements })
}

/// Real, totally antisymmetric `f_abc` with `[λ_a, λ_b] = 2i Σ_c f_abc λ_c`.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    dim: usize,
    len: usize,
    f: Vec<f64>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements `n² − 1`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Zero-based `f_abc`.
    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.f[(a * self.len + b) * self.len + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.f
    }

    /// Largest violation of `f_abc = −f_bac = −f_acb`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let d = self.len;
        let mut worst = 0.0_f64;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let v = self.get(a, b, c);
                    worst = worst.max((v + self.get(b, a, c)).abs());
                    worst = worst.max((v + self.get(a, c, b)).abs());
                }
            }
        }
        worst
    }
}

/// `f_abc = Tr([λ_a, λ_b] λ_c) / (4i)`, computed from the basis matrices.
///
/// The trace formula is the ground truth. For `n = 3` it gives
/// `f_367 = −1/2`, the usual Gell-Mann sign; only squares of `f` enter the
/// dephasing rates, so either sign yields the same dynamics.
pub fn structure_constants(basis: &Basis) -> Result<StructureConstants> {
    let (gram, trace) = basis.orthogonality_defect();
    if gram > 1e-12 || trace > 1e-12 {
        return Err(Error::NonOrthogonalBasis(gram.max(trace)));
    }
    let d = basis.len();
    let mut f = vec![0.0; d * d * d];
    let denom = Complex64::new(0.0, 4.0);
    for a in 0..d {
        for b in (a + 1)..d {
            let comm = basis.get(a).comm(basis.get(b));
            for c in 0..d {
                let v = (&comm * &**basis.get(c)).trace() / denom;
                debug_assert!(v.im.abs() < 1e-12);
                f[(a * d + b) * d + c] = v.re;
                f[(b * d + a) * d + c] = -v.re;
            }
        }
    }
    Ok(StructureConstants {
        dim: basis.dim(),
        len: d,
        f,
    })
}
