//! Lie–Poisson and metric brackets on density operators, the commutant
//! splitting `ρ = ρ_∥ + ρ_⊥` of a Hermitian channel, and the classical
//! double-bracket (BKMR) flow.
//!
//! Functional gradients are Hermitian under the pairing `Tr(X ρ)`. The
//! Hamiltonian generator is `−i∇H`, so
//! `{F, H}(ρ) = −i Tr(ρ [X_F, X_H])` and a linear `F(ρ) = Tr(Aρ)` evolves as
//! `Tr(A · (−i[H, ρ]))`. The dissipation potential is `S(ρ) = ½ Tr ρ²`,
//! whose gradient is `ρ` itself.

use crate::error::{Error, Result};
use crate::liealg::{eigh, hs_inner_unchecked, Basis, ComplexMatrix, HermitianOperator, HERMITIAN_TOL};

/// Eigenvalue gap below which two eigenvalues of `L` are treated as equal.
pub const CLUSTER_GAP: f64 = 1e-8;

/// The gradient `δF/δρ` of a real functional.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalGradient(HermitianOperator);

impl FunctionalGradient {
    pub fn new(x: HermitianOperator) -> Self {
        Self(x)
    }

    /// Gradient of the quadratic entropy `S(ρ) = ½ Tr ρ²`.
    pub fn quadratic_entropy(rho: &ComplexMatrix) -> Result<Self> {
        Ok(Self(HermitianOperator::new(rho.clone())?))
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.0
    }
}

impl From<HermitianOperator> for FunctionalGradient {
    fn from(x: HermitianOperator) -> Self {
        Self(x)
    }
}

fn ensure_hermitian(m: &ComplexMatrix) -> Result<()> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Lie–Poisson bracket `{F, H}(ρ) = −i Tr(ρ [X_F, X_H])`.
pub fn lie_poisson(xf: &FunctionalGradient, xh: &FunctionalGradient, rho: &ComplexMatrix) -> Result<f64> {
    xf.0.same_dim(&xh.0)?;
    xf.0.same_dim(rho)?;
    let c = xf.0.comm(&xh.0);
    Ok((-num_complex::Complex64::i() * (rho * &c).trace()).re)
}

/// Metric bracket `(F, S) = −(γ/2) Re Tr([L, X_F]† [L, X_S])`.
pub fn acsp_metric(xf: &FunctionalGradient, xs: &FunctionalGradient, l: &HermitianOperator, gamma: f64) -> Result<f64> {
    l.same_dim(&xf.0)?;
    l.same_dim(&xs.0)?;
    let a = l.comm(&xf.0);
    let b = l.comm(&xs.0);
    Ok(-0.5 * gamma * hs_inner_unchecked(&a, &b).re)
}

/// The same bracket in double-commutator form `−(γ/2) ⟨X_F, [L, [L, X_S]]⟩`.
pub fn acsp_metric_double_commutator(
    xf: &FunctionalGradient,
    xs: &FunctionalGradient,
    l: &HermitianOperator,
    gamma: f64,
) -> Result<f64> {
    l.same_dim(&xf.0)?;
    l.same_dim(&xs.0)?;
    let dd = l.comm(&l.comm(&xs.0));
    Ok(-0.5 * gamma * hs_inner_unchecked(&xf.0, &dd).re)
}

/// `−i[H, ρ] − (γ/2)[L, [L, ρ]]`.
pub fn metriplectic_field(rho: &ComplexMatrix, h: &HermitianOperator, l: &HermitianOperator, gamma: f64) -> Result<ComplexMatrix> {
    rho.same_dim(h)?;
    rho.same_dim(l)?;
    let mut out = h.comm(rho).mul_neg_i();
    out.axpy(-0.5 * gamma, &l.comm(&l.comm(rho)));
    Ok(out)
}

/// Field recovered from a bracket by probing with the linear functionals
/// `F_a(ρ) = Tr(λ_a ρ)`: `ρ̇ = ½ Σ_a Ḟ_a λ_a` (the trace is conserved).
fn field_from_probe(basis: &Basis, mut probe: impl FnMut(&FunctionalGradient) -> Result<f64>) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(basis.dim());
    for la in basis.elements() {
        let rate = probe(&FunctionalGradient(la.clone()))?;
        out.axpy(0.5 * rate, la);
    }
    Ok(out)
}

/// Hamiltonian field induced by `{·, H}` with `H(ρ) = Tr(Hρ)`.
pub fn lie_poisson_induced_field(rho: &ComplexMatrix, h: &HermitianOperator, basis: &Basis) -> Result<ComplexMatrix> {
    rho.same_dim(h)?;
    let xh = FunctionalGradient(h.clone());
    field_from_probe(basis, |xf| lie_poisson(xf, &xh, rho))
}

/// Dissipative field induced by `(·, S)` with `S(ρ) = ½ Tr ρ²`.
pub fn metric_induced_field(rho: &ComplexMatrix, l: &HermitianOperator, gamma: f64, basis: &Basis) -> Result<ComplexMatrix> {
    let xs = FunctionalGradient::quadratic_entropy(rho)?;
    field_from_probe(basis, |xf| acsp_metric(xf, &xs, l, gamma))
}

/// Splitting of operators into the commutant of `L` and its HS complement.
///
/// `L = U Λ U†`; eigenvalues closer than [`CLUSTER_GAP`] form one cluster.
/// `A_∥` keeps the blocks of `U† A U` inside each cluster.
#[derive(Clone, Debug)]
pub struct CommutantProjector {
    vectors: ComplexMatrix,
    cluster: Vec<usize>,
    values: Vec<f64>,
}

impl CommutantProjector {
    pub fn new(l: &ComplexMatrix) -> Result<Self> {
        ensure_hermitian(l)?;
        let e = eigh(l);
        let mut cluster = Vec::with_capacity(e.values.len());
        let mut id = 0;
        for k in 0..e.values.len() {
            if k > 0 && e.values[k] - e.values[k - 1] > CLUSTER_GAP {
                id += 1;
            }
            cluster.push(id);
        }
        Ok(Self {
            vectors: e.vectors,
            cluster,
            values: e.values,
        })
    }

    /// Cluster index of each eigenvalue, ascending.
    pub fn clusters(&self) -> &[usize] {
        &self.cluster
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster.last().map_or(0, |c| c + 1)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvectors of `L` as columns.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    /// Mean eigenvalue of a cluster.
    pub fn cluster_value(&self, c: usize) -> f64 {
        let (s, k) = self
            .cluster
            .iter()
            .zip(&self.values)
            .filter(|(&id, _)| id == c)
            .fold((0.0, 0usize), |(s, k), (_, &v)| (s + v, k + 1));
        s / k as f64
    }

    pub fn parallel(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.vectors.same_dim(a)?;
        let u = &self.vectors;
        let ud = u.adjoint();
        let mut b = &(&ud * a) * u;
        let n = a.dim();
        for i in 0..n {
            for j in 0..n {
                if self.cluster[i] != self.cluster[j] {
                    b[(i, j)] = num_complex::Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(&(u * &b) * &ud)
    }

    /// `(A_∥, A_⊥)`.
    pub fn split(&self, a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let par = self.parallel(a)?;
        let perp = a - &par;
        Ok((par, perp))
    }
}

/// `(A_∥, A_⊥)` with `A_∥ ∈ ker ad_L`.
pub fn commutant_projection(l: &HermitianOperator, a: &HermitianOperator) -> Result<(HermitianOperator, HermitianOperator)> {
    let (par, perp) = CommutantProjector::new(l)?.split(a)?;
    Ok((
        HermitianOperator::from_hermitian_part(&par),
        HermitianOperator::from_hermitian_part(&perp),
    ))
}

/// Both sides of `d/dt ‖ρ_⊥‖² = −γ ‖[L, ρ_⊥]‖²` under the pure dissipator:
/// `lhs = 2⟨ρ_⊥, −(γ/2)[L, [L, ρ_⊥]]⟩`, `rhs = −γ ‖[L, ρ_⊥]‖²`.
pub fn contraction_rate(rho: &ComplexMatrix, l: &HermitianOperator, gamma: f64) -> Result<(f64, f64)> {
    let (_, perp) = CommutantProjector::new(l)?.split(rho)?;
    let c = l.comm(&perp);
    let dd = l.comm(&c).scale(-0.5 * gamma);
    let lhs = 2.0 * hs_inner_unchecked(&perp, &dd).re;
    let rhs = -gamma * hs_inner_unchecked(&c, &c).re;
    Ok((lhs, rhs))
}

/// Double-bracket field `−i[M, ∇H] − λ[M, [M, ∇C]]`.
///
/// The Hamiltonian part carries `−i` so that Hermitian `M` stays Hermitian;
/// both terms are commutators with `M`, so the flow is isospectral.
pub fn bkmr_field(
    m: &HermitianOperator,
    grad_h: &HermitianOperator,
    grad_c: &HermitianOperator,
    lambda: f64,
) -> Result<HermitianOperator> {
    m.same_dim(grad_h)?;
    m.same_dim(grad_c)?;
    let mut out = m.comm(grad_h).mul_neg_i();
    out.axpy(-lambda, &m.comm(&m.comm(grad_c)));
    Ok(HermitianOperator::from_hermitian_part(&out))
}

/// Energy `Tr(Hρ)`.
pub fn energy(h: &HermitianOperator, rho: &ComplexMatrix) -> Result<f64> {
    h.same_dim(rho)?;
    Ok((&**h * rho).trace().re)
}

/// Quadratic entropy `½ Tr ρ²`.
pub fn quadratic_entropy(rho: &ComplexMatrix) -> f64 {
    0.5 * (rho * rho).trace().re
}
