//! Bloch coordinates and closed-form channel solutions.
//!
//! Convention for every `n`: `ρ = I/n + ½ Σ_a r_a λ_a` with `r_a = Tr(ρ λ_a)`
//! in the basis of [`standard_basis`]. For qubits this is `ρ = ½(I + r·σ)`.
//!
//! Two qubit normalizations of a Hermitian channel appear in practice:
//! `L = √γ σ_z` (rate folded into the operator) and `L = ½ ℓ·σ`. Each function
//! below states which one it uses.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::channels::{gksl_generator, ChannelSpec, Preset};
use crate::error::{Error, Result};
use crate::liealg::{
    coefficients, from_coefficients, standard_basis, Basis, ComplexMatrix, DensityMatrix,
};

/// Real coordinates of the traceless part of a state, length `n² − 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochVector {
    dim: usize,
    r: Vec<f64>,
}

impl BlochVector {
    pub fn new(dim: usize, r: Vec<f64>) -> Result<Self> {
        if dim < 2 || r.len() != dim * dim - 1 {
            return Err(Error::InvalidDimension(format!(
                "Bloch vector for n = {dim} needs {} components, got {}",
                (dim * dim).saturating_sub(1),
                r.len()
            )));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("Bloch vector".into()));
        }
        Ok(Self { dim, r })
    }

    pub fn qubit(r: [f64; 3]) -> Self {
        Self { dim: 2, r: r.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.r
    }

    pub fn norm(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// The three components of a qubit vector.
    pub fn as_qubit(&self) -> Result<[f64; 3]> {
        if self.dim != 2 {
            return Err(Error::InvalidDimension(format!("expected a qubit, got n = {}", self.dim)));
        }
        Ok([self.r[0], self.r[1], self.r[2]])
    }
}

/// `r_a = Tr(ρ λ_a)`.
pub fn to_bloch(rho: &ComplexMatrix, basis: &Basis) -> Result<BlochVector> {
    let r = coefficients(rho, basis)?;
    Ok(BlochVector { dim: basis.dim(), r })
}

/// `ρ = I/n + ½ Σ r_a λ_a`; fails if the result is not positive semidefinite.
pub fn from_bloch(r: &BlochVector, basis: &Basis) -> Result<DensityMatrix> {
    if r.dim != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: r.dim,
            right: basis.dim(),
        });
    }
    let n = basis.dim();
    let traceless = from_coefficients(&r.r, basis)?;
    let m = &ComplexMatrix::identity(n).scale(1.0 / n as f64) + &traceless;
    DensityMatrix::new(m)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `Ω × r`: the Bloch form of `−i[H, ρ]` for `H = ½ Ω·σ`.
pub fn hamiltonian_field_su2(omega: [f64; 3], r: [f64; 3]) -> [f64; 3] {
    cross(omega, r)
}

/// `−2γ (r − (r·ℓ)ℓ)` for a unit axis `ℓ`.
///
/// This is the Bloch form of `−(γ/2)[L, [L, ρ]]` with `L = ℓ·σ`. With the
/// half-normalized `L = ½ ℓ·σ` the same double commutator contracts at
/// `γ/2` instead, i.e. it equals this field evaluated at rate `γ/4`.
pub fn dissipative_field_su2(ell: [f64; 3], gamma: f64, r: [f64; 3]) -> Result<[f64; 3]> {
    let norm = dot(ell, ell).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitAxis(norm));
    }
    let p = dot(r, ell);
    Ok([
        -2.0 * gamma * (r[0] - p * ell[0]),
        -2.0 * gamma * (r[1] - p * ell[1]),
        -2.0 * gamma * (r[2] - p * ell[2]),
    ])
}

/// Dephasing `L = √γ σ_z`: transverse components decay as `e^{−2γt}`, `r_z` is constant.
pub fn analytic_dephasing(r0: [f64; 3], gamma: f64, t: f64) -> [f64; 3] {
    let d = (-2.0 * gamma * t).exp();
    [r0[0] * d, r0[1] * d, r0[2]]
}

/// Amplitude damping `L = √γ σ₋`:
/// `(r_x e^{−γt/2}, r_y e^{−γt/2}, −1 + (r_z + 1) e^{−γt})`.
pub fn analytic_amplitude_damping(r0: [f64; 3], gamma: f64, t: f64) -> [f64; 3] {
    let half = (-0.5 * gamma * t).exp();
    [r0[0] * half, r0[1] * half, -1.0 + (r0[2] + 1.0) * (-gamma * t).exp()]
}

/// Isotropic decay `r(t) = r0 e^{−κt}` toward the maximally mixed state.
///
/// `κ` is explicit; for the depolarizing preset use [`depolarizing_kappa`].
pub fn analytic_depolarizing(r0: [f64; 3], kappa: f64, t: f64) -> [f64; 3] {
    let d = (-kappa * t).exp();
    [r0[0] * d, r0[1] * d, r0[2] * d]
}

/// Isotropic rate of the depolarizing preset, read off the generator at `r = (1,0,0)`.
///
/// Each `σ_i` channel at rate `γ/2` damps the two components orthogonal to
/// `i` at rate `γ`; every component sees two such channels, so `κ = 2γ`.
pub fn depolarizing_kappa(gamma: f64) -> Result<f64> {
    let basis = standard_basis(2)?;
    let rho = from_bloch(&BlochVector::qubit([1.0, 0.0, 0.0]), &basis)?;
    let rate = gksl_generator(&ComplexMatrix::zeros(2), &Preset::Depolarizing.channels(gamma)?, &rho)?;
    Ok(-coefficients(&rate, &basis)?[0])
}

/// Affine Bloch-space generator `ṙ = M r + b` of a GKSL equation.
#[derive(Clone, Debug)]
pub struct AffineBlochGenerator {
    pub matrix: DMatrix<f64>,
    pub drift: DVector<f64>,
}

impl AffineBlochGenerator {
    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        let v = &self.matrix * DVector::from_column_slice(r) + &self.drift;
        v.iter().copied().collect()
    }

    /// `(d+1) × (d+1)` block matrix `[[M, b], [0, 0]]` acting on `(r, 1)`.
    pub fn augmented(&self) -> DMatrix<f64> {
        let d = self.drift.len();
        let mut a = DMatrix::zeros(d + 1, d + 1);
        a.view_mut((0, 0), (d, d)).copy_from(&self.matrix);
        a.view_mut((0, d), (d, 1)).copy_from(&self.drift);
        a
    }
}

/// Columns of `M` from the generator at `I/n + ½λ_a`, drift from `I/n`.
///
/// The generator acts on traceless perturbations linearly, so these
/// evaluations need not be states.
pub fn bloch_generator(h: &ComplexMatrix, channels: &[ChannelSpec], basis: &Basis) -> Result<AffineBlochGenerator> {
    let n = basis.dim();
    let d = basis.len();
    let center = ComplexMatrix::identity(n).scale(1.0 / n as f64);
    let drift = coefficients(&gksl_generator(h, channels, &center)?, basis)?;
    let mut matrix = DMatrix::zeros(d, d);
    for a in 0..d {
        let mut x = center.clone();
        x.axpy(0.5, basis.get(a));
        let col = coefficients(&gksl_generator(h, channels, &x)?, basis)?;
        for c in 0..d {
            matrix[(c, a)] = col[c] - drift[c];
        }
    }
    Ok(AffineBlochGenerator {
        matrix,
        drift: DVector::from_vec(drift),
    })
}

/// Diagonal qutrit dephasing channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QutritDephasing {
    Lambda3,
    Lambda8,
}

/// One-based component index → exponential decay rate for `L = λ_3` or `λ_8` at rate `γ`.
///
/// Rates are the negated diagonal of the Bloch generator, which is diagonal
/// for diagonal `L`: `(γ/2)(L_i − L_j)²` on the coherence components of
/// levels `(i, j)`, zero on the populations.
pub fn qutrit_dephasing_rates(channel: QutritDephasing, gamma: f64) -> Result<BTreeMap<usize, f64>> {
    let preset = match channel {
        QutritDephasing::Lambda3 => Preset::QutritDephasingL3,
        QutritDephasing::Lambda8 => Preset::QutritDephasingL8,
    };
    let basis = standard_basis(3)?;
    let g = bloch_generator(&ComplexMatrix::zeros(3), &preset.channels(gamma)?, &basis)?;
    Ok((0..basis.len()).map(|a| (a + 1, -g.matrix[(a, a)] + 0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::dissipator_hermitian;
    use crate::liealg::{random_density, HermitianOperator, SeededRng};

    fn close3(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
        (0..3).all(|k| (a[k] - b[k]).abs() <= tol)
    }

    #[test]
    fn pure_and_mixed_states() {
        let b = standard_basis(2).unwrap();
        let up = DensityMatrix::pure(&[num_complex::Complex64::new(1.0, 0.0), num_complex::Complex64::new(0.0, 0.0)])
            .unwrap();
        assert_eq!(to_bloch(&up, &b).unwrap().components(), &[0.0, 0.0, 1.0]);
        for n in 2..=4 {
            let bn = standard_basis(n).unwrap();
            let mixed = DensityMatrix::maximally_mixed(n);
            assert!(to_bloch(&mixed, &bn).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn qutrit_round_trip() {
        let b = standard_basis(3).unwrap();
        let rho = random_density(3, &mut SeededRng::new(12));
        let back = from_bloch(&to_bloch(&rho, &b).unwrap(), &b).unwrap();
        assert!((&*back - &*rho).max_abs() < 1e-12);
    }

    #[test]
    fn from_bloch_rejects_outside_ball() {
        let b = standard_basis(2).unwrap();
        assert!(matches!(from_bloch(&BlochVector::qubit([1.2, 0.0, 0.0]), &b), Err(Error::NotDensity(_))));
        assert!(from_bloch(&BlochVector::qubit([0.6, 0.0, 0.8]), &b).is_ok());
        assert!(BlochVector::new(3, vec![0.0; 3]).is_err());
        let b3 = standard_basis(3).unwrap();
        assert!(matches!(from_bloch(&BlochVector::qubit([0.0; 3]), &b3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hamiltonian_field_examples() {
        assert_eq!(hamiltonian_field_su2([0.0, 0.0, 2.0], [0.0, 0.0, 0.5]), [0.0, 0.0, 0.0]);
        assert_eq!(hamiltonian_field_su2([0.0, 0.0, 0.7], [1.0, 0.0, 0.0]), [0.0, 0.7, 0.0]);
    }

    #[test]
    fn hamiltonian_field_matches_matrix_side() {
        let b = standard_basis(2).unwrap();
        let mut rng = SeededRng::new(13);
        let omega = [rng.normal(), rng.normal(), rng.normal()];
        let rho = random_density(2, &mut rng);
        let r = to_bloch(&rho, &b).unwrap().as_qubit().unwrap();
        let mut h = ComplexMatrix::zeros(2);
        for k in 0..3 {
            h.axpy(0.5 * omega[k], b.get(k));
        }
        let rate = to_bloch(&h.comm(&rho).mul_neg_i(), &b).unwrap().as_qubit().unwrap();
        assert!(close3(rate, hamiltonian_field_su2(omega, r), 1e-12));
    }

    #[test]
    fn dissipative_field_examples() {
        let z = [0.0, 0.0, 1.0];
        assert!(close3(dissipative_field_su2(z, 1.0, [0.0, 0.0, 0.4]).unwrap(), [0.0; 3], 0.0));
        assert!(close3(dissipative_field_su2(z, 1.0, [1.0, 0.0, 0.0]).unwrap(), [-2.0, 0.0, 0.0], 0.0));
        assert!(matches!(dissipative_field_su2([0.0, 0.0, 2.0], 1.0, [1.0, 0.0, 0.0]), Err(Error::NonUnitAxis(_))));
    }

    #[test]
    fn dissipative_field_matches_matrix_side() {
        let b = standard_basis(2).unwrap();
        let mut rng = SeededRng::new(14);
        for _ in 0..20 {
            let v = [rng.normal(), rng.normal(), rng.normal()];
            let nv = dot(v, v).sqrt();
            let ell = [v[0] / nv, v[1] / nv, v[2] / nv];
            let gamma = rng.uniform(0.0, 2.0);
            let rho = random_density(2, &mut rng);
            let r = to_bloch(&rho, &b).unwrap().as_qubit().unwrap();

            let mut full = ComplexMatrix::zeros(2);
            for k in 0..3 {
                full.axpy(ell[k], b.get(k));
            }
            let full = HermitianOperator::new(full).unwrap();
            let d = to_bloch(&dissipator_hermitian(&full, gamma, &rho).unwrap(), &b).unwrap();
            assert!(close3(d.as_qubit().unwrap(), dissipative_field_su2(ell, gamma, r).unwrap(), 1e-12));

            // Half-normalized L = ½ℓ·σ contracts four times slower.
            let half = HermitianOperator::new(full.scale(0.5)).unwrap();
            let d = to_bloch(&dissipator_hermitian(&half, gamma, &rho).unwrap(), &b).unwrap();
            assert!(close3(d.as_qubit().unwrap(), dissipative_field_su2(ell, gamma / 4.0, r).unwrap(), 1e-12));
        }
    }

    #[test]
    fn longitudinal_and_transverse_rates() {
        let mut rng = SeededRng::new(15);
        for _ in 0..50 {
            let v = [rng.normal(), rng.normal(), rng.normal()];
            let nv = dot(v, v).sqrt();
            let ell = [v[0] / nv, v[1] / nv, v[2] / nv];
            let r = [rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)];
            let gamma = rng.uniform(0.1, 3.0);
            let f = dissipative_field_su2(ell, gamma, r).unwrap();
            assert!(dot(f, ell).abs() < 1e-15);
            let p = dot(r, ell);
            let perp = [r[0] - p * ell[0], r[1] - p * ell[1], r[2] - p * ell[2]];
            let rate = 2.0 * dot(perp, f);
            assert!((rate + 4.0 * gamma * dot(perp, perp)).abs() <= 1e-10);
        }
    }

    #[test]
    fn closed_forms() {
        let r0 = [1.0, 0.0, 0.5];
        assert_eq!(analytic_dephasing(r0, 1.0, 0.0), r0);
        assert!(close3(analytic_dephasing(r0, 1.0, 2f64.ln() / 2.0), [0.5, 0.0, 0.5], 1e-15));
        assert_eq!(analytic_amplitude_damping(r0, 1.0, 0.0), r0);
        assert!(close3(analytic_amplitude_damping(r0, 1.0, 60.0), [0.0, 0.0, -1.0], 1e-12));
        assert_eq!(analytic_depolarizing(r0, 2.0, 0.0), r0);
        assert!(close3(analytic_depolarizing(r0, 2.0, 40.0), [0.0; 3], 1e-30));
    }

    #[test]
    fn depolarizing_rate_from_generator() {
        for gamma in [0.25, 1.0, 3.0] {
            assert!((depolarizing_kappa(gamma).unwrap() - 2.0 * gamma).abs() < 1e-14);
        }
    }

    #[test]
    fn generator_is_affine() {
        let b = standard_basis(3).unwrap();
        let mut rng = SeededRng::new(16);
        let h = crate::liealg::random_hermitian(3, &mut rng);
        let mut channels = Preset::QutritLadderL1.channels(0.4).unwrap();
        channels.push(ChannelSpec::new(crate::liealg::random::ginibre(3, &mut rng), 0.3).unwrap());
        let g = bloch_generator(&h, &channels, &b).unwrap();
        for _ in 0..10 {
            let rho = random_density(3, &mut rng);
            let r = to_bloch(&rho, &b).unwrap();
            let direct = to_bloch(&gksl_generator(&h, &channels, &rho).unwrap(), &b).unwrap();
            let via = g.apply(r.components());
            for (x, y) in direct.components().iter().zip(&via) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn qutrit_lambda3_rates() {
        let gamma = 0.6;
        let rates = qutrit_dephasing_rates(QutritDephasing::Lambda3, gamma).unwrap();
        let want = [2.0, 2.0, 0.0, 0.5, 0.5, 0.5, 0.5, 0.0];
        for (k, w) in want.iter().enumerate() {
            assert!((rates[&(k + 1)] - w * gamma).abs() < 1e-14, "component {}", k + 1);
        }
        let rates8 = qutrit_dephasing_rates(QutritDephasing::Lambda8, gamma).unwrap();
        let want8 = [0.0, 0.0, 0.0, 1.5, 1.5, 1.5, 1.5, 0.0];
        for (k, w) in want8.iter().enumerate() {
            assert!((rates8[&(k + 1)] - w * gamma).abs() < 1e-14);
        }
    }
}
