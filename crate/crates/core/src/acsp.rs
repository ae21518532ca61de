//! Adjoint-coupled semidirect products: `V = g^{⊕m}` with left and right
//! adjoint actions, their torsion, the diamond coupling, and the reduced
//! Euler–Poincaré vector field.
//!
//! Lie-algebra elements are Hermitian matrices. The Hamiltonian generator is
//! `ξ = −iH`; its coadjoint term is `−i[H, ρ]`. The dissipative part is
//! `L ⋄ α` with `α_k = (γ_k/2)[ρ, L_k]` re-derived from `ρ` at every
//! evaluation, so the advection equation for `α` is never integrated.

use crate::channels::ChannelSpec;
use crate::error::{Error, Result};
use crate::liealg::{ComplexMatrix, HermitianOperator};

/// An element `(v_1, …, v_m)` of `V = g^{⊕m}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointTuple {
    dim: usize,
    components: Vec<ComplexMatrix>,
}

impl AdjointTuple {
    pub fn new(components: Vec<ComplexMatrix>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidDimension("adjoint tuple needs at least one component".into()))?;
        let dim = first.dim();
        for c in &components {
            first.same_dim(c)?;
        }
        Ok(Self { dim, components })
    }

    pub fn zeros(dim: usize, m: usize) -> Self {
        Self {
            dim,
            components: vec![ComplexMatrix::zeros(dim); m],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[ComplexMatrix] {
        &self.components
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.components.iter()
    }

    /// Componentwise `f`.
    pub fn map(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        Self {
            dim: self.dim,
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(ComplexMatrix::max_abs).fold(0.0, f64::max)
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.dim, right: dim })
        }
    }
}

/// Hamiltonian plus Hermitian Lindblad operators with their rates.
#[derive(Clone, Debug)]
pub struct AcspSystem {
    h: HermitianOperator,
    lindblads: Vec<HermitianOperator>,
    rates: Vec<f64>,
}

impl AcspSystem {
    pub fn new(h: HermitianOperator, lindblads: Vec<HermitianOperator>, rates: Vec<f64>) -> Result<Self> {
        if lindblads.len() != rates.len() {
            return Err(Error::LengthMismatch {
                left: lindblads.len(),
                right: rates.len(),
            });
        }
        for l in &lindblads {
            h.same_dim(l)?;
        }
        for &g in &rates {
            if !g.is_finite() {
                return Err(Error::NonFinite("channel rate".into()));
            }
            if g < 0.0 {
                return Err(Error::NegativeRate(g));
            }
        }
        Ok(Self { h, lindblads, rates })
    }

    /// Builds a system from channel specs; every `L` must be Hermitian.
    pub fn from_channels(h: HermitianOperator, channels: &[ChannelSpec]) -> Result<Self> {
        let mut ls = Vec::with_capacity(channels.len());
        let mut rates = Vec::with_capacity(channels.len());
        for ch in channels {
            ls.push(HermitianOperator::new(ch.operator().clone())?);
            rates.push(ch.gamma());
        }
        Self::new(h, ls, rates)
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.h
    }

    pub fn lindblads(&self) -> &[HermitianOperator] {
        &self.lindblads
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// `(L_1, …, L_m)` as an element of `V`.
    pub fn lindblad_tuple(&self) -> AdjointTuple {
        AdjointTuple {
            dim: self.dim(),
            components: self.lindblads.iter().map(|l| (**l).clone()).collect(),
        }
    }

    /// The equivalent channel list, `γ_k (L_k ρ L_k − ½{L_k², ρ})` per channel.
    pub fn channels(&self) -> Vec<ChannelSpec> {
        self.lindblads
            .iter()
            .zip(&self.rates)
            .map(|(l, &g)| ChannelSpec::new((**l).clone(), g).expect("validated"))
            .collect()
    }
}

/// Infinitesimal left action `ξ · v = ([ξ, v_1], …)`.
pub fn left_action(xi: &ComplexMatrix, v: &AdjointTuple) -> Result<AdjointTuple> {
    v.check_dim(xi.dim())?;
    Ok(v.map(|vk| xi.comm(vk)))
}

/// Infinitesimal right action `v · ξ = −([ξ, v_1], …)`.
pub fn right_action(xi: &ComplexMatrix, v: &AdjointTuple) -> Result<AdjointTuple> {
    v.check_dim(xi.dim())?;
    Ok(v.map(|vk| vk.comm(xi)))
}

/// Adjoint torsion `K(ξ, v) = ξ·v − v·ξ = 2([ξ, v_1], …, [ξ, v_m])`.
pub fn torsion(xi: &ComplexMatrix, v: &AdjointTuple) -> Result<AdjointTuple> {
    v.check_dim(xi.dim())?;
    Ok(v.map(|vk| xi.comm(vk).scale(2.0)))
}

/// Diamond coupling `v ⋄ α = Σ_k [v_k, α_k]`.
pub fn diamond(v: &AdjointTuple, alpha: &AdjointTuple) -> Result<ComplexMatrix> {
    if v.len() != alpha.len() {
        return Err(Error::LengthMismatch {
            left: v.len(),
            right: alpha.len(),
        });
    }
    alpha.check_dim(v.dim)?;
    let mut out = ComplexMatrix::zeros(v.dim);
    for (vk, ak) in v.iter().zip(alpha.iter()) {
        out += &vk.comm(ak);
    }
    Ok(out)
}

/// Advected variables `α_k = (γ_k/2)[ρ, L_k]`.
pub fn advected(rho: &ComplexMatrix, system: &AcspSystem) -> Result<AdjointTuple> {
    rho.same_dim(&system.h)?;
    Ok(advected_unchecked(rho, system))
}

fn advected_unchecked(rho: &ComplexMatrix, system: &AcspSystem) -> AdjointTuple {
    AdjointTuple {
        dim: rho.dim(),
        components: system
            .lindblads
            .iter()
            .zip(&system.rates)
            .map(|(l, &g)| rho.comm(l).scale(0.5 * g))
            .collect(),
    }
}

/// Coadjoint term `−i[H, μ]` of the generator `ξ = −iH`.
pub fn coadjoint_term(h: &ComplexMatrix, mu: &ComplexMatrix) -> Result<ComplexMatrix> {
    h.same_dim(mu)?;
    Ok(h.comm(mu).mul_neg_i())
}

/// Reduced Euler–Poincaré field `ρ̇ = −i[H, ρ] + L ⋄ α(ρ)`.
pub fn ep_vector_field(rho: &ComplexMatrix, system: &AcspSystem) -> Result<ComplexMatrix> {
    rho.same_dim(&system.h)?;
    Ok(ep_vector_field_unchecked(rho, system))
}

pub(crate) fn ep_vector_field_unchecked(rho: &ComplexMatrix, system: &AcspSystem) -> ComplexMatrix {
    let mut out = system.h.comm(rho).mul_neg_i();
    let alpha = advected_unchecked(rho, system);
    for (l, a) in system.lindblads.iter().zip(alpha.iter()) {
        out += &l.comm(a);
    }
    out
}
