//! GKSL generators and the preset channel catalog.
//!
//! A [`ChannelSpec`] carries an unscaled Lindblad operator `L` and a rate
//! `γ ≥ 0`; the rate multiplies the dissipator, `γ (LρL† − ½{L†L, ρ})`.
//! For Hermitian `L` this equals `−(γ/2)[L, [L, ρ]]`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::liealg::{standard_basis, ComplexMatrix, HermitianOperator, HERMITIAN_TOL};

/// One Lindblad channel: operator `L` (any square matrix) and rate `γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    l: ComplexMatrix,
    gamma: f64,
    label: Option<String>,
}

impl ChannelSpec {
    pub fn new(l: ComplexMatrix, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::NonFinite("channel rate".into()));
        }
        if gamma < 0.0 {
            return Err(Error::NegativeRate(gamma));
        }
        if !l.is_finite() {
            return Err(Error::NonFinite("Lindblad operator".into()));
        }
        Ok(Self { l, gamma, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.l
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    pub fn is_hermitian(&self) -> bool {
        self.l.hermiticity_defect() <= HERMITIAN_TOL
    }
}

fn check_rate(gamma: f64) -> Result<()> {
    if !gamma.is_finite() {
        Err(Error::NonFinite("channel rate".into()))
    } else if gamma < 0.0 {
        Err(Error::NegativeRate(gamma))
    } else {
        Ok(())
    }
}

/// `−(γ/2)[L, [L, ρ]]` for Hermitian `L`.
pub fn dissipator_hermitian(l: &HermitianOperator, gamma: f64, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_rate(gamma)?;
    l.same_dim(rho)?;
    Ok(l.comm(&l.comm(rho)).scale(-0.5 * gamma))
}

/// `LρL† − ½{L†L, ρ}` for arbitrary `L`.
pub fn dissipator_general(l: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    l.same_dim(rho)?;
    Ok(dissipator_general_unchecked(l, rho))
}

pub(crate) fn dissipator_general_unchecked(l: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let ld = l.adjoint();
    let jump = &(l * rho) * &ld;
    let ldl = &ld * l;
    &jump - &ldl.anticomm(rho).scale(0.5)
}

/// Cartesian parts `A = (L + L†)/2`, `B = (L − L†)/(2i)` with `L = A + iB`.
pub fn cartesian_decompose(l: &ComplexMatrix) -> Result<(HermitianOperator, HermitianOperator)> {
    if !l.is_finite() {
        return Err(Error::NonFinite("Lindblad operator".into()));
    }
    let ld = l.adjoint();
    let a = (l + &ld).scale(0.5);
    // (L − L†)/(2i) = −(i/2)(L − L†)
    let b = (l - &ld).mul_neg_i().scale(0.5);
    Ok((HermitianOperator::new(a)?, HermitianOperator::new(b)?))
}

/// Four-term expansion of the general dissipator in the Cartesian parts of `L`:
/// `−½[A,[A,ρ]] − ½[B,[B,ρ]] − (i/2)[A,{B,ρ}] + (i/2)[B,{A,ρ}]`.
///
/// The mixed terms equal `i(BρA − AρB) − (i/2){[A,B], ρ}`, which is not a
/// commutator with `ρ` in general, so they are kept as written.
pub fn dissipator_decomposed(l: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    l.same_dim(rho)?;
    let (a, b) = cartesian_decompose(l)?;
    let mut out = a.comm(&a.comm(rho)).scale(-0.5);
    out.axpy(-0.5, &b.comm(&b.comm(rho)));
    out += &a.comm(&b.anticomm(rho)).scale_c(Complex64::new(0.0, -0.5));
    out += &b.comm(&a.anticomm(rho)).scale_c(Complex64::new(0.0, 0.5));
    Ok(out)
}

/// `−i[H, ρ] + Σ_j γ_j (L_j ρ L_j† − ½{L_j†L_j, ρ})`.
pub fn gksl_generator(h: &ComplexMatrix, channels: &[ChannelSpec], rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    h.same_dim(rho)?;
    for ch in channels {
        ch.l.same_dim(rho)?;
        check_rate(ch.gamma)?;
    }
    Ok(gksl_generator_unchecked(h, channels, rho))
}

pub(crate) fn gksl_generator_unchecked(h: &ComplexMatrix, channels: &[ChannelSpec], rho: &ComplexMatrix) -> ComplexMatrix {
    let mut out = h.comm(rho).mul_neg_i();
    for ch in channels {
        if ch.gamma != 0.0 {
            out.axpy(ch.gamma, &dissipator_general_unchecked(&ch.l, rho));
        }
    }
    out
}

/// Named presets. Operators are stored unscaled; the rate multiplies the dissipator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `L = σ_z`, rate `γ`: `ṙ = (−2γ r_x, −2γ r_y, 0)`.
    Dephasing,
    /// `L_i = σ_i` for `i = x, y, z`, each at rate `γ/2` (the folded form is
    /// `L_i = √(γ/2) σ_i`). The summed generator is isotropic, `ṙ = −2γ r`.
    Depolarizing,
    /// `L = σ₋ = [[0,0],[1,0]]`, rate `γ`: relaxes to the south pole `|1⟩`.
    AmplitudeDamping,
    /// Qutrit `L = λ_3`, rate `γ`.
    QutritDephasingL3,
    /// Qutrit `L = λ_8`, rate `γ`.
    QutritDephasingL8,
    /// Qutrit `L = λ_1`, rate `γ`; couples levels 1 and 2.
    QutritLadderL1,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Dephasing,
        Preset::Depolarizing,
        Preset::AmplitudeDamping,
        Preset::QutritDephasingL3,
        Preset::QutritDephasingL8,
        Preset::QutritLadderL1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Dephasing => "dephasing",
            Preset::Depolarizing => "depolarizing",
            Preset::AmplitudeDamping => "amplitude_damping",
            Preset::QutritDephasingL3 => "qutrit_dephasing_l3",
            Preset::QutritDephasingL8 => "qutrit_dephasing_l8",
            Preset::QutritLadderL1 => "qutrit_ladder_l1",
        }
    }

    /// Hilbert-space dimension the preset acts on.
    pub fn dim(self) -> usize {
        match self {
            Preset::Dephasing | Preset::Depolarizing | Preset::AmplitudeDamping => 2,
            _ => 3,
        }
    }

    /// Rate convention and resulting Bloch dynamics, one line.
    pub fn convention(self) -> &'static str {
        match self {
            Preset::Dephasing => "L = sigma_z, rate gamma (folded: sqrt(gamma) sigma_z); r_x, r_y decay at 2*gamma",
            Preset::Depolarizing => {
                "L_i = sigma_i (i = x,y,z), each at rate gamma/2 (folded: sqrt(gamma/2) sigma_i); isotropic decay kappa = 2*gamma"
            }
            Preset::AmplitudeDamping => {
                "L = sigma_minus, rate gamma (folded: sqrt(gamma) sigma_minus); r_x, r_y decay at gamma/2, r_z -> -1 at gamma"
            }
            Preset::QutritDephasingL3 => "L = lambda_3, rate gamma; r_1,r_2 decay at 2*gamma, r_4..r_7 at gamma/2",
            Preset::QutritDephasingL8 => "L = lambda_8, rate gamma; r_4..r_7 decay at 3*gamma/2",
            Preset::QutritLadderL1 => "L = lambda_1, rate gamma; Hermitian ladder between levels 1 and 2",
        }
    }

    /// The preset's unscaled operators with their per-channel rates.
    pub fn channels(self, gamma: f64) -> Result<Vec<ChannelSpec>> {
        check_rate(gamma)?;
        let basis = standard_basis(self.dim())?;
        let op = |a: usize| (**basis.get(a)).clone();
        let specs = match self {
            Preset::Dephasing => vec![ChannelSpec::new(op(2), gamma)?.with_label("sigma_z")],
            Preset::Depolarizing => vec![
                ChannelSpec::new(op(0), gamma / 2.0)?.with_label("sigma_x"),
                ChannelSpec::new(op(1), gamma / 2.0)?.with_label("sigma_y"),
                ChannelSpec::new(op(2), gamma / 2.0)?.with_label("sigma_z"),
            ],
            Preset::AmplitudeDamping => vec![ChannelSpec::new(sigma_minus(), gamma)?.with_label("sigma_minus")],
            Preset::QutritDephasingL3 => vec![ChannelSpec::new(op(2), gamma)?.with_label("lambda_3")],
            Preset::QutritDephasingL8 => vec![ChannelSpec::new(op(7), gamma)?.with_label("lambda_8")],
            Preset::QutritLadderL1 => vec![ChannelSpec::new(op(0), gamma)?.with_label("lambda_1")],
        };
        Ok(specs)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown channel preset '{s}'")))
    }
}

/// A preset together with its rate parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelCatalogEntry {
    pub preset: Preset,
    pub gamma: f64,
}

impl ChannelCatalogEntry {
    pub fn build(&self) -> Result<Vec<ChannelSpec>> {
        self.preset.channels(self.gamma)
    }
}

/// `σ₋ = [[0, 0], [1, 0]]`, mapping `|0⟩` to `|1⟩`.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).expect("2x2 literal")
}
