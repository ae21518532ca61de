//! Fixed-step RK4 integration of density matrices and of the extended
//! `(ρ, z)` state, with per-record diagnostics.
//!
//! Steps have size `dt`; if `t_final` is not a multiple of `dt` the last step
//! is shortened. Records are taken at `t = 0`, every `record_every` steps and
//! at the final step. During integration the smallest eigenvalue may dip to
//! `−1e−6` before the run aborts. Trace is never corrected unless
//! `renormalize` is set; drift above `1e−9` is logged.

use log::{debug, warn};

use crate::acsp::{ep_vector_field_unchecked, AcspSystem};
use crate::brackets::CommutantProjector;
use crate::channels::{gksl_generator_unchecked, ChannelSpec};
use crate::error::{Error, Result};
use crate::liealg::{eigh, ComplexMatrix, DensityMatrix, HermitianOperator};

/// Eigenvalue floor tolerated along a trajectory.
pub const INTEGRATION_PSD_FLOOR: f64 = -1e-6;
/// Abort once `‖ρ‖_HS` exceeds this multiple of its initial value.
pub const GROWTH_LIMIT: f64 = 10.0;
const TRACE_DRIFT_WARN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationConfig {
    pub t_final: f64,
    pub dt: f64,
    pub record_every: usize,
    pub renormalize: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            t_final: 1.0,
            dt: 1e-3,
            record_every: 1,
            renormalize: false,
        }
    }
}

impl SimulationConfig {
    pub fn new(t_final: f64, dt: f64, record_every: usize) -> Result<Self> {
        let c = Self {
            t_final,
            dt,
            record_every,
            renormalize: false,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "t_final must be nonnegative, got {}",
                self.t_final
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Step end times `t_1 < … < t_N = t_final`.
    pub fn step_times(&self) -> Vec<f64> {
        let ratio = self.t_final / self.dt;
        let k = ratio.round();
        let (full, partial) = if (ratio - k).abs() <= 1e-9 * ratio.max(1.0) {
            (k as usize, false)
        } else {
            (ratio.floor() as usize, true)
        };
        let mut times: Vec<f64> = (1..=full).map(|k| k as f64 * self.dt).collect();
        if partial {
            times.push(self.t_final);
        } else if let Some(last) = times.last_mut() {
            *last = self.t_final;
        }
        times
    }
}

/// A state that RK4 can advance.
pub trait OdeState: Clone {
    /// `self + s · d`.
    fn add_scaled(&self, s: f64, d: &Self) -> Self;
    fn is_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn add_scaled(&self, s: f64, d: &Self) -> Self {
        self + s * d
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl OdeState for Vec<f64> {
    fn add_scaled(&self, s: f64, d: &Self) -> Self {
        self.iter().zip(d).map(|(a, b)| a + s * b).collect()
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
}

impl OdeState for ComplexMatrix {
    fn add_scaled(&self, s: f64, d: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(s, d);
        out
    }

    fn is_finite(&self) -> bool {
        ComplexMatrix::is_finite(self)
    }
}

/// Extended state `(ρ, z)`; `z` is the purity-ledger coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactState {
    pub rho: ComplexMatrix,
    pub z: f64,
}

impl OdeState for ContactState {
    fn add_scaled(&self, s: f64, d: &Self) -> Self {
        Self {
            rho: self.rho.add_scaled(s, &d.rho),
            z: self.z + s * d.z,
        }
    }

    fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.z.is_finite()
    }
}

/// One classical fourth-order Runge–Kutta step of size `dt` from time `t`.
pub fn rk4_step<S: OdeState>(mut field: impl FnMut(f64, &S) -> S, state: &S, t: f64, dt: f64) -> Result<S> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    let mut eval = |tt: f64, y: &S| {
        let d = field(tt, y);
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::IntegrationFailure {
                t: tt,
                reason: "non-finite derivative".into(),
            })
        }
    };
    let h = 0.5 * dt;
    let k1 = eval(t, state)?;
    let k2 = eval(t + h, &state.add_scaled(h, &k1))?;
    let k3 = eval(t + h, &state.add_scaled(h, &k2))?;
    let k4 = eval(t + dt, &state.add_scaled(dt, &k3))?;
    Ok(state
        .add_scaled(dt / 6.0, &k1)
        .add_scaled(dt / 3.0, &k2)
        .add_scaled(dt / 3.0, &k3)
        .add_scaled(dt / 6.0, &k4))
}

/// The matrix-valued right-hand side to integrate.
#[derive(Clone, Debug)]
pub enum Generator {
    /// `−i[H, ρ] + Σ γ_j (L_j ρ L_j† − ½{L_j†L_j, ρ})`.
    Gksl { h: HermitianOperator, channels: Vec<ChannelSpec> },
    /// `−i[H, ρ] + L ⋄ α(ρ)`.
    EulerPoincare(AcspSystem),
}

impl Generator {
    pub fn gksl(h: HermitianOperator, channels: Vec<ChannelSpec>) -> Result<Self> {
        for c in &channels {
            h.same_dim(c.operator())?;
        }
        Ok(Self::Gksl { h, channels })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Gksl { h, .. } => h.dim(),
            Self::EulerPoincare(s) => s.dim(),
        }
    }

    pub fn channels(&self) -> Vec<ChannelSpec> {
        match self {
            Self::Gksl { channels, .. } => channels.clone(),
            Self::EulerPoincare(s) => s.channels(),
        }
    }

    pub fn eval(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Self::Gksl { h, channels } => gksl_generator_unchecked(h, channels, rho),
            Self::EulerPoincare(s) => ep_vector_field_unchecked(rho, s),
        }
    }
}

/// Diagnostics at one record point.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub purity: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    /// `‖ρ_⊥‖_HS` relative to each channel; `None` for non-Hermitian channels.
    pub transverse_norms: Vec<Option<f64>>,
    pub contact_z: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }

    pub fn purities(&self) -> Vec<f64> {
        self.diagnostics.iter().map(|d| d.purity).collect()
    }

    pub fn contact_z(&self) -> Option<Vec<f64>> {
        self.diagnostics.iter().map(|d| d.contact_z).collect()
    }

    pub fn max_trace_error(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.trace_error).fold(0.0, f64::max)
    }
}

struct Monitor {
    projectors: Vec<Option<CommutantProjector>>,
    initial_norm: f64,
    renormalize: bool,
}

impl Monitor {
    fn new(rho0: &ComplexMatrix, channels: &[ChannelSpec], renormalize: bool) -> Self {
        Self {
            projectors: channels
                .iter()
                .map(|c| c.is_hermitian().then(|| CommutantProjector::new(c.operator()).ok()).flatten())
                .collect(),
            initial_norm: rho0.hs_norm(),
            renormalize,
        }
    }

    /// Post-step bookkeeping; returns the smallest eigenvalue.
    fn check(&self, rho: &mut ComplexMatrix, t: f64) -> Result<f64> {
        if !rho.is_finite() {
            return Err(Error::IntegrationFailure {
                t,
                reason: "non-finite state".into(),
            });
        }
        if self.renormalize {
            let tr = rho.trace().re;
            *rho = rho.scale(1.0 / tr);
        }
        let norm = rho.hs_norm();
        if norm > GROWTH_LIMIT * self.initial_norm {
            return Err(Error::IntegrationFailure {
                t,
                reason: format!("state norm grew from {:e} to {:e}", self.initial_norm, norm),
            });
        }
        let min = eigh(rho).values[0];
        if min < INTEGRATION_PSD_FLOOR {
            return Err(Error::PsdViolation { t, min_eigenvalue: min });
        }
        Ok(min)
    }

    fn diagnostics(&self, rho: &ComplexMatrix, min_eigenvalue: f64, z: Option<f64>) -> Diagnostics {
        let tr = rho.trace();
        Diagnostics {
            purity: (rho * rho).trace().re,
            trace_error: (tr - 1.0).norm(),
            min_eigenvalue,
            transverse_norms: self
                .projectors
                .iter()
                .map(|p| p.as_ref().and_then(|p| p.split(rho).ok()).map(|(_, perp)| perp.hs_norm()))
                .collect(),
            contact_z: z,
        }
    }
}

fn run<S: OdeState>(
    init: S,
    rho_of: impl Fn(&mut S) -> &mut ComplexMatrix,
    z_of: impl Fn(&S) -> Option<f64>,
    mut field: impl FnMut(&S) -> S,
    channels: &[ChannelSpec],
    config: &SimulationConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let mut state = init;
    let monitor = Monitor::new(rho_of(&mut state), channels, config.renormalize);
    let mut traj = Trajectory::default();

    let min0 = monitor.check(rho_of(&mut state), 0.0)?;
    let record = |traj: &mut Trajectory, state: &mut S, t: f64, min: f64| {
        let z = z_of(state);
        let rho = rho_of(state);
        traj.times.push(t);
        traj.diagnostics.push(monitor.diagnostics(rho, min, z));
        traj.states.push(DensityMatrix::from_trajectory(rho.clone()));
    };
    record(&mut traj, &mut state, 0.0, min0);

    let times = config.step_times();
    let mut t = 0.0;
    for (k, &t_next) in times.iter().enumerate() {
        state = rk4_step(|_, y: &S| field(y), &state, t, t_next - t)?;
        t = t_next;
        let min = monitor.check(rho_of(&mut state), t)?;
        let step = k + 1;
        if step % config.record_every == 0 || step == times.len() {
            record(&mut traj, &mut state, t, min);
        }
    }

    let drift = traj.max_trace_error();
    if !config.renormalize && drift > TRACE_DRIFT_WARN {
        warn!("trace drift {drift:e} over t = {}", config.t_final);
    } else {
        debug!("trace drift {drift:e} over {} steps", times.len());
    }
    Ok(traj)
}

fn check_initial(rho0: &DensityMatrix, dim: usize) -> Result<()> {
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: rho0.dim(),
            right: dim,
        });
    }
    Ok(())
}

/// Integrates `ρ̇ = generator(ρ)` from `rho0`.
pub fn simulate(rho0: &DensityMatrix, generator: &Generator, config: &SimulationConfig) -> Result<Trajectory> {
    check_initial(rho0, generator.dim())?;
    run(
        rho0.matrix().clone(),
        |s| s,
        |_| None,
        |rho| generator.eval(rho),
        &generator.channels(),
        config,
    )
}

/// `ż = −Σ_k (γ_k/2) ‖[L_k, ρ]‖²_HS`.
pub fn contact_rate(rho: &ComplexMatrix, system: &AcspSystem) -> f64 {
    system
        .lindblads()
        .iter()
        .zip(system.rates())
        .map(|(l, &g)| -0.5 * g * l.comm(rho).hs_norm().powi(2))
        .sum()
}

/// `d/dt Tr ρ² = −Σ_k γ_k ‖[L_k, ρ]‖²_HS` along a Hermitian-channel flow.
pub fn purity_rate(rho: &ComplexMatrix, system: &AcspSystem) -> f64 {
    2.0 * contact_rate(rho, system)
}

/// Integrates the coupled system `ρ̇ = −i[H, ρ] − Σ (γ_k/2)[L_k, [L_k, ρ]]`,
/// `ż = −Σ (γ_k/2) ‖[L_k, ρ]‖²`.
pub fn simulate_contact(rho0: &DensityMatrix, z0: f64, system: &AcspSystem, config: &SimulationConfig) -> Result<Trajectory> {
    check_initial(rho0, system.dim())?;
    if !z0.is_finite() {
        return Err(Error::NonFinite("initial contact coordinate".into()));
    }
    run(
        ContactState {
            rho: rho0.matrix().clone(),
            z: z0,
        },
        |s| &mut s.rho,
        |s| Some(s.z),
        |s| ContactState {
            rho: ep_vector_field_unchecked(&s.rho, system),
            z: contact_rate(&s.rho, system),
        },
        &system.channels(),
        config,
    )
}

/// Deviation between the Euler–Poincaré and GKSL paths.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    /// `max_t ‖ρ_EP(t) − ρ_GKSL(t)‖_max` over record points.
    pub max_deviation: f64,
    pub times_checked: usize,
    pub n: usize,
    pub m: usize,
}

/// Integrates both generators with identical steps from the same state.
pub fn compare_generators(
    rho0: &DensityMatrix,
    h: &HermitianOperator,
    channels: &[ChannelSpec],
    config: &SimulationConfig,
) -> Result<ComparisonReport> {
    let system = AcspSystem::from_channels(h.clone(), channels)?;
    let ep = simulate(rho0, &Generator::EulerPoincare(system), config)?;
    let gk = simulate(rho0, &Generator::gksl(h.clone(), channels.to_vec())?, config)?;
    let max_deviation = ep
        .states
        .iter()
        .zip(&gk.states)
        .map(|(a, b)| (&**a - &**b).max_abs())
        .fold(0.0, f64::max);
    Ok(ComparisonReport {
        max_deviation,
        times_checked: ep.len(),
        n: h.dim(),
        m: channels.len(),
    })
}
