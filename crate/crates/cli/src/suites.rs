//! Property suites behind `gksl verify`.

use std::fmt;
use std::str::FromStr;

use gksl_core::bloch::to_bloch;
use gksl_core::brackets::{
    acsp_metric, contraction_rate, lie_poisson, lie_poisson_induced_field, metric_induced_field, FunctionalGradient,
};
use gksl_core::channels::ChannelSpec;
use gksl_core::dynamics::{simulate, Generator, SimulationConfig};
use gksl_core::liealg::{coefficients, random_density, random_hermitian, standard_basis, HermitianOperator, SeededRng};
use gksl_core::verify::{
    ad_squared_spectrum, curvature_bound_check, equivariant_fit, factorization_residual, fit_decay_rate, twirl,
    uniqueness_check, BilinearMapTensor,
};
use gksl_core::Result;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Brackets,
    Equivariance,
    Bounds,
    Rates,
    All,
}

impl Suite {
    const NAMES: [(&'static str, Suite); 5] = [
        ("brackets", Suite::Brackets),
        ("equivariance", Suite::Equivariance),
        ("bounds", Suite::Bounds),
        ("rates", Suite::Rates),
        ("all", Suite::All),
    ];
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::NAMES.iter().find(|(n, _)| *n == s).map(|(_, v)| *v).ok_or_else(|| {
            let names: Vec<_> = Suite::NAMES.iter().map(|(n, _)| *n).collect();
            format!("unknown suite '{s}', expected one of {}", names.join(", "))
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = Suite::NAMES.iter().find(|(_, v)| v == self).map(|(n, _)| *n).unwrap_or("?");
        f.write_str(name)
    }
}

/// One checked property: `pass` iff `value <= threshold`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Property {
    pub suite: String,
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
}

fn property(suite: Suite, name: &str, value: f64, threshold: f64) -> Property {
    Property {
        suite: suite.to_string(),
        name: name.to_string(),
        pass: value <= threshold,
        value,
        threshold,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteParams {
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
}

pub fn run(suite: Suite, p: SuiteParams) -> Result<Vec<Property>> {
    match suite {
        Suite::Brackets => brackets(p),
        Suite::Equivariance => equivariance(p),
        Suite::Bounds => bounds(p),
        Suite::Rates => rates(p),
        Suite::All => {
            let mut out = Vec::new();
            for s in [Suite::Brackets, Suite::Equivariance, Suite::Bounds, Suite::Rates] {
                out.extend(run(s, p)?);
            }
            Ok(out)
        }
    }
}

fn brackets(p: SuiteParams) -> Result<Vec<Property>> {
    let basis = standard_basis(p.n)?;
    let mut rng = SeededRng::new(p.seed);
    let (mut sym, mut max_ff, mut anti, mut field, mut contraction) = (0.0f64, f64::NEG_INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..p.trials {
        let l = random_hermitian(p.n, &mut rng);
        let h = random_hermitian(p.n, &mut rng);
        let gamma = rng.uniform(0.1, 2.0);
        let rho = random_density(p.n, &mut rng);
        let x = FunctionalGradient::new(random_hermitian(p.n, &mut rng));
        let y = FunctionalGradient::new(random_hermitian(p.n, &mut rng));

        sym = sym.max((acsp_metric(&x, &y, &l, gamma)? - acsp_metric(&y, &x, &l, gamma)?).abs());
        max_ff = max_ff.max(acsp_metric(&x, &x, &l, gamma)?);
        anti = anti.max((lie_poisson(&x, &y, &rho)? + lie_poisson(&y, &x, &rho)?).abs());

        let mut induced = lie_poisson_induced_field(&rho, &h, &basis)?;
        induced += &metric_induced_field(&rho, &l, gamma, &basis)?;
        let mut reference = h.comm(&rho).mul_neg_i();
        reference.axpy(-0.5 * gamma, &l.comm(&l.comm(&rho)));
        field = field.max((&induced - &reference).max_abs());

        let (lhs, rhs) = contraction_rate(&rho, &l, gamma)?;
        contraction = contraction.max((lhs - rhs).abs());
    }
    let s = Suite::Brackets;
    Ok(vec![
        property(s, "metric_symmetry", sym, 1e-12),
        property(s, "metric_nonpositive", max_ff, 0.0),
        property(s, "poisson_antisymmetry", anti, 1e-12),
        property(s, "induced_field_equals_generator", field, 1e-12),
        property(s, "transverse_contraction_identity", contraction, 1e-12),
    ])
}

fn equivariance(p: SuiteParams) -> Result<Vec<Property>> {
    let basis = standard_basis(p.n)?;
    let mut rng = SeededRng::new(p.seed);
    let xi = BilinearMapTensor::random(p.n, &mut rng)?;
    let tw = twirl(&xi, p.trials, p.seed.wrapping_add(1))?;
    let fit_residual = equivariant_fit(&tw)?.residual / xi.norm();

    let phi = nalgebra::DMatrix::from_fn(basis.len(), basis.len(), |_, _| rng.normal());
    let torsion = BilinearMapTensor::torsion_generated(&basis, &phi)?;
    let l = random_hermitian(p.n, &mut rng);
    let ell = coefficients(&l, &basis)?;
    let factorization = factorization_residual(&torsion.slice(&ell), &l, &basis)?.residual;

    let report = uniqueness_check(p.n, basis.get(2), 50, p.seed.wrapping_add(2))?;
    let family = if report.single_scalar_family { 0.0 } else { 1.0 };
    let s = Suite::Equivariance;
    Ok(vec![
        property(s, "twirl_fit_relative_residual", fit_residual, 1e-2),
        property(s, "torsion_factorization_residual", factorization, 1e-6),
        property(s, "commutant_block_residual", report.max_block_residual, 1e-10),
        property(s, "single_scalar_family", family, 0.0),
    ])
}

fn bounds(p: SuiteParams) -> Result<Vec<Property>> {
    let report = curvature_bound_check(p.n, p.trials, p.seed)?;
    Ok(vec![property(Suite::Bounds, "curvature_ratio", report.max_ratio, 1.0)])
}

/// Fits per-coordinate decay rates under `L = λ_3` dephasing and compares the
/// sorted rates with `γ/2` times the spectrum of `ad_L²`.
fn rates(p: SuiteParams) -> Result<Vec<Property>> {
    let gamma = 1.0;
    let basis = standard_basis(p.n)?;
    let l = basis.get(2);
    let spectrum = ad_squared_spectrum(l, &basis)?;
    let min_eig = spectrum.iter().copied().fold(f64::INFINITY, f64::min);

    let channels = vec![ChannelSpec::new((**l).clone(), gamma)?];
    let generator = Generator::gksl(HermitianOperator::zeros(p.n), channels)?;
    let rho0 = random_density(p.n, &mut SeededRng::new(p.seed));
    let config = SimulationConfig::new(2.0, 1e-3, 10)?;
    let traj = simulate(&rho0, &generator, &config)?;
    let coords = traj
        .states
        .iter()
        .map(|s| to_bloch(s, &basis).map(|r| r.components().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let mut fitted = (0..basis.len())
        .map(|a| {
            let series: Vec<f64> = coords.iter().map(|r| r[a]).collect();
            fit_decay_rate(&traj.times, &series)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut expected: Vec<f64> = spectrum.iter().map(|s| 0.5 * gamma * s).collect();
    fitted.sort_by(f64::total_cmp);
    expected.sort_by(f64::total_cmp);
    let worst = fitted
        .iter()
        .zip(&expected)
        .map(|(k, e)| if *e == 0.0 { k.abs() } else { (k - e).abs() / e })
        .fold(0.0, f64::max);
    let s = Suite::Rates;
    Ok(vec![
        property(s, "ad_squared_nonnegative", (-min_eig).max(0.0), 1e-12),
        property(s, "fitted_rates_match_spectrum", worst, 1e-4),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for (name, s) in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap(), s);
            assert_eq!(s.to_string(), name);
        }
        assert!("nope".parse::<Suite>().unwrap_err().contains("brackets"));
    }

    #[test]
    fn small_suites_pass() {
        let p = SuiteParams { n: 2, seed: 3, trials: 200 };
        for s in [Suite::Brackets, Suite::Bounds, Suite::Rates] {
            for prop in run(s, p).unwrap() {
                assert!(prop.pass, "{prop:?}");
            }
        }
    }

    #[test]
    fn qutrit_rates_pass() {
        let props = run(Suite::Rates, SuiteParams { n: 3, seed: 4, trials: 1 }).unwrap();
        assert!(props.iter().all(|p| p.pass), "{props:?}");
    }
}
