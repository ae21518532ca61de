//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "n": 2,
//!   "hamiltonian": {"preset": "omega_z", "omega": 1.0},
//!   "channels": [{"name": "dephasing", "gamma": 1.0}],
//!   "initial": {"bloch": [1.0, 0.0, 0.0]},
//!   "t_final": 1.0,
//!   "dt": 0.001,
//!   "record_every": 10,
//!   "contact": false,
//!   "seed": 7,
//!   "output_path": "out.csv"
//! }
//! ```
//!
//! Matrix literals are rows of `[re, im]` pairs. Hamiltonian: absent/`null`
//! (zero), `{"preset": "omega_z", "omega": w}` for `(w/2) λ_3`, or
//! `{"matrix": ...}`. Channels: `{"name": preset, "gamma": g}` or
//! `{"matrix": ..., "gamma": g, "label": s}`. Initial state: `{"bloch": r}`,
//! `{"matrix": ...}` or `{"state": s}` with `s` one of `plus_x`, `ground`
//! (the last basis level), `maximally_mixed`, `random` (drawn from `seed`).

use std::path::PathBuf;

use gksl_core::bloch::{from_bloch, BlochVector};
use gksl_core::channels::{ChannelSpec, Preset};
use gksl_core::dynamics::SimulationConfig;
use gksl_core::liealg::{random_density_seeded, standard_basis, ComplexMatrix, DensityMatrix, HermitianOperator};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: usize,
    #[serde(default)]
    hamiltonian: Value,
    #[serde(default)]
    channels: Vec<Value>,
    initial: Value,
    t_final: f64,
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default = "default_record_every")]
    record_every: usize,
    #[serde(default)]
    contact: bool,
    #[serde(default)]
    renormalize: bool,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output_path: Option<PathBuf>,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_record_every() -> usize {
    1
}

/// A validated experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n: usize,
    pub hamiltonian: HermitianOperator,
    pub channels: Vec<ChannelSpec>,
    pub initial: DensityMatrix,
    pub simulation: SimulationConfig,
    pub contact: bool,
    pub output_path: Option<PathBuf>,
}

/// A config error naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn err<T>(field: &str, msg: impl std::fmt::Display) -> Result<T, ConfigError> {
    Err(ConfigError(format!("{field}: {msg}")))
}

fn number(v: &Value, field: &str) -> Result<f64, ConfigError> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => err(field, "expected a finite number"),
    }
}

fn matrix_literal(v: &Value, n: usize, field: &str) -> Result<ComplexMatrix, ConfigError> {
    let rows = v.as_array().ok_or_else(|| ConfigError(format!("{field}: expected an array of rows")))?;
    if rows.len() != n {
        return err(field, format!("expected {n} rows, got {}", rows.len()));
    }
    let mut m = ComplexMatrix::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| ConfigError(format!("{field}[{i}]: expected an array of [re, im] pairs")))?;
        if entries.len() != n {
            return err(&format!("{field}[{i}]"), format!("expected {n} entries, got {}", entries.len()));
        }
        for (j, e) in entries.iter().enumerate() {
            let path = format!("{field}[{i}][{j}]");
            let pair = e.as_array().filter(|p| p.len() == 2);
            let Some(pair) = pair else {
                return err(&path, "expected [re, im]");
            };
            m[(i, j)] = Complex64::new(number(&pair[0], &path)?, number(&pair[1], &path)?);
        }
    }
    Ok(m)
}

fn hamiltonian(v: &Value, n: usize) -> Result<HermitianOperator, ConfigError> {
    const FIELD: &str = "hamiltonian";
    match v {
        Value::Null => Ok(HermitianOperator::zeros(n)),
        Value::Object(o) => {
            if let Some(m) = o.get("matrix") {
                if o.len() != 1 {
                    return err(FIELD, "a matrix Hamiltonian takes no other keys");
                }
                let m = matrix_literal(m, n, "hamiltonian.matrix")?;
                HermitianOperator::new(m).map_err(|e| ConfigError(format!("hamiltonian.matrix: {e}")))
            } else if let Some(p) = o.get("preset") {
                match p.as_str() {
                    Some("omega_z") => {
                        let omega = number(o.get("omega").unwrap_or(&Value::Null), "hamiltonian.omega")?;
                        if let Some(k) = o.keys().find(|k| *k != "preset" && *k != "omega") {
                            return err(FIELD, format!("unknown key '{k}'"));
                        }
                        let basis = standard_basis(n).map_err(|e| ConfigError(format!("n: {e}")))?;
                        Ok(HermitianOperator::from_hermitian_part(&basis.get(2).scale(0.5 * omega)))
                    }
                    _ => err("hamiltonian.preset", "expected \"omega_z\""),
                }
            } else {
                err(FIELD, "expected {\"matrix\": ...} or {\"preset\": \"omega_z\", \"omega\": w}")
            }
        }
        _ => err(FIELD, "expected an object or null"),
    }
}

fn channel(v: &Value, n: usize, k: usize) -> Result<Vec<ChannelSpec>, ConfigError> {
    let field = format!("channels[{k}]");
    let o = v.as_object().ok_or_else(|| ConfigError(format!("{field}: expected an object")))?;
    let gamma = number(o.get("gamma").unwrap_or(&Value::Null), &format!("{field}.gamma"))?;
    if gamma < 0.0 {
        return err(&format!("{field}.gamma"), format!("rate must be nonnegative, got {gamma}"));
    }
    if let Some(name) = o.get("name") {
        if let Some(extra) = o.keys().find(|k| *k != "name" && *k != "gamma") {
            return err(&field, format!("unknown key '{extra}'"));
        }
        let name = name.as_str().ok_or_else(|| ConfigError(format!("{field}.name: expected a string")))?;
        let preset: Preset = name.parse().map_err(|e| ConfigError(format!("{field}.name: {e}")))?;
        if preset.dim() != n {
            return err(&format!("{field}.name"), format!("preset '{name}' acts on n = {}, config has n = {n}", preset.dim()));
        }
        preset.channels(gamma).map_err(|e| ConfigError(format!("{field}: {e}")))
    } else if let Some(m) = o.get("matrix") {
        if let Some(extra) = o.keys().find(|k| !matches!(k.as_str(), "matrix" | "gamma" | "label")) {
            return err(&field, format!("unknown key '{extra}'"));
        }
        let l = matrix_literal(m, n, &format!("{field}.matrix"))?;
        let mut spec = ChannelSpec::new(l, gamma).map_err(|e| ConfigError(format!("{field}: {e}")))?;
        if let Some(label) = o.get("label") {
            let label = label.as_str().ok_or_else(|| ConfigError(format!("{field}.label: expected a string")))?;
            spec = spec.with_label(label);
        }
        Ok(vec![spec])
    } else {
        err(&field, "expected a \"name\" or a \"matrix\"")
    }
}

fn initial(v: &Value, n: usize, seed: u64) -> Result<DensityMatrix, ConfigError> {
    const FIELD: &str = "initial";
    let o = v.as_object().ok_or_else(|| ConfigError(format!("{FIELD}: expected an object")))?;
    if o.len() != 1 {
        return err(FIELD, "expected exactly one of \"bloch\", \"matrix\", \"state\"");
    }
    let wrap = |e: gksl_core::Error, f: &str| ConfigError(format!("{f}: {e}"));
    if let Some(b) = o.get("bloch") {
        let comps = b.as_array().ok_or_else(|| ConfigError("initial.bloch: expected an array".into()))?;
        let r = comps
            .iter()
            .enumerate()
            .map(|(i, x)| number(x, &format!("initial.bloch[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let r = BlochVector::new(n, r).map_err(|e| wrap(e, "initial.bloch"))?;
        let basis = standard_basis(n).map_err(|e| wrap(e, "n"))?;
        from_bloch(&r, &basis).map_err(|e| wrap(e, "initial.bloch"))
    } else if let Some(m) = o.get("matrix") {
        let m = matrix_literal(m, n, "initial.matrix")?;
        DensityMatrix::new(m).map_err(|e| wrap(e, "initial.matrix"))
    } else if let Some(s) = o.get("state") {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut psi = vec![zero; n];
        match s.as_str() {
            Some("plus_x") => {
                psi[0] = one;
                psi[1] = one;
            }
            Some("ground") => psi[n - 1] = one,
            Some("maximally_mixed") => return Ok(DensityMatrix::maximally_mixed(n)),
            Some("random") => return random_density_seeded(n, seed).map_err(|e| wrap(e, "initial.state")),
            _ => return err("initial.state", "expected plus_x, ground, maximally_mixed or random"),
        }
        DensityMatrix::pure(&psi).map_err(|e| wrap(e, "initial.state"))
    } else {
        err(FIELD, "expected exactly one of \"bloch\", \"matrix\", \"state\"")
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError(format!("config: {e}")))?;
        if raw.n < 2 {
            return err("n", format!("must be at least 2, got {}", raw.n));
        }
        let n = raw.n;
        let hamiltonian = hamiltonian(&raw.hamiltonian, n)?;
        let mut channels = Vec::new();
        for (k, v) in raw.channels.iter().enumerate() {
            channels.extend(channel(v, n, k)?);
        }
        let initial = initial(&raw.initial, n, raw.seed)?;
        let mut simulation = SimulationConfig::new(raw.t_final, raw.dt, raw.record_every).map_err(|e| {
            ConfigError(format!("t_final/dt/record_every: {e}"))
        })?;
        simulation.renormalize = raw.renormalize;
        if raw.contact && channels.iter().any(|c| !c.is_hermitian()) {
            return err("contact", "the contact ledger needs Hermitian channels");
        }
        Ok(Self {
            n,
            hamiltonian,
            channels,
            initial,
            simulation,
            contact: raw.contact,
            output_path: raw.output_path,
        })
    }
}
