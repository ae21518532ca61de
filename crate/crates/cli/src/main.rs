//! `gksl`: simulate, compare and verify open quantum dynamics.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 usage or
//! configuration error, 3 runtime abort during integration.

mod config;
mod output;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gksl_core::acsp::AcspSystem;
use gksl_core::channels::Preset;
use gksl_core::dynamics::{compare_generators, simulate, simulate_contact, Generator};
use serde::Serialize;

use config::ExperimentConfig;
use suites::{Suite, SuiteParams};

#[derive(Parser)]
#[command(name = "gksl", version, about = "Open quantum system dynamics in Lie-algebra coordinates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write a CSV trajectory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_path` from the config; stdout if neither is set.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Integrate the GKSL and Euler-Poincare generators side by side.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        threshold: f64,
    },
    /// Run a property suite and print a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// List channel presets.
    Channels,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<gksl_core::Error> for Failure {
    fn from(e: gksl_core::Error) -> Self {
        let code = if e.abort_time().is_some() { 3 } else { 2 };
        Self { code, message: e.to_string() }
    }
}

impl From<config::ConfigError> for Failure {
    fn from(e: config::ConfigError) -> Self {
        Self::usage(e.0)
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok(ExperimentConfig::from_json(&text)?)
}

/// Writes to stdout; a closed pipe ends output quietly.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn print_json(value: &impl Serialize) {
    emit(&(serde_json::to_string_pretty(value).expect("report serializes") + "\n"));
}

fn run_simulate(config: &Path, output: Option<PathBuf>) -> Result<u8, Failure> {
    let cfg = load(config)?;
    let traj = if cfg.contact {
        let system = AcspSystem::from_channels(cfg.hamiltonian.clone(), &cfg.channels)?;
        simulate_contact(&cfg.initial, 0.0, &system, &cfg.simulation)?
    } else {
        let generator = Generator::gksl(cfg.hamiltonian.clone(), cfg.channels.clone())?;
        simulate(&cfg.initial, &generator, &cfg.simulation)?
    };
    let csv = output::trajectory_csv(&traj, cfg.n)?;
    match output.or(cfg.output_path) {
        Some(path) => {
            output::write_atomic(&path, csv.as_bytes()).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
        }
        None => emit(&csv),
    }
    Ok(0)
}

#[derive(Serialize)]
struct CompareReport {
    max_deviation: f64,
    times_checked: usize,
    n: usize,
    m: usize,
    threshold: f64,
    pass: bool,
}

fn run_compare(config: &Path, threshold: f64) -> Result<u8, Failure> {
    let cfg = load(config)?;
    let r = compare_generators(&cfg.initial, &cfg.hamiltonian, &cfg.channels, &cfg.simulation)?;
    let pass = r.max_deviation <= threshold;
    print_json(&CompareReport {
        max_deviation: r.max_deviation,
        times_checked: r.times_checked,
        n: r.n,
        m: r.m,
        threshold,
        pass,
    });
    Ok(if pass { 0 } else { 1 })
}

fn run_verify(suite: Suite, params: SuiteParams) -> Result<u8, Failure> {
    if params.n < 2 {
        return Err(Failure::usage(format!("--n must be at least 2, got {}", params.n)));
    }
    if params.trials == 0 {
        return Err(Failure::usage("--trials must be positive"));
    }
    let properties = suites::run(suite, params)?;
    let pass = properties.iter().all(|p| p.pass);
    print_json(&serde_json::json!({
        "suite": suite.to_string(),
        "n": params.n,
        "seed": params.seed,
        "trials": params.trials,
        "pass": pass,
        "properties": properties,
    }));
    Ok(if pass { 0 } else { 1 })
}

fn run_channels() -> Result<u8, Failure> {
    let mut text = String::new();
    for p in Preset::ALL {
        text += &format!("{} (n = {})\n  {}\n", p.name(), p.dim(), p.convention());
        for c in p.channels(1.0)? {
            text += &format!("  {} at rate {} x gamma:\n", c.label().unwrap_or("L"), c.gamma());
            text += &output::matrix_text(c.operator(), "    ");
        }
    }
    emit(&text);
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, output } => run_simulate(&config, output),
        Command::Compare { config, threshold } => run_compare(&config, threshold),
        Command::Verify { suite, n, seed, trials } => run_verify(suite, SuiteParams { n, seed, trials }),
        Command::Channels => run_channels(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("gksl: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
