use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn gksl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gksl")).args(args).output().expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let data = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, data)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn simulate_dephasing_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "d.json",
        r#"{"n": 2, "channels": [{"name": "dephasing", "gamma": 1}], "initial": {"bloch": [1, 0, 0]},
            "t_final": 1, "dt": 0.001, "record_every": 100}"#,
    );
    let out = gksl(&["simulate", "--config", arg(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let (header, data) = rows(&stdout(&out));
    assert_eq!(header, ["t", "r_1", "r_2", "r_3", "purity", "trace_err", "min_eig"]);
    assert_eq!(data.len(), 11);
    let last = data.last().unwrap();
    assert!((last[0] - 1.0).abs() < 1e-12);
    assert!((last[1] - (-2.0f64).exp()).abs() < 1e-8, "{}", last[1]);
}

#[test]
fn no_channels_no_hamiltonian_is_static() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "s.json", r#"{"n": 3, "initial": {"state": "random"}, "seed": 9, "t_final": 0.5, "dt": 0.01}"#);
    let out = gksl(&["simulate", "--config", arg(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let (header, data) = rows(&stdout(&out));
    assert_eq!(header.len(), 1 + 8 + 3);
    for row in &data {
        for c in 1..9 {
            assert!((row[c] - data[0][c]).abs() < 1e-15);
        }
    }
}

#[test]
fn amplitude_damping_relaxes_to_ground() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.json",
        r#"{"n": 2, "channels": [{"name": "amplitude_damping", "gamma": 2}], "initial": {"state": "plus_x"},
            "t_final": 10, "dt": 0.005, "record_every": 200}"#,
    );
    let out = gksl(&["simulate", "--config", arg(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let (_, data) = rows(&stdout(&out));
    let last = data.last().unwrap();
    assert!((last[3] + 1.0).abs() < 1e-6, "r_z = {}", last[3]);
    assert!((last[4] - 1.0).abs() < 1e-6, "purity = {}", last[4]);
}

#[test]
fn contact_column_tracks_half_purity() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.json",
        r#"{"n": 2, "hamiltonian": {"preset": "omega_z", "omega": 1.5}, "channels": [{"name": "depolarizing", "gamma": 0.4}],
            "initial": {"bloch": [0.6, 0.3, 0.2]}, "t_final": 2, "dt": 0.001, "record_every": 50, "contact": true}"#,
    );
    let out = gksl(&["simulate", "--config", arg(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let (header, data) = rows(&stdout(&out));
    assert_eq!(header.last().unwrap(), "z");
    let (first, last) = (&data[0], data.last().unwrap());
    let dz = last[7] - first[7];
    let dp = last[4] - first[4];
    assert!(dz < 0.0);
    assert!((dz - 0.5 * dp).abs() < 1e-8, "{dz} vs {}", 0.5 * dp);
}

#[test]
fn output_file_and_determinism() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "r.json",
        r#"{"n": 3, "channels": [{"name": "qutrit_ladder_l1", "gamma": 0.7}], "initial": {"state": "random"}, "seed": 42,
            "t_final": 1, "dt": 0.001, "record_every": 25}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(gksl(&["simulate", "--config", arg(&cfg), "--output", arg(&a)]).status.code(), Some(0));
    assert_eq!(gksl(&["simulate", "--config", arg(&cfg), "--output", arg(&b)]).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let v = ["verify", "--suite", "equivariance", "--seed", "5", "--trials", "500"];
    assert_eq!(gksl(&v).stdout, gksl(&v).stdout);
}

#[test]
fn output_path_from_config() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from_config.csv");
    let text = format!(
        r#"{{"n": 2, "initial": {{"state": "ground"}}, "t_final": 0.1, "output_path": {}}}"#,
        serde_json::to_string(arg(&target)).unwrap()
    );
    let cfg = write_config(&dir, "o.json", &text);
    let out = gksl(&["simulate", "--config", arg(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&target).unwrap().starts_with("t,r_1"));
}

#[test]
fn runtime_abort_leaves_no_output() {
    let dir = TempDir::new().unwrap();
    // Step far outside the RK4 stability region.
    let cfg = write_config(
        &dir,
        "x.json",
        r#"{"n": 2, "channels": [{"name": "amplitude_damping", "gamma": 1000}], "initial": {"state": "plus_x"},
            "t_final": 1, "dt": 0.01}"#,
    );
    let target = dir.path().join("never.csv");
    let out = gksl(&["simulate", "--config", arg(&cfg), "--output", arg(&target)]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("t = "), "{err}");
    assert!(!target.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (r#"{"n": 2, "initial": {"bloch": [0, 0, 1.5]}, "t_final": 1}"#, "initial.bloch"),
        (r#"{"n": 2, "channels": [{"name": "dephasing", "gamma": -2}], "initial": {"state": "plus_x"}, "t_final": 1}"#, "channels[0].gamma"),
        (r#"{"n": 2, "initial": {"state": "plus_x"}, "t_final": 1, "dt": -1}"#, "dt"),
        ("not json", "config"),
    ];
    for (k, (text, needle)) in cases.iter().enumerate() {
        let cfg = write_config(&dir, &format!("bad{k}.json"), text);
        let out = gksl(&["simulate", "--config", arg(&cfg)]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{needle} not in {err}");
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(gksl(&["simulate", "--config", arg(&missing)]).status.code(), Some(2));
}

#[test]
fn compare_reports_and_thresholds() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "cmp.json",
        r#"{"n": 2, "hamiltonian": {"matrix": [[[0.3,0],[0.2,-0.1]],[[0.2,0.1],[-0.4,0]]]},
            "channels": [{"matrix": [[[0.5,0],[0.1,0.3]],[[0.1,-0.3],[-0.2,0]]], "gamma": 0.8}, {"name": "dephasing", "gamma": 0.3}],
            "initial": {"bloch": [0.2, 0.5, -0.3]}, "t_final": 1, "dt": 0.001, "record_every": 10}"#,
    );
    let ok = gksl(&["compare", "--config", arg(&cfg)]);
    assert_eq!(ok.status.code(), Some(0));
    let report = json(&ok);
    assert_eq!(report["n"], 2);
    assert_eq!(report["m"], 2);
    assert_eq!(report["times_checked"], 101);
    let dev = report["max_deviation"].as_f64().unwrap();
    assert!(dev <= 1e-10 && dev > 0.0, "{dev}");

    let strict = gksl(&["compare", "--config", arg(&cfg), "--threshold", "0"]);
    assert_eq!(strict.status.code(), Some(1));
    assert_eq!(json(&strict)["pass"], false);

    let nonherm = write_config(
        &dir,
        "nh.json",
        r#"{"n": 2, "channels": [{"name": "amplitude_damping", "gamma": 1}], "initial": {"state": "plus_x"}, "t_final": 1}"#,
    );
    assert_eq!(gksl(&["compare", "--config", arg(&nonherm)]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    for suite in ["brackets", "bounds", "rates"] {
        let out = gksl(&["verify", "--suite", suite, "--n", "3", "--trials", "300", "--seed", "1"]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", stdout(&out));
        let report = json(&out);
        assert_eq!(report["suite"], suite);
        let props = report["properties"].as_array().unwrap();
        assert!(!props.is_empty());
        for p in props {
            assert_eq!(p["pass"], true, "{p}");
            assert!(p["value"].as_f64().unwrap() <= p["threshold"].as_f64().unwrap());
        }
    }
}

#[test]
fn verify_all_covers_every_suite() {
    let out = gksl(&["verify", "--suite", "all", "--trials", "2000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report = json(&out);
    let suites: std::collections::BTreeSet<String> = report["properties"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["suite"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(suites.into_iter().collect::<Vec<_>>(), ["bounds", "brackets", "equivariance", "rates"]);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(gksl(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(gksl(&["verify", "--n", "1"]).status.code(), Some(2));
    assert_eq!(gksl(&["verify", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(gksl(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gksl(&["simulate"]).status.code(), Some(2));
}

#[test]
fn channels_lists_presets() {
    let out = gksl(&["channels"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in [
        "dephasing",
        "depolarizing",
        "amplitude_damping",
        "qutrit_dephasing_l3",
        "qutrit_dephasing_l8",
        "qutrit_ladder_l1",
    ] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name} (n = "))), "{name}");
    }
    assert!(text.contains("sigma_minus at rate 1 x gamma"));
}
