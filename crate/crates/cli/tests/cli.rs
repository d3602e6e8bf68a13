use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fourbody"))
        .args(args)
        .env_remove("FOURBODY_CONFIG")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON record");
    v["error"]["kind"].as_str().unwrap().to_string()
}

/// CSV body without the `#` preamble.
fn csv_rows(out: &Output) -> Vec<String> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[test]
fn criterion_hydrogen_antihydrogen() {
    let path = data("hydrogen_antihydrogen.json");
    let out = run(&["criterion", "--system", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["verdict"], "proven_unstable");
    let ratio = v["result"]["ratio"].as_f64().unwrap();
    assert!((ratio - 4.0 / 1837.152672).abs() < 1e-12);
    assert!((ratio - 0.00217729).abs() < 1e-8);
    assert_eq!(v["input"]["masses"][0], "1836.152672");
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn criterion_equal_masses_indeterminate() {
    let path = data("positronium_molecule.json");
    let out = run(&["criterion", "--system", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["result"]["verdict"], "indeterminate");
    assert_eq!(v["result"]["ratio"], 2.0);
}

#[test]
fn criterion_input_errors() {
    let path = data("three_masses.json");
    let out = run(&["criterion", "--system", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_kind(&out), "input");
    assert!(out.stdout.is_empty());

    let out = run(&["criterion", "--system", "/nonexistent/system.json"]);
    assert_eq!(code(&out), 2);

    let hh = data("hydrogen_antihydrogen.json");
    let out = run(&["criterion", "--system", hh.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn chain_exit_codes() {
    let out = run(&["chain", "--mu-r", "0.1", "--samples", "10000"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["all_passed"], true);
    assert_eq!(v["result"]["proves_instability"], true);

    let out = run(&["chain", "--mu-r", "0.374999", "--samples", "10000", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&out);
    assert!(rows[1..].iter().all(|r| r.ends_with(",true")));
    // C(mu_R) - 1 is huge this close to 3/8
    let coefficient: f64 = rows[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!(coefficient > 1e5);

    let out = run(&["chain", "--mu-r", "0.4"]);
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_kind(&out), "domain");
}

#[test]
fn chain_from_system_file() {
    let path = data("hydrogen_antihydrogen.json");
    let out = run(&["chain", "--system", path.to_str().unwrap(), "--samples", "1000"]);
    assert_eq!(code(&out), 0);
    let mu_r = json(&out)["input"]["mu_r"].as_f64().unwrap();
    assert!((mu_r - 2.0 * 4.0 / 1837.152672).abs() < 1e-12);
}

#[test]
fn veff_zero_samples_is_header_only() {
    let path = data("muonic_molecule.json");
    let out = run(&["veff", "--system", path.to_str().unwrap(), "--samples", "0"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("y_x,y_y,y_z"));
}

#[test]
fn veff_rows_respect_envelopes() {
    let path = data("muonic_molecule.json");
    let out = run(&["veff", "--system", path.to_str().unwrap(), "--samples", "8"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 9);
    for row in &rows[1..] {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cells[9] >= -1e-6 && cells[13] >= -1e-6, "{row}");
    }
}

#[test]
fn twocenter_scan() {
    let out = run(&["twocenter", "--coupling", "1", "--mu-r", "1"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 7);
    let energies: Vec<f64> = rows[1..].iter().map(|r| r.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!((energies[0] + 2.0).abs() < 1e-4 * 2.0);
    assert!(energies.windows(2).all(|w| w[1] >= w[0] - 1e-4));

    let out = run(&["twocenter", "--format", "json", "--separations", "0,2"]);
    let v = json(&out);
    assert_eq!(v["result"]["floor"], -2.0);
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn map_symmetric_family() {
    let out = run(&["map", "--family", "symmetric", "--grid", "1,2,5,10,100,1836.152672"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 7);
    let ratios: Vec<f64> = rows[1..].iter().map(|r| r.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    assert!(rows[6].contains("proven_unstable"));

    let out = run(&["map", "--family", "two-parameter", "--grid", "1:1,-1:2"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&out);
    assert!(!rows[2].ends_with(','), "per-point error recorded: {}", rows[2]);

    let out = run(&["map", "--family", "two-parameter", "--grid", "1,2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn solve_certifies_positronium_molecule() {
    let path = data("positronium_molecule.json");
    let out = run(&["solve", "--system", path.to_str().unwrap(), "--seed", "42", "--budget", "200"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["certified_bound"], true);
    assert!(v["result"]["e0"].as_f64().unwrap() < -0.51);
    assert_eq!(v["config"]["budget"], 200);
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let system = data("muonic_molecule.json");
    let system = system.to_str().unwrap();
    for args in [
        vec!["solve", "--system", system, "--budget", "20", "--pool", "10"],
        vec!["veff", "--system", system, "--samples", "3"],
        vec!["map", "--family", "symmetric", "--grid", "1,3,300"],
    ] {
        let files: Vec<Vec<u8>> = ["a", "b"]
            .iter()
            .map(|name| {
                let path = dir.path().join(name);
                let mut full = args.clone();
                full.extend(["--out", path.to_str().unwrap()]);
                let out = run(&full);
                assert_eq!(code(&out), 0, "{args:?}");
                assert!(out.stdout.is_empty());
                let bytes = std::fs::read(&path).unwrap();
                // the out path is part of the embedded config
                String::from_utf8(bytes).unwrap().replace(path.to_str().unwrap(), "OUT").into_bytes()
            })
            .collect();
        assert_eq!(files[0], files[1], "{args:?}");
    }
}

#[test]
fn config_file_layering() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, r#"{"seed": 7, "budget": 30, "tol": 1e-5}"#).unwrap();
    let system = data("positronium_molecule.json");
    let out = Command::new(env!("CARGO_BIN_EXE_fourbody"))
        .args(["criterion", "--system", system.to_str().unwrap(), "--seed", "9"])
        .env("FOURBODY_CONFIG", &cfg)
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["config"]["budget"], 30);
    assert_eq!(v["config"]["tol"], 1e-5);

    std::fs::write(&cfg, r#"{"sead": 7}"#).unwrap();
    let out = run(&["criterion", "--system", system.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}
