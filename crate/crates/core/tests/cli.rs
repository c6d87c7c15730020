use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_forchheimer");

fn invoke(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.toml");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const CONSTANT_CASE: &str = r#"
[nondimensional]
gravity = 1.0
gravity_enabled = false

[grid]
n = [6, 6, 6]

[data]
initial = { preset = "constant", level = 2.0 }
boundary = { preset = "constant", level = 2.0 }

[time]
t_final = 0.002
snapshot_every = 5
"#;

#[test]
fn verify_kernel_with_defaults_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = invoke(&["verify-kernel", "--samples", "500", "--quiet", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("kernel_report.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["violations"].as_array().unwrap().len(), 0);
    assert_eq!(report["seed"], 0);
}

#[test]
fn simulate_constant_case_is_a_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONSTANT_CASE);
    let out = dir.path().join("out");
    let o = invoke(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--quiet"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["kernel_failures"], 0);
    let snaps = manifest["snapshots"].as_array().unwrap();
    let last = snaps.last().unwrap()["file"].as_str().unwrap();
    let text = std::fs::read_to_string(out.join(last)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,i,j,k,x,y,z,u"));
    let mut rows = 0;
    for line in lines {
        let u: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((u - 2.0).abs() <= 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 216);
}

#[test]
fn config_errors_produce_an_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[nondimensional]\n[law]\ncoefficients = [1.0, 1.0, 1.0]\nexponents = [2.0, 1.0]\n");
    let out = dir.path().join("out");
    let o = invoke(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let record: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("error.json")).unwrap()).unwrap();
    assert_eq!(record["kind"], "config");
    assert!(record["message"].as_str().unwrap().contains("law"));
    let missing = invoke(&["audit", "--out", out.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn unknown_estimate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONSTANT_CASE);
    let out = dir.path().join("out");
    let o = invoke(&["audit", "--config", &cfg, "--out", out.to_str().unwrap(), "--estimates", "gradu6a,bogus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn audit_of_constant_case_reports_zero_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONSTANT_CASE);
    let out = dir.path().join("out");
    let o = invoke(&["audit", "--config", &cfg, "--out", out.to_str().unwrap(), "--estimates", "gradu6b,gradu6a", "--quiet"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("audit_report.json")).unwrap()).unwrap();
    let est = doc["estimates"].as_array().unwrap();
    assert_eq!(est[0]["estimate_id"], "gradu6b");
    assert!(est.iter().all(|e| e["ratio"] == 0.0));
    assert_eq!(doc["max_principle"]["violation"], 0.0);
    assert!(doc["ordering_failures"].as_array().unwrap().is_empty());
}

#[test]
fn shipped_example_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["reference_sweep.toml", "rotating_audit.toml"] {
        forchheimer::cli::RunConfig::load(&dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
