use std::path::Path;
use std::process::{Command, Output};

use plasmon_focus::config::RunConfig;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plasmon-focus")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn empty_wavelength_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "label = \"bad\"\n\n[sweep]\nstart_nm = 700.0\nend_nm = 400.0\n").unwrap();
    let out = run(&["--config", path(&cfg), "spectrum"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("sweep"), "{err}");
}

#[test]
fn syntax_errors_point_at_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[beam]\nwavelength_nm = 589.0\nna_focus = = 1.4\n").unwrap();
    let out = run(&["--config", path(&cfg), "focus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn print_defaults_round_trips() {
    let out = run(&["--print-defaults"]);
    assert!(out.status.success());
    let cfg = RunConfig::from_toml_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg, RunConfig::default());
    let out = run(&["--preset", "fig4", "--print-defaults"]);
    let cfg = RunConfig::from_toml_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg, RunConfig::preset("fig4").unwrap());
}

#[test]
fn spectrum_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--preset", "fig2b", "--out", path(dir.path()), "spectrum"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("wavelength_nm,ext_long,sca_long,abs_long,ext_short,sca_short,abs_short\n"));
    assert_eq!(csv.lines().count(), 802);
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "spectrum");
    assert_eq!(m["tool_version"], plasmon_focus::TOOL_VERSION);
    assert_eq!(m["dataset"], plasmon_focus::materials::SILVER_JC_LABEL);
    assert_eq!(m["config"]["label"], "fig2b");
}

#[test]
fn g2_run_writes_histogram_with_theory() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::preset("g2").unwrap();
    cfg.photon.stream_duration_ns = 1.0e6;
    let file = dir.path().join("g2.toml");
    std::fs::write(&file, cfg.to_toml()).unwrap();
    let out = run(&["--config", path(&file), "--seed", "3", "--out", path(dir.path()), "g2"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("g2.csv")).unwrap();
    assert!(csv.starts_with("tau_ns,g2,sigma,theory\n"));
    assert_eq!(csv.lines().count(), 62);
    let poisson = std::fs::read_to_string(dir.path().join("g2_poisson.csv")).unwrap();
    assert!(poisson.starts_with("tau_ns,g2,sigma\n"));
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 3);
}

#[test]
fn verify_emits_passing_json_lines() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 10);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true, "{line}");
    }
}

#[test]
fn zero_threads_is_rejected() {
    let out = run(&["--threads", "0", "spectrum"]);
    assert_eq!(out.status.code(), Some(2));
}
