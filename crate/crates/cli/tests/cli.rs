use std::fs;
use std::process::Command;

use magel_cli::experiments::{ALMOST_MIN_HEADERS, GAMMA_HEADERS};
use magel_cli::{exit_code, load_config, Experiment, RawConfig};

fn magel() -> Command {
    Command::new(env!("CARGO_BIN_EXE_magel"))
}

fn first_line(path: &std::path::Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn gamma_study_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"n": 8, "eps": [0.2, 0.1]}"#).unwrap();
    let out = dir.path().join("run");
    let status = magel()
        .args(["gamma-study", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--snapshots"])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(first_line(&out.join("results.csv")), GAMMA_HEADERS.join(","));
    assert_eq!(fs::read_to_string(out.join("results.csv")).unwrap().lines().count(), 3);
    assert!(out.join("recovery_00.vtk").exists());

    // rerunning from the manifest reproduces the table byte for byte
    let again = dir.path().join("again");
    let status = magel()
        .args(["run", "--config", out.join("manifest.json").to_str().unwrap(), "--out", again.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(fs::read(out.join("results.csv")).unwrap(), fs::read(again.join("results.csv")).unwrap());
}

#[test]
fn invalid_configurations_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"beta": 1.2}"#,
        r#"{"eps": [0.1, 0.2]}"#,
        r#"{"law": {"p": 4, "q": 1, "c_w": 1, "a": 0.3, "b": -0.1}}"#,
        r#"{"boundary": {"faces": ["w+"], "datum": {"a": [[0,0,0],[0,0,0],[0,0,0]], "c": [0,0,0]}}}"#,
        r#"not json"#,
    ];
    for (k, text) in cases.iter().enumerate() {
        let cfg = dir.path().join(format!("bad{k}.json"));
        fs::write(&cfg, text).unwrap();
        let out = magel()
            .args(["gamma-study", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "{text}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    let out = magel().args(["run"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn geodesic_and_stray_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"level": 3, "n": 16}"#).unwrap();
    for (cmd, header) in [
        ("geodesic", "i,j,level,distance,great_circle"),
        ("stray-check", "n,padding,radius,interior_error,energy,exact_energy,energy_error,identity_residual"),
    ] {
        let out = dir.path().join(cmd);
        let status = magel().args([cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).status().unwrap();
        assert!(status.success());
        assert_eq!(first_line(&out.join("results.csv")), header);
    }
}

#[test]
fn config_resolution() {
    let raw: RawConfig = serde_json::from_str(r#"{"experiment": "almost-min-study", "seed": 3}"#).unwrap();
    let cfg = raw.resolve(None).unwrap();
    assert_eq!(cfg.experiment, Experiment::AlmostMinStudy);
    assert_eq!((cfg.n, cfg.seed), (16, 3));
    assert_eq!(cfg.eps, vec![0.1, 0.05]);
    assert_eq!(ALMOST_MIN_HEADERS[0], "eps");
    assert!(RawConfig::default().resolve(None).is_err());
    // the CLI kind wins over the file
    let raw: RawConfig = serde_json::from_str(r#"{"experiment": "geodesic"}"#).unwrap();
    assert_eq!(raw.resolve(Some(Experiment::StrayCheck)).unwrap().n, 64);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    fs::write(&path, r#"{"library": "magel", "version": "0", "config": {"experiment": "geodesic", "level": 4}}"#).unwrap();
    let raw = load_config(&path).unwrap();
    assert_eq!(raw.level, Some(4));
    assert_eq!(exit_code(&load_config(&dir.path().join("missing.json")).unwrap_err()), 2);
    assert_eq!(exit_code(&magel::Error::Convergence { iterations: 1, residual: 1.0 }), 3);
}
