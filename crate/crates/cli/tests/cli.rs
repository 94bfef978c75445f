use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn chronon(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chronon"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn preset(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(files(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

#[test]
fn limits_prints_planck_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = chronon(&["limits"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let t_p = v["t_P"]["value"].as_f64().unwrap();
    let ips = v["max_ips_per_register"]["value"].as_f64().unwrap();
    assert!((t_p / 5.39e-44 - 1.0).abs() < 0.01);
    assert!((ips / 1.86e43 - 1.0).abs() < 0.01);
    assert!(dir.path().join("limits.json").exists());
    assert!(dir.path().join("limits.csv").exists());
}

#[test]
fn timing_violation_is_reported_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_chronon"))
        .args(["experiment", "--out"])
        .arg(dir.path())
        .env("CHRONON_EXPERIMENT_T_Y", "1.2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("l/c < t_y < L/c"), "{err}");
}

#[test]
fn unknown_flag_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = chronon(&["limits", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn front_paradox_reports_the_known_defect() {
    let dir = tempfile::tempdir().unwrap();
    let o = chronon(&["paradox", "--model", "front"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let line = String::from_utf8_lossy(&o.stdout);
    let defect: f64 = line
        .trim()
        .strip_prefix("max_defect ")
        .unwrap()
        .parse()
        .unwrap();
    assert!((defect - 0.013699714026162213).abs() < 1e-6, "{defect}");
    assert!(dir.path().join("paradox.json").exists());
    assert!(dir.path().join("plots/manifest.json").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let config = preset("signaling.toml");
    for dir in [a.path(), b.path()] {
        for cmd in ["experiment", "signal", "vbound"] {
            let o = chronon(&[cmd, "--config", &config, "--seed", "7"], dir);
            assert!(
                o.status.success(),
                "{cmd}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
    }
    let left = files(a.path());
    assert!(left.len() >= 6);
    for f in left {
        let rel = f.strip_prefix(a.path()).unwrap();
        assert_eq!(
            std::fs::read(&f).unwrap(),
            std::fs::read(b.path().join(rel)).unwrap(),
            "{rel:?}"
        );
    }
}
