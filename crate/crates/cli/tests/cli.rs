use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn delam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delam")).args(args).output().unwrap()
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn run_writes_a_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("pullpush.json");
    let out = delam(&[
        "run",
        cfg.to_str().unwrap(),
        "--n",
        "18",
        "--tau",
        "0.02",
        "--model",
        "aprim",
        "--units",
        "mm-mpa",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("MANIFEST.json")).unwrap()).unwrap();
    assert_eq!(manifest["model"], "aprim");
    assert_eq!(manifest["units"], "mm-mpa");
    assert_eq!(manifest["status"], "completed");
    assert_eq!(manifest["config_sha256"].as_str().map(str::len), Some(64));
    assert!(dir.path().join("amdp.csv").exists());
}

#[test]
fn fit_with_plastic_model_is_rejected() {
    let cfg = config("pullpush.json");
    let out = delam(&["run", cfg.to_str().unwrap(), "--model", "aprim", "--fit-scenario", "2", "--out", "/nonexistent"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reports_warnings() {
    let out = delam(&["validate", config("mmf.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("60 interface segments"));
    assert!(text.contains("warning: relaxation time is zero"));
}

#[test]
fn validate_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(config("pullpush.json")).unwrap()).unwrap();
    cfg["bulk"]["poisson_ratio"] = 0.5.into();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    let out = delam(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Poisson"));
}

#[test]
fn gc_curve_table() {
    let out = delam(&["gc-curve", "--points", "5", "--yield-factor", "0.6,0.79", "--kappa-h-ratio", "0.11"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["kappa_h_ratio", "yield_factor", "psi_G_deg", "alpha_over_aI", "aii_over_ai"]
    );
    let rows: Vec<Vec<f64>> = rdr.records().map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 10);
    for set in rows.chunks(5) {
        assert_eq!(set[0][3], 1.0);
        assert!((set[4][3] - set[4][4]).abs() < 1e-9 * set[4][4]);
        assert!(set.windows(2).all(|w| w[1][3] >= w[0][3]));
    }
    let sy = 0.79 * delam::laws::sigma_t_crit(75e9, 187.5);
    let expect = delam::laws::sensitivity_ratio(187.5, 75e9, 0.11 * 75e9, sy);
    assert!((rows[9][4] - expect).abs() < 1e-12 * expect);
}

#[test]
fn gc_curve_rejects_yield_outside_window() {
    let out = delam(&["gc-curve", "--yield-factor", "0.4"]);
    assert_eq!(out.status.code(), Some(2));
}
