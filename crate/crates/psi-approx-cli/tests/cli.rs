//! End-to-end checks of the command line binary: output files, exit codes,
//! determinism, and internal consistency of the rows.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_psi-approx"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_rows(dir: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(dir.join("rows.csv")).expect("rows.csv exists");
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,p,method,error,main_term,A,remainder,err_estimate,runtime_ms"
    );
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn psi_show_prints_characteristics() {
    let out = run(&["psi-show", "--psi", "exp:alpha=0.693147,r=1", "--t", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    // eta = 8, T = 1, mu = 7 up to the printed precision
    assert!(text.contains("8.00000"), "missing eta in: {text}");
    assert!(text.contains("1.00000"), "missing period in: {text}");
    assert!(text.contains("7.00000"), "missing modulus in: {text}");
}

#[test]
fn error_writes_consistent_row_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "error", "--psi", "power:r=2", "--beta", "0", "--n", "32", "--p", "1", "--tol", "1e-4",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let rows = read_rows(dir.path());
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(row[0], "32");
    assert_eq!(row[1], "1");
    assert_eq!(row[2], "u");
    let error: f64 = row[3].parse().unwrap();
    let a: f64 = row[5].parse().unwrap();
    let remainder: f64 = row[6].parse().unwrap();
    let psi_n = 1.0 / (32.0_f64 * 32.0);
    assert!(
        (remainder - (error / psi_n - (4.0 / (PI * PI)) * a)).abs() <= 1e-12,
        "row not internally consistent: {row:?}"
    );

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    for key in ["config", "tolerances", "version", "started_at", "rows_written"] {
        assert!(manifest.get(key).is_some(), "manifest missing {key}");
    }
    assert_eq!(manifest["rows_written"], 1);
    assert_eq!(manifest["config"]["psi"], "power:r=2");
}

#[test]
fn sweep_is_deterministic_and_sorted() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let out = run(&[
            "sweep", "--psi", "exp:alpha=0.693147,r=1", "--beta", "0", "--n", "8,16",
            "--p-rule", "half_n", "--methods", "u,vp", "--tol", "1e-4",
            "--out", d.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let strip_runtime = |rows: Vec<Vec<String>>| -> Vec<Vec<String>> {
        rows.into_iter().map(|mut r| { r.pop(); r }).collect()
    };
    let r1 = strip_runtime(read_rows(d1.path()));
    let r2 = strip_runtime(read_rows(d2.path()));
    assert_eq!(r1, r2, "two identical sweeps differ");
    assert_eq!(r1.len(), 4);
    // sorted by (n, p, method)
    let keys: Vec<(usize, usize, String)> = r1
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].clone()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn compare_prints_ratio() {
    let out = run(&[
        "compare", "--psi", "exp:alpha=0.693147,r=1", "--beta", "0", "--n", "16", "--p", "8",
        "--methods", "u,vp", "--tol", "1e-4",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("ratio u/vp ="));
}

#[test]
fn kernel_dump_refines_under_grid_doubling() {
    let coarse = tempfile::tempdir().unwrap();
    let fine = tempfile::tempdir().unwrap();
    for (d, grid) in [(&coarse, "8"), (&fine, "16")] {
        let out = run(&[
            "kernel-dump", "--psi", "power:r=2", "--beta", "0.5", "--n", "4", "--p", "2",
            "--grid", grid, "--tol", "1e-6", "--out", d.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let load = |d: &tempfile::TempDir| -> Vec<(f64, f64)> {
        std::fs::read_to_string(d.path().join("kernel.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let (t, k) = l.split_once(',').unwrap();
                (t.parse().unwrap(), k.parse().unwrap())
            })
            .collect()
    };
    let c = load(&coarse);
    let f = load(&fine);
    assert_eq!(c.len(), 8);
    assert_eq!(f.len(), 16);
    for (j, (t, k)) in c.iter().enumerate() {
        let (tf, kf) = f[2 * j];
        assert!((t - tf).abs() <= 1e-12, "grid does not nest at {j}");
        assert!((k - kf).abs() <= 1e-12, "kernel value changed at t={t}: {k} vs {kf}");
    }
}

#[test]
fn bad_config_exits_two() {
    let out = run(&["error", "--psi", "power:r=-3", "--n", "8", "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["error", "--psi", "power:r=2", "--n", "8", "--p", "1", "--tol", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn slow_tail_exits_three() {
    // the dump grid contains t = 0, where the log weight cannot meet the
    // tail tolerance within the term cap
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "kernel-dump", "--psi", "log", "--beta", "0", "--n", "8", "--p", "2",
        "--grid", "16", "--tol", "1e-6", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
