use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qacs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qacs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn out_arg(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

#[test]
fn analyze_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = qacs(&["analyze", "--out", out_arg(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let golden = include_str!("golden/analyze.csv");
    assert_eq!(read(dir.path(), "analyze.csv"), golden);
    let audit = read(dir.path(), "audit.csv");
    assert_eq!(audit.lines().count(), 5);
    assert!(audit.lines().skip(1).all(|l| l.ends_with(",true")), "{audit}");
}

#[test]
fn simulate_is_byte_stable_across_threads() {
    let runs: Vec<(String, String)> = ["1", "3"]
        .iter()
        .map(|threads| {
            let dir = tempfile::tempdir().unwrap();
            let out = qacs(&[
                "simulate",
                "--out",
                out_arg(dir.path()),
                "--frames",
                "20000",
                "--seed",
                "9",
                "--threads",
                threads,
                "--set",
                "sim.batch_size=2000",
                "--set",
                "drops=2",
            ]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            (read(dir.path(), "simulate.csv"), read(dir.path(), "distributions.csv"))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let lines: Vec<&str> = runs[0].0.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("mean,"));
    assert!(runs[0].0.ends_with('\n'));
}

#[test]
fn gamma_f_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = qacs(&[
        "sweep",
        "--out",
        out_arg(dir.path()),
        "--axis",
        "gamma_f",
        "--values",
        "0:30:5",
        "--frames",
        "5000",
        "--set",
        "batch_size=500",
        "--set",
        "gamma_m_req=10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "sweep_gamma_f.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "axis_value_db,r_f_analytic,r_f_empirical,r_f_ci,r_m_analytic,r_m_empirical,r_m_ci,e_nq,e_nb"
    );
    assert_eq!(lines.len(), 8);
    for (i, line) in lines[1..].iter().enumerate() {
        assert!(line.starts_with(&format!("{:.6},", 5.0 * i as f64)), "{line}");
        assert_eq!(line.split(',').count(), 9);
    }
}

#[test]
fn negative_sweep_values_parse() {
    let dir = tempfile::tempdir().unwrap();
    let out = qacs(&[
        "sweep",
        "--out",
        out_arg(dir.path()),
        "--axis",
        "gamma-m",
        "--values",
        "-5:5:5",
        "--frames",
        "2000",
        "--set",
        "batch_size=500",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(dir.path(), "sweep_gamma_m.csv").lines().count(), 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qacs(&["simulate"]).status.code(), Some(1));
    assert_eq!(qacs(&["nonsense", "--out", "x"]).status.code(), Some(1));
    assert_eq!(qacs(&["--help"]).status.code(), Some(0));

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[scenario]\nfrobnicate = 3\n").unwrap();
    let out = qacs(&["analyze", "--config", cfg.to_str().unwrap(), "--out", out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2") && stderr.contains("frobnicate"), "{stderr}");

    let missing = dir.path().join("missing.toml");
    let out = qacs(&["analyze", "--config", missing.to_str().unwrap(), "--out", out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn loose_tolerance_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = qacs(&[
        "validate",
        "--out",
        out_arg(dir.path()),
        "--frames",
        "20000",
        "--set",
        "abs_tol=10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let report = read(dir.path(), "validate.csv");
    let failing: Vec<&str> = report.lines().filter(|l| l.contains(",false,")).collect();
    assert!(
        failing.iter().any(|l| l.contains("closed form vs oracle")),
        "{report}"
    );
}

#[test]
fn default_validation_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = qacs(&["validate", "--out", out_arg(dir.path())]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("QoS violations: 0 over 1000000 frames"), "{stdout}");
    let report = read(dir.path(), "validate.csv");
    assert!(report.lines().skip(1).all(|l| l.contains(",true,")), "{report}");
}
