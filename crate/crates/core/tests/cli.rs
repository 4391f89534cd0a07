use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn trapdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapdiff")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn scenarios_lists_builtins() {
    let out = trapdiff(&["scenarios"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&trapdiff(&["frobnicate"])), 1);
    assert_eq!(code(&trapdiff(&["profile", "--out", "x.csv"])), 1);
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("u.csv");
    assert_eq!(code(&trapdiff(&["profile", "--scenario", "nope", "--out", s(&out)])), 1);
    assert!(!out.exists());
    assert_eq!(code(&trapdiff(&["--help"])), 0);
}

#[test]
fn normal_profile_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("n.csv");
    let run = trapdiff(&[
        "profile", "--scenario", "fig1a", "--solvers", "normal", "--count", "11", "--x-max", "10", "--out", s(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x_cm,u_rte,u_de,u_normal,t_min,scenario"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 11);
    let xs: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(xs[0], 0.0);
    assert_eq!(xs[10], 10.0);
    let u: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(u.windows(2).all(|w| w[1] < w[0]));
    assert!(rows.iter().all(|r| r[1].is_empty() && r[2].is_empty() && r[4] == "1.00000000e1" && r[5] == "fig1a"));
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let args = |p: &Path| {
        vec![
            "profile".to_string(),
            "--scenario".into(),
            "fig2a".into(),
            "--count".into(),
            "6".into(),
            "--out".into(),
            s(p).to_string(),
        ]
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    assert_eq!(code(&trapdiff(&args(&a).iter().map(String::as_str).collect::<Vec<_>>())), 0);
    assert_eq!(code(&trapdiff(&args(&b).iter().map(String::as_str).collect::<Vec<_>>())), 0);
    let single = Command::new(env!("CARGO_BIN_EXE_trapdiff"))
        .args(args(&c))
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&single), 0);
    let a = fs::read(a).unwrap();
    assert_eq!(a, fs::read(b).unwrap());
    assert_eq!(a, fs::read(c).unwrap());
}

#[test]
fn compare_adds_difference_columns_and_plot() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.csv");
    let plot = dir.path().join("c.gp");
    let run = trapdiff(&[
        "compare", "--scenario", "fig2a,fig2c", "--count", "4", "--x-max", "6", "--out", s(&out), "--plot", s(&plot),
        "--logy",
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("x_cm,u_rte,u_de,u_normal,t_min,scenario,rte_minus_de,rel_rte_de,de_minus_normal\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 4);
    for row in text.lines().skip(1) {
        let f: Vec<f64> = row.split(',').enumerate().filter(|(i, _)| *i != 5).map(|(_, v)| v.parse().unwrap()).collect();
        assert!((f[5] - (f[1] - f[2])).abs() <= 1e-8 * f[1].abs());
        assert!((f[6] - f[5] / f[2]).abs() <= 1e-7 * f[6].abs().max(1e-12));
        assert!((f[7] - (f[2] - f[3])).abs() <= 1e-8 * f[2].abs());
    }
    let script = fs::read_to_string(&plot).unwrap();
    assert!(script.contains("set logscale y"));
    assert!(script.contains("multiplot layout 1,2"));
    assert!(script.contains("fig2c"));
}

#[test]
fn config_sections_define_scenarios() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("s.toml");
    fs::write(&cfg, "[slow]\nbase = \"fig2b\"\nsolvers = [\"fde\", \"normal\"]\ncount = 3\ntimes = [50.0]\n").unwrap();
    let out = dir.path().join("s.csv");
    let run = trapdiff(&["profile", "--config", s(&cfg), "--scenario", "slow", "--out", s(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",5.00000000e1,slow")));

    fs::write(&cfg, "[bad]\nunknown_key = 1\n").unwrap();
    assert_eq!(code(&trapdiff(&["profile", "--config", s(&cfg), "--scenario", "bad", "--out", s(&out)])), 1);
    fs::write(&cfg, "[neg]\nsigma_trap = -1.0\n").unwrap();
    assert_eq!(code(&trapdiff(&["profile", "--config", s(&cfg), "--scenario", "neg", "--out", s(&out)])), 1);
}

#[test]
fn numeric_failures_exit_two() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("t.toml");
    fs::write(&cfg, "[tight]\nsolvers = [\"fde\"]\nfde_tol = 1e-300\ncount = 2\n").unwrap();
    let out = dir.path().join("t.csv");
    let run = trapdiff(&["profile", "--config", s(&cfg), "--scenario", "tight", "--out", s(&out)]);
    assert_eq!(code(&run), 2, "{}", String::from_utf8_lossy(&run.stderr));
}

#[test]
fn validate_reports_and_flags_halved_truncation() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    assert_eq!(code(&trapdiff(&["validate", "--out", s(&report)])), 0);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let checks = json.as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["status"] == "pass" && c["check"].is_string()));

    let halved = trapdiff(&["validate", "--j", "20"]);
    assert_eq!(code(&halved), 3);
    let json: serde_json::Value = serde_json::from_slice(&halved.stdout).unwrap();
    assert!(json.as_array().unwrap().iter().any(|c| c["status"] == "fail"));
}
