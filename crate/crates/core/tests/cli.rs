use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_budget-ratio"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("RATIO_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn report(out: &Path, command: &str) -> Value {
    let text = std::fs::read_to_string(out.join(format!("{command}-report.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn analyze_baseline_prints_ratio_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "--dist", "baseline"], dir.path());
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("worst-case expected ratio: 0.6321"), "{stdout}");
    let r = report(dir.path(), "analyze");
    assert!((r["headline"]["ratio"].as_f64().unwrap() - 0.632_120_558_828_557_7).abs() < 1e-9);
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
    let csv = std::fs::read_to_string(dir.path().join("analyze.csv")).unwrap();
    assert!(csv.starts_with("i,rho,p,beta,h\n"));
    assert!(dir.path().join("worst_instance.txt").exists());
}

#[test]
fn analyze_reads_a_grid_file() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("two.txt");
    std::fs::write(&grid, "0.5 0.5\n1.0 0.5\n").unwrap();
    let o = run(&["analyze", "--dist", grid.to_str().unwrap(), "--starts", "8", "--diagnostics"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path(), "analyze");
    let ratio = r["headline"]["ratio"].as_f64().unwrap();
    assert!(ratio > 0.6321 && ratio < 0.66, "{ratio}");
    assert!(dir.path().join("analyze_starts.csv").exists());
}

#[test]
fn same_inputs_give_the_same_digest() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run(&["lower-bound", "--q", "20"], a.path()).status.success());
    assert!(run(&["lower-bound", "--q", "20"], b.path()).status.success());
    assert!(run(&["lower-bound", "--q", "30"], b.path()).status.success());
    let ra = report(a.path(), "lower-bound");
    let rb = report(b.path(), "lower-bound");
    assert_ne!(ra["inputs_digest"], rb["inputs_digest"]);
    assert!(run(&["lower-bound", "--q", "20"], b.path()).status.success());
    // --out differs, so compare the headline instead
    assert_eq!(ra["headline"], report(b.path(), "lower-bound")["headline"]);
}

#[test]
fn lower_bound_reports_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["lower-bound", "--q", "50", "--N", "3"], dir.path());
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("0.85114"), "{stdout}");
    let family = std::fs::read_to_string(dir.path().join("lower_bound_family.txt")).unwrap();
    assert!(!family.is_empty());
    let curve = std::fs::read_to_string(dir.path().join("lower_bound_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 402);
}

#[test]
fn two_budget_sweep_and_cross_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["two-budget", "--cross-check"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("figure1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("rho,worst_ratio,worst_c"));
    assert_eq!(lines.count(), 99);
    let r = report(dir.path(), "two-budget");
    assert!(r["headline"]["cross_check_max_diff"].as_f64().unwrap() <= 2e-4);
    assert_eq!(r["headline"]["unimodal"], Value::Bool(true));
}

#[test]
fn greedy_on_example_with_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["greedy", "--instance", "example-3.4", "--budgets", "3,2", "--rounds", "2"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("greedy.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "budget,greedy_value,optimum,ratio,chosen");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("2,"));
    let log = std::fs::read_to_string(dir.path().join("rounds_k3.csv")).unwrap();
    assert!(log.starts_with("round,threshold,added,value"));
}

#[test]
fn greedy_reads_instance_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cov.txt");
    std::fs::write(&file, "coverage 3 4\na: 0,1\nb: 1,2\nc: 3\nweights: 1,1,1,5\n").unwrap();
    let o = run(&["greedy", "--instance", file.to_str().unwrap(), "--budgets", "1,2", "--lazy"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path(), "greedy");
    assert_eq!(r["headline"]["greedy_k1"].as_f64(), Some(5.0));
    assert_eq!(r["headline"]["optimum_k2"].as_f64(), Some(7.0));
    assert_eq!(r["headline"]["ratio_k2"].as_f64(), Some(1.0));
}

#[test]
fn blocks_command_evaluates_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("blocks.txt");
    std::fs::write(&file, budget_ratio::block::BlockInstance::from_pairs(&[(1.0, 1.0)]).unwrap().to_text()).unwrap();
    let o = run(&["blocks", "--file", file.to_str().unwrap(), "--budgets", "1"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path(), "blocks");
    let ratio = r["headline"]["ratios"][0].as_f64().unwrap();
    assert!((ratio - 0.632_120_558_828_557_7).abs() < 1e-9);
}

#[test]
fn check_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["check", "--seed", "11"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(dir.path().join("check.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
}

#[test]
fn errors_are_json_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "--dist", "not-a-distribution"], dir.path());
    assert!(!o.status.success());
    let line = String::from_utf8(o.stderr).unwrap();
    let v: Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    assert_eq!(v["error"], "unknown_distribution");
    assert_eq!(v["command"], "analyze");

    let o = run(&["greedy", "--instance", "missing-file.txt", "--budgets", "1"], dir.path());
    let v: Value = serde_json::from_str(String::from_utf8(o.stderr).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(v["error"], "io");
}

#[test]
fn bad_flags_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["two-budget", "--rho-min", "oops"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["lower-bound", "--q", "2"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}
