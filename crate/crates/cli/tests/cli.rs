use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ccmc::{ACCEPTANCE_HEADER, RESULTS_HEADER};

fn ccmc(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccmc"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "error")
        .output()
        .expect("spawn ccmc")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = ccmc(args, cwd);
    assert!(
        out.status.success(),
        "ccmc {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn single_instance_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let listed = ok(&["--seed", "3", "--out-dir", "g", "gen", "--n", "10", "--degree", "3", "--count", "2"], d);
    assert_eq!(listed.lines().count(), 2);
    let g0 = "g/n10_d3_000.txt";
    assert!(d.join(g0).exists());

    let exact = ok(&["exact", g0, "g/n10_d3_001.txt"], d);
    assert!(exact.contains("certified"));
    assert_eq!(header(&d.join("references.csv")), "graph_id,energy,certified,method");

    ok(&["--seed", "1", "corr", "mc", g0, "--beta-s", "0.6", "--samples", "300", "-o", "z_mc.corr"], d);
    ok(&["corr", "qaoa-p1", g0, "--restarts", "2", "-o", "z_q1.corr"], d);
    ok(&["corr", "cc", g0], d);
    assert!(d.join("n10_d3_000.cc.corr").exists());
    assert!(fs::read_to_string(d.join("z_q1.corr")).unwrap().starts_with("10 QAOA 1"));

    let row = ok(&["run", "--instance", g0, "--corr", "z_mc.corr", "--budget", "50", "--events", "ev.csv"], d);
    let mut lines = row.lines();
    assert_eq!(lines.next().unwrap(), RESULTS_HEADER);
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&fields[1..4], &["CA", "MC", "0.6"]);
    assert_eq!(fields[5], "500");
    assert_eq!(header(&d.join("ev.csv")), ACCEPTANCE_HEADER);

    let sa = ok(&["run", "--instance", g0, "--method", "sa", "--budget", "20"], d);
    assert!(sa.lines().nth(1).unwrap().contains(",SA,NONE,"));

    ok(&["hist", "--instance", g0, "--corr", "z_mc.corr", "--filter", "all", "-o", "h.csv"], d);
    let h = fs::read_to_string(d.join("h.csv")).unwrap();
    assert_eq!(h.lines().next().unwrap(), "graph_id,source,param,bin,bin_lo,bin_hi,count");
    let total: u64 = h.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 15);
}

const SUITE: &str = r#"
seed = 5
reps = 3
budgets = [10]
[instances]
n = 8
degree = 3
count = 2
[tuning]
reps = 2
grid = [0.5, 1.0]
[[runs]]
method = "sa"
[[runs]]
method = "ca"
source = "cc"
"#;

#[test]
fn bench_writes_every_table_and_honours_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("suite.toml"), SUITE).unwrap();
    let stdout = ok(&["--out-dir", "out", "bench", "--config", "suite.toml", "--set", "reps=4", "--budgets", "10,20"], d);
    assert!(stdout.starts_with("method\tsource"));
    let out = d.join("out");
    for f in ["results.csv", "summary.csv", "references.csv", "tuning.csv", "config.resolved.toml"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(header(&out.join("results.csv")), RESULTS_HEADER);
    let rows = fs::read_to_string(out.join("results.csv")).unwrap().lines().count() - 1;
    assert_eq!(rows, 2 * 2 * 2 * 4);
    let tuning = fs::read_to_string(out.join("tuning.csv")).unwrap();
    assert_eq!(tuning.lines().filter(|l| l.ends_with("true")).count(), 1);
}

#[test]
fn accept_logs_events_in_the_window() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("suite.toml"), SUITE).unwrap();
    ok(&["--out-dir", "acc", "accept", "--config", "suite.toml"], d);
    let acc = d.join("acc");
    assert_eq!(header(&acc.join("acceptance.csv")), ACCEPTANCE_HEADER);
    let events = fs::read_to_string(acc.join("acceptance.csv")).unwrap();
    assert!(events.lines().count() > 1);
    for l in events.lines().skip(1) {
        let beta: f64 = l.split(',').nth(4).unwrap().parse().unwrap();
        assert!((1.0..=8.0).contains(&beta), "{l}");
    }
    assert!(acc.join("acceptance_summary.csv").exists());
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("suite.toml"), SUITE.replace("reps = 3", "reps = 3\nrepz = 1")).unwrap();
    let out = ccmc(&["bench", "--config", "suite.toml"], d);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("repz"));

    fs::write(d.join("suite.toml"), SUITE).unwrap();
    let out = ccmc(&["bench", "--config", "suite.toml", "--set", "instances.n=9"], d);
    assert!(!out.status.success());

    assert!(!ccmc(&["run", "--instance", "missing.txt"], d).status.success());
    assert!(!ccmc(&["corr", "mc", "missing.txt", "--beta-s", "1"], d).status.success());
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ccmc::ExperimentConfig::read(&path, &[]).unwrap_or_else(|e| panic!("{}: {e:#}", path.display()));
            assert!(!cfg.arms().is_empty());
            seen += 1;
        }
    }
    assert!(seen >= 4);
}

#[test]
fn smoke_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/smoke.toml");
    let out = dir.path().join("smoke");
    ok(&["--out-dir", out.to_str().unwrap(), "bench", "--config", cfg.to_str().unwrap()], dir.path());
    let rows = fs::read_to_string(out.join("results.csv")).unwrap().lines().count() - 1;
    assert_eq!(rows, 3 * 2 * 5 * 8);
}
