use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SQUARE: &str = r#"{"type":"maxcut","vertices":4,"edges":[[0,1],[1,2],[2,3],[3,0]]}"#;
const KNAPSACK: &str =
    r#"{"type":"knapsack","values":[4,4,2,2,4],"weights":[4,3,1,2,1],"capacity":7,"p1":1,"p2":0.25}"#;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qaoaforge"));
    for (k, _) in std::env::vars() {
        if k.starts_with("QAOAFORGE_") {
            cmd.env_remove(k);
        }
    }
    cmd
}

fn problem(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn solve(file: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.arg("solve")
        .arg(file)
        .args(["--layers", "2", "--max-iters", "300", "--seed", "3", "--out"])
        .arg(out)
        .args(extra);
    run(&mut cmd)
}

fn best_assignment(out: &Path) -> String {
    let run: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    run["best"]["assignment"].as_str().unwrap().to_string()
}

#[test]
fn solve_square_writes_artifacts() {
    let dir = TempDir::new().unwrap();
    let file = problem(&dir, "square.json", SQUARE);
    let out = dir.path().join("out");
    let o = solve(&file, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["manifest.json", "run.json", "histogram.csv", "trace.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    assert!(["0101", "1010"].contains(&best_assignment(&out).as_str()));

    let hist = fs::read_to_string(out.join("histogram.csv")).unwrap();
    let energies: Vec<f64> = hist
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(energies.len(), 16);
    assert!(energies.windows(2).all(|w| w[0] <= w[1]));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["problem"]["kind"], "maxcut");
    assert_eq!(manifest["problem"]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["config"]["seed"], 3);
}

#[test]
fn solve_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let file = problem(&dir, "square.json", SQUARE);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(solve(&file, &a, &[]).status.success());
    assert!(solve(&file, &b, &[]).status.success());
    assert_eq!(
        fs::read_to_string(a.join("run.json")).unwrap(),
        fs::read_to_string(b.join("run.json")).unwrap()
    );
}

#[test]
fn exact_and_shot_modes_agree_on_square() {
    let dir = TempDir::new().unwrap();
    let file = problem(&dir, "square.json", SQUARE);
    let (a, b) = (dir.path().join("exact"), dir.path().join("shots"));
    assert!(solve(&file, &a, &["--shots", "0"]).status.success());
    assert!(solve(&file, &b, &["--shots", "1000000"]).status.success());
    let optimum = ["0101", "1010"];
    assert!(optimum.contains(&best_assignment(&a).as_str()));
    assert!(optimum.contains(&best_assignment(&b).as_str()));
}

#[test]
fn env_vars_stand_in_for_flags() {
    let dir = TempDir::new().unwrap();
    let file = problem(&dir, "square.json", SQUARE);
    let out = dir.path().join("env");
    let o = run(bin()
        .arg("solve")
        .env("QAOAFORGE_PROBLEM", &file)
        .env("QAOAFORGE_LAYERS", "1")
        .env("QAOAFORGE_MAX_ITERS", "5")
        .env("QAOAFORGE_RESTARTS", "2")
        .env("QAOAFORGE_SEED", "17")
        .env("QAOAFORGE_OUT", &out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let run: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["config"]["seed"], 17);
    assert_eq!(run["restarts"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = TempDir::new().unwrap();
    let file = problem(&dir, "bad.json", "{\n  \"type\": \"maxcut\",\n  \"vertices\": ,\n}");
    let o = run(bin().arg("brute").arg(&file));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("column"), "{err}");
}

#[test]
fn brute_size_cap_exits_3() {
    let dir = TempDir::new().unwrap();
    let file = problem(&dir, "square.json", SQUARE);
    let o = run(bin().args(["brute", "--cap", "3"]).arg(&file));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn brute_reports_optimum_sets() {
    let dir = TempDir::new().unwrap();
    let brute = |body: &str| -> serde_json::Value {
        let file = problem(&dir, "p.json", body);
        let o = run(bin().args(["brute", "--json"]).arg(&file));
        assert!(o.status.success());
        serde_json::from_slice(&o.stdout).unwrap()
    };
    let square = brute(SQUARE);
    assert_eq!(square["best_cost"], -4.0);
    assert_eq!(square["optimum"], serde_json::json!(["0101", "1010"]));

    let empty = brute(r#"{"type":"maxcut","vertices":3,"edges":[]}"#);
    assert_eq!(empty["best_cost"], 0.0);
    assert_eq!(empty["optimum"].as_array().unwrap().len(), 8);

    let roomy = brute(r#"{"type":"knapsack","values":[1,2,3],"weights":[1,1,1],"capacity":3,"p1":1,"p2":1}"#);
    assert!(roomy["optimum"].as_array().unwrap().contains(&serde_json::json!("111")));
}

#[test]
fn verify_suites_pass() {
    for suite in ["gates", "symmetry", "trotter", "oracle"] {
        let o = run(bin().args(["verify", "--suite", suite, "--seed", "5"]));
        let text = String::from_utf8_lossy(&o.stdout);
        assert!(o.status.success(), "{suite}: {text}");
        assert!(text.contains("PASS") && !text.contains("FAIL"));
    }
}

fn grid(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn scan_resolution_two_gives_two_by_two() {
    let dir = TempDir::new().unwrap();
    let file = problem(&dir, "square.json", SQUARE);
    let out = dir.path().join("l.csv");
    let o = run(bin().args(["scan", "--resolution", "2", "--out"]).arg(&out).arg(&file));
    assert!(o.status.success());
    let g = grid(&out);
    assert_eq!(g.len(), 2);
    assert!(g.iter().all(|row| row.len() == 2));
}

#[test]
fn scaled_and_raw_knapsack_grids_differ() {
    let dir = TempDir::new().unwrap();
    let file = problem(&dir, "knap.json", KNAPSACK);
    let (a, b) = (dir.path().join("scaled.csv"), dir.path().join("raw.csv"));
    assert!(run(bin().args(["scan", "--resolution", "9", "--out"]).arg(&a).arg(&file)).status.success());
    assert!(run(bin().args(["scan", "--resolution", "9", "--no-scale", "--out"]).arg(&b).arg(&file))
        .status
        .success());
    let diff = grid(&a)
        .iter()
        .flatten()
        .zip(grid(&b).iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(diff > 0.0);
}

#[test]
fn trotter_table_shrinks() {
    let dir = TempDir::new().unwrap();
    let file = problem(&dir, "p.json", r#"{"type":"qubo","Q":[[1,2],[0,-1]],"c":[0.5,-0.3]}"#);
    let o = run(bin().args(["trotter", "--steps", "4,8,16", "--reference-steps", "1024"]).arg(&file));
    assert!(o.status.success());
    let errs: Vec<f64> = String::from_utf8_lossy(&o.stdout)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 3);
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
}
