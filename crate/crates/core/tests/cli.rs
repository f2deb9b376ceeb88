use std::path::{Path, PathBuf};
use std::process::Command;

use densetest::cli::{EXIT_DATA, EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, read_csv_dataset, run_cli};
use densetest::numerics::rng::stream;
use densetest::simulate::{Design, DesignSampler};
use rand_distr::{Distribution, StandardNormal};
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("densetest").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

/// `n` rows of Toeplitz features plus a response `x₁ + x₂ + ε`, with header.
fn dataset(dir: &Path, n: usize, p: usize, seed: u64) -> PathBuf {
    let mut rng = stream(seed, 0);
    let x = DesignSampler::new(Design::Toeplitz, p).unwrap().sample(n, &mut rng);
    let mut body = (1..=p).map(|j| format!("x{j}")).collect::<Vec<_>>().join(",") + ",y\n";
    for i in 0..n {
        let e: f64 = StandardNormal.sample(&mut rng);
        let y = x[(i, 0)] + x[(i, 1)] + e;
        let row: Vec<String> = x.row(i).iter().chain(std::iter::once(&y)).map(|v| v.to_string()).collect();
        body.push_str(&row.join(","));
        body.push('\n');
    }
    write(dir, &format!("data_{n}_{p}_{seed}.csv"), &body)
}

fn identity_csv(dir: &Path, p: usize) -> PathBuf {
    let body: String = (0..p)
        .map(|i| (0..p).map(|j| if i == j { "1" } else { "0" }).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    write(dir, "sigma.csv", &body)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn csv_layout_rules() {
    let dir = TempDir::new().unwrap();
    let plain = write(dir.path(), "plain.csv", "1,2,3\n4,5,6\n7,8,9\n");
    let (x, y) = read_csv_dataset(&plain, None).unwrap();
    assert_eq!((x.rows(), x.cols()), (3, 2));
    assert_eq!(y, vec![3.0, 6.0, 9.0]);
    let (x, y) = read_csv_dataset(&plain, Some(1)).unwrap();
    assert_eq!(x.row(0), &[2.0, 3.0]);
    assert_eq!(y, vec![1.0, 4.0, 7.0]);
    let header = write(dir.path(), "header.csv", "a,b,y\n1,2,3\n4,5,6\n");
    let (x, _) = read_csv_dataset(&header, None).unwrap();
    assert_eq!(x.rows(), 2);
    let partial = write(dir.path(), "partial.csv", "1,b,3\n4,5,6\n");
    assert_eq!(read_csv_dataset(&partial, None).unwrap().0.rows(), 1);
}

#[test]
fn pairwise_test_unknown_sigma() {
    let dir = TempDir::new().unwrap();
    let data = dataset(dir.path(), 60, 8, 1);
    let json = dir.path().join("report.json");
    let r = run(&[
        "test",
        "--data",
        s(&data),
        "--a-index-pair",
        "1,2",
        "--g0",
        "0",
        "--alpha",
        "0.05",
        "--output",
        s(&json),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("statistic") && r.out.contains("p_value") && r.out.contains("decision"));
    assert!(r.out.contains("rho_hat"));
    let first = std::fs::read(&json).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["report"]["method"], "unknown_sigma");
    assert_eq!(v["hypothesis"]["a"][0], 1.0);
    assert_eq!(v["hypothesis"]["a"][1], -1.0);
    // Rerun is byte-identical.
    let r = run(&[
        "test",
        "--data",
        s(&data),
        "--a-index-pair",
        "1,2",
        "--g0",
        "0",
        "--alpha",
        "0.05",
        "--output",
        s(&json),
    ]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(std::fs::read(&json).unwrap(), first);
}

#[test]
fn known_sigma_test_and_interval() {
    let dir = TempDir::new().unwrap();
    let data = dataset(dir.path(), 80, 5, 2);
    let sigma = identity_csv(dir.path(), 5);
    let r = run(&["test", "--data", s(&data), "--sigma", s(&sigma), "--a", "1,0,0,0,0", "--g0", "-3"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("known_sigma") && r.out.contains("reject"));
    let out = dir.path().join("ci.json");
    let r = run(&[
        "ci",
        "--data",
        s(&data),
        "--sigma",
        s(&sigma),
        "--a-group",
        "1,2",
        "--output",
        s(&out),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let (lo, hi) = (v["interval"]["lower"].as_f64().unwrap(), v["interval"]["upper"].as_f64().unwrap());
    assert!(lo < hi);
    assert_eq!(v["interval"]["grid_points"], 401);
}

#[test]
fn unknown_sigma_interval_with_explicit_grid() {
    let dir = TempDir::new().unwrap();
    let data = dataset(dir.path(), 60, 6, 3);
    let r = run(&[
        "ci",
        "--data",
        s(&data),
        "--a",
        "1,0,0,0,0,0",
        "--grid-center",
        "1",
        "--grid-half-width",
        "1.5",
        "--grid-step",
        "0.05",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("interval"));
}

#[test]
fn dictionary_point_loading() {
    let dir = TempDir::new().unwrap();
    let data = dataset(dir.path(), 60, 3, 4);
    let r = run(&[
        "test",
        "--data",
        s(&data),
        "--a-dict-point",
        "0.5,-0.5,0",
        "--dict-degree",
        "2",
        "--g0",
        "0",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
}

fn campaign_json(dir: &Path) -> PathBuf {
    write(
        dir,
        "camp.json",
        r#"{"design":"toeplitz","regime":{"beta":"sparse","loading":"sparse"},"n":40,"p":10,"reps":20,"alpha":0.05,"h_grid":[-1.0,0.0,1.0],"method":"both","base_seed":11}"#,
    )
}

#[test]
fn simulate_and_null_check() {
    let dir = TempDir::new().unwrap();
    let cfg = campaign_json(dir.path());
    let (csv, json) = (dir.path().join("out.csv"), dir.path().join("out.json"));
    let r = run(&[
        "simulate",
        "--config",
        s(&cfg),
        "--csv",
        s(&csv),
        "--json",
        s(&json),
        "--threads",
        "2",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "method,h,rejection_rate,n_reps,n_errors,n_infeasible");
    assert_eq!(text.lines().count(), 7);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(v["config"]["base_seed"], 11);
    assert_eq!(v["results"][0]["null_statistics"].as_array().unwrap().len(), 20);

    let r = run(&["null-check", "--config", s(&cfg), "--threads", "1"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("known_sigma") && r.out.contains("ks_p_value"));
}

#[test]
fn usage_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let data = dataset(dir.path(), 20, 4, 5);
    assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(run(&["test", "--data", s(&data)]).code, EXIT_USAGE);
    assert_eq!(
        run(&["test", "--data", s(&data), "--a", "1,0,0,0", "--a-index-pair", "1,2"]).code,
        EXIT_USAGE
    );
    let r = run(&["test", "--data", s(&data), "--a", "1,0,0,0", "--alpha", "1.5"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("alpha"));
    assert_eq!(run(&["test", "--data", s(&data), "--a-index-pair", "1,2,3"]).code, EXIT_USAGE);
    assert_eq!(run(&["test", "--data", s(&data), "--a", "1,0,0,0", "--rho0", "2"]).code, EXIT_USAGE);
    assert_eq!(run(&["--help"]).code, EXIT_OK);
}

#[test]
fn data_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let na = write(dir.path(), "na.csv", "1,2,3\n4,NA,6\n7,8,9\n");
    let r = run(&["test", "--data", s(&na), "--a", "1,0"]);
    assert_eq!(r.code, EXIT_DATA);
    assert!(r.err.contains("row 2, column 2") && r.err.contains("NA"), "{}", r.err);

    let ragged = write(dir.path(), "ragged.csv", "1,2,3\n4,5\n");
    let r = run(&["test", "--data", s(&ragged), "--a", "1,0"]);
    assert_eq!(r.code, EXIT_DATA);
    assert!(r.err.contains("row 2"));

    let data = dataset(dir.path(), 20, 4, 6);
    let r = run(&["test", "--data", s(&data), "--a", "1,0,0"]);
    assert_eq!(r.code, EXIT_DATA);
    assert!(r.err.contains('3') && r.err.contains('4'), "{}", r.err);

    let missing = dir.path().join("missing.csv");
    assert_eq!(run(&["test", "--data", s(&missing), "--a", "1,0"]).code, EXIT_DATA);

    let bad_sigma = write(dir.path(), "bad_sigma.csv", "1,2\n2,1\n");
    let small = write(dir.path(), "small.csv", "1,0,1\n0,1,2\n1,1,0\n2,1,1\n");
    assert_eq!(
        run(&["test", "--data", s(&small), "--sigma", s(&bad_sigma), "--a", "1,0"]).code,
        EXIT_DATA
    );

    let bad_cfg = write(dir.path(), "bad.json", r#"{"design":"toeplitz"}"#);
    assert_eq!(run(&["simulate", "--config", s(&bad_cfg)]).code, EXIT_DATA);
}

#[test]
fn infeasible_estimator_exits_3() {
    // n < p - 1 and a near-zero η force W̃π ≈ V, which violates the
    // lower bound on Vᵀ(V - W̃π).
    let dir = TempDir::new().unwrap();
    let data = dataset(dir.path(), 5, 10, 7);
    let r = run(&[
        "test",
        "--data",
        s(&data),
        "--a-index-pair",
        "1,2",
        "--eta",
        "1e-9",
        "--rho0",
        "0.5",
    ]);
    assert_eq!(r.code, EXIT_INFEASIBLE, "{}{}", r.out, r.err);
    assert!(r.err.contains("infeasible"));
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_densetest");
    let status = Command::new(bin).arg("--version").status().unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    let status = Command::new(bin).arg("bogus").output().unwrap().status;
    assert_eq!(status.code(), Some(EXIT_USAGE));
    let dir = TempDir::new().unwrap();
    let na = write(dir.path(), "na.csv", "1,2\nNA,3\n");
    let status = Command::new(bin)
        .args(["test", "--data", s(&na), "--a", "1"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(EXIT_DATA));
}
