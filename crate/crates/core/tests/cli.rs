use std::path::Path;

use dmjac::cli::{run, EXIT_INVALID, EXIT_OK, EXIT_VERIFY_FAILED};

fn dmjac(args: &[&str], out: &Path) -> i32 {
    let mut argv = vec!["dmjac".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--out".into());
    argv.push(out.display().to_string());
    run(argv)
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn solve_thinfilm_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dmjac(&["solve", "thinfilm", "--n", "40", "--j", "0.8"], dir.path()), EXIT_OK);
    let (header, rows) = csv_rows(&dir.path().join("solution.csv"));
    assert_eq!(header, ["x", "E", "c", "rho", "E_computational"]);
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r.iter().all(|v| v.is_finite())));
    let (_, coefs) = csv_rows(&dir.path().join("coefficients.csv"));
    assert_eq!(coefs.len(), 40);

    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["subcommand"], "solve");
    assert_eq!(m["problem"], "thinfilm");
    assert_eq!(m["converged"], true);
    let stages = m["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 4);
    assert!(m["replay"].as_array().unwrap().iter().any(|a| a == "--j"));

    let log = std::fs::read_to_string(dir.path().join("newton.jsonl")).unwrap();
    for line in log.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["residual_norm"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn zero_current_converges_immediately() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dmjac(&["solve", "thinfilm", "--n", "30", "--j", "0"], dir.path()), EXIT_OK);
    let m = read_json(&dir.path().join("manifest.json"));
    let stages = m["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 1);
    assert_eq!(stages[0]["iterations"], 0);
}

#[test]
fn solve_pnp_marches_steps() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dmjac(&["solve", "pnp1d", "--n", "16", "--steps", "3"], dir.path()), EXIT_OK);
    let (header, rows) = csv_rows(&dir.path().join("solution.csv"));
    assert_eq!(header, ["x", "c_plus", "c_minus", "phi"]);
    assert_eq!(rows.len(), 16);
    assert_eq!(read_json(&dir.path().join("manifest.json"))["stages"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dmjac(&["verify", "pnp1d", "--n", "12"], dir.path()), EXIT_OK);
    let v = read_json(&dir.path().join("verify.json"));
    assert!(v.is_object());
    assert_eq!(
        dmjac(&["verify", "thinfilm", "--n", "20", "--inject-bug"], dir.path()),
        EXIT_VERIFY_FAILED
    );
    assert_eq!(
        dmjac(&["verify", "colloid", "--nr", "6", "--nt", "5", "--inject-bug"], dir.path()),
        EXIT_VERIFY_FAILED
    );
}

#[test]
fn bench_single_size_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dmjac(&["bench", "thinfilm", "--sizes", "40", "--reps", "1"], dir.path()), EXIT_OK);
    let (header, rows) = csv_rows(&dir.path().join("bench.csv"));
    assert_eq!(header, ["size", "t_direct", "t_fd", "ratio"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 40.0);
    assert!(rows[0][1] > 0.0 && rows[0][2] > 0.0);
}

#[test]
fn invalid_invocations_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dmjac(&["solve", "nosuch"], dir.path()), EXIT_INVALID);
    assert_eq!(dmjac(&["solve", "thinfilm", "--beta", "0.5"], dir.path()), EXIT_INVALID);
    assert_eq!(dmjac(&["solve", "colloid", "--j", "1"], dir.path()), EXIT_INVALID);
    assert_eq!(dmjac(&["solve", "thinfilm", "--n", "2"], dir.path()), EXIT_INVALID);
    assert_eq!(dmjac(&["bench", "pnp1d", "--reps", "0"], dir.path()), EXIT_INVALID);
}
