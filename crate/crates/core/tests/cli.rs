use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdp3color")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write_graph(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert!(o.status.success());
    std::fs::write(&path, &o.stdout).unwrap();
    path.display().to_string()
}

#[test]
fn decide_k2_and_k4() {
    let dir = tempfile::tempdir().unwrap();
    let k2 = write_graph(dir.path(), "k2.col", &["--kind", "complete", "--n", "2"]);
    let o = run(&["decide", &k2]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["decision"], "ThreeColorable");
    assert_eq!(v["agree"], "Agree");
    assert!(v["objective"].as_f64().unwrap().abs() <= 1e-6);

    let k4 = write_graph(dir.path(), "k4.col", &["--kind", "complete", "--n", "4"]);
    let o = run(&["decide", &k4, "--bound", "-10"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_ne!(v["decision"], "Inconclusive");
    assert!(v["objective"].as_f64().unwrap() >= -10.0 - 1e-6);
}

#[test]
fn oracle_and_dual() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write_graph(dir.path(), "c5.col", &["--kind", "cycle", "--n", "5"]);
    let v = json(&run(&["oracle", &c5]));
    assert_eq!(v["colorable"], true);
    assert_eq!(v["count"], 30);
    let v = json(&run(&["dual", &c5]));
    assert!(v["tau"].as_f64().unwrap() <= 1e-7);
    assert_eq!(v["certificate"]["passed"], true);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.col");
    std::fs::write(&bad, "p edge 2 1\ne 1 7\n").unwrap();
    let o = run(&["decide", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(run(&["oracle", "/nonexistent/x.col"]).status.code(), Some(2));
    assert_eq!(run(&["cones", "probe-copositive", "--graph", "c5"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--kind", "cycle"]).status.code(), Some(2));
}

#[test]
fn sweep_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let o = run(&["sweep", "--n-max", "3", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("graph_id,n,m,edge_bitmask"));
    assert!(lines[1..].iter().all(|l| l.contains("ThreeColorable")));
    let summary: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(summary["rows"], 5);
}

#[test]
fn dedup_sweep_keeps_one_graph_per_class() {
    let o = run(&["sweep", "--n-max", "4", "--dedup"]);
    assert!(o.status.success());
    // K2; P3, K3; and the six connected graphs on four vertices
    assert_eq!(json(&o).as_array().unwrap().len(), 9);
}

#[test]
fn identities_and_probe() {
    let v = json(&run(&["identities", "--trials", "20", "--seed", "3"]));
    assert_eq!(v["trials"], 20);
    assert!(v["identity_max_residual"].as_f64().unwrap() <= 1e-9);
    let o = run(&[
        "cones",
        "probe-thm32",
        "--graph",
        "k4",
        "--a",
        "6",
        "--b",
        "-1",
        "--t",
        "0.8333333333333334",
        "--max-depth",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!((v["predicted"].as_f64().unwrap() + 6.0).abs() < 1e-9);
}

#[test]
fn verbose_logs_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write_graph(dir.path(), "p3.col", &["--kind", "path", "--n", "3"]);
    let o = run(&["decide", &p3, "--verbose"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("iter"));
    assert!(stdout(&o).contains("ThreeColorable"));
}
