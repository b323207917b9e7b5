use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn polya(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polya"))
        .args(args)
        .env("POLYA_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const URN: [&str; 6] = ["--R", "5", "--B", "5", "--delta-balls", "2"];

#[test]
fn generate_forces_last_node() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["generate", "--n", "10", "--seed", "42", "--force-last-universal"];
    args.extend(URN);
    let out = polya(dir.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("graph.json")).unwrap()).unwrap();
    assert_eq!(json["n"], 10);
    assert_eq!(json["draws"][9], 1);
    assert_eq!(json["seed"], "42");
    assert_eq!(json["params"]["delta"], 2.0);
    assert!(json["memory"].is_null());
    let edges = fs::read_to_string(dir.path().join("edges.csv")).unwrap();
    assert!(edges.starts_with("u,v\n"));
    assert!(edges.lines().any(|l| l == "10,1"));
}

#[test]
fn generate_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut args = vec!["generate", "--n", "50", "--seed", "3", "--memory", "4"];
    args.extend(URN);
    assert!(polya(a.path(), &args).status.success());
    assert!(polya(b.path(), &args).status.success());
    for f in ["graph.json", "edges.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn pi_e_exact_three_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let out = polya(dir.path(), &["pi-e", "--rho", "0.5", "--delta", "0.2", "--n", "3", "--mode", "exact"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("(0.309524, 0.309524, 0.380952)"));
    let csv = fs::read_to_string(dir.path().join("pi_e.csv")).unwrap();
    assert!(csv.starts_with("# mode: exact\ni,pi_e\n"));
}

#[test]
fn histogram_experiment_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["histogram", "--n", "10", "--runs", "200", "--t", "100", "--x0", "paper-n10", "--seed", "7"];
    args.extend(URN);
    let out = polya(dir.path(), &args);
    assert!(out.status.success());
    let first = fs::read(dir.path().join("histogram.csv")).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let header = lines.iter().position(|l| *l == "run,consensus_value").unwrap();
    assert!(lines[..header].iter().all(|l| l.starts_with('#')));
    assert!(lines[..header].iter().any(|l| l.starts_with("# sample_mean: ")));
    assert!(lines[..header].iter().any(|l| l.starts_with("# theoretical: 2.43626861294")));
    assert_eq!(lines.len() - header - 1, 200);
    assert!(!text.contains('\r'));

    assert!(polya(dir.path(), &args).status.success());
    assert_eq!(fs::read(dir.path().join("histogram.csv")).unwrap(), first);
}

#[test]
fn consensus_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = polya(dir.path(), &["consensus", "--draws", "001", "--x0", "0,0,1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("limit 0.428571428571429"));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.contains("t,x_1,x_2,x_3\n0,0,0,1\n"));
}

#[test]
fn memory_sweep_has_a_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["memory-sweep", "--n", "10", "--runs", "50", "--memories", "1,5,10"];
    args.extend(URN);
    assert!(polya(dir.path(), &args).status.success());
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let body: Vec<&str> = csv.lines().skip_while(|l| l.starts_with('#')).collect();
    assert_eq!(body[0], "delta,M,value,std_error,baseline,baseline_se");
    assert_eq!(body.len(), 1 + 9);
}

#[test]
fn json_output_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = polya(dir.path(), &["degree-dist", "--rho", "0.5", "--delta", "0.2", "--n", "2", "--i", "1", "--format", "json"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("degree.json")).unwrap()).unwrap();
    assert_eq!(json["columns"], serde_json::json!(["k", "p"]));
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(polya(p, &["pi-e", "--rho", "0.5", "--n", "3"]).status.code(), Some(2));
    assert_eq!(polya(p, &["pi-e", "--rho", "0.5", "--delta", "0.2", "--R", "1", "--n", "3"]).status.code(), Some(2));
    assert_eq!(polya(p, &["consensus", "--draws", "010", "--x0", "1,2,3"]).status.code(), Some(2));
    assert_eq!(polya(p, &["pi-e", "--nonsense"]).status.code(), Some(2));
    assert_eq!(polya(p, &["pi-e", "--rho", "0.5", "--delta", "0.2", "--n", "30"]).status.code(), Some(3));
    let blocker = p.join("file");
    fs::write(&blocker, "x").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_polya"))
        .args(["spectrum", "--draws", "101", "--out-dir"])
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn validate_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = polya(dir.path(), &["validate"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!text.contains("FAIL"));
}
