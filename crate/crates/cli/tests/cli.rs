use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diamtors"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    let out = run(args);
    let err: Value = serde_json::from_slice(&out.stderr).expect("errors are JSON");
    let code = out.status.code().unwrap();
    assert_eq!(err["error"]["exit_code"], code);
    code
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn subgroup_counts_follow_the_recursion() {
    let a: Vec<String> = serde_json::from_value(ok_json(&["subgroups", "--max-index", "10", "--format", "json"])).unwrap();
    // a_n = n * n! - sum_{k<n} (n-k)! a_k
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    let mut expected = vec![0u128; 11];
    for n in 1..=10 {
        expected[n] = n as u128 * fact(n) - (1..n).map(|k| fact(n - k) * expected[k]).sum::<u128>();
    }
    let expected: Vec<String> = expected[1..].iter().map(u128::to_string).collect();
    assert_eq!(a, expected);
    assert_eq!(a[9], "31998903");
}

#[test]
fn subgroup_oracle_agrees_and_refuses_large_indices() {
    let csv = ok(&["subgroups", "--max-index", "6", "--oracle"]);
    assert!(csv.lines().any(|l| l == "6,3447,3447"));
    assert_eq!(exit_code(&["subgroups", "--max-index", "9", "--oracle"]), 3);
}

#[test]
fn schreier_subcommands() {
    let g = ok_json(&["schreier", "sample", "--n", "8", "--seed", "3"]);
    assert_eq!(g["sigma_a"].as_array().unwrap().len(), 8);
    let all = ok_json(&["schreier", "enumerate", "--n", "3"]);
    assert_eq!(all.as_array().unwrap().len(), 13);
    let csv = ok(&["schreier", "diam-stats", "--n", "27", "--trials", "10"]);
    assert_eq!(csv.lines().count(), 11);
    assert_eq!(exit_code(&["schreier", "enumerate", "--n", "8"]), 3);
}

#[test]
fn glued_count_with_ceiling_two() {
    let c = ok_json(&["gl", "count", "--dmax", "4", "--ceiling", "2"]);
    assert_eq!(c["exact"], "4");
    let f = ok_json(&["gl", "fraction", "--d", "20"]);
    assert!(f["log_bound"].as_f64().unwrap() < 0.0);
}

#[test]
fn block_table_scales_the_diameter() {
    let dir = tempfile::tempdir().unwrap();
    let table = write(
        dir.path(),
        "blocks.json",
        r#"{"diam_V0":2,"diam_V1":2,"diam_Aplus":2,"diam_Aminus":2,"diam_Bplus":2,"diam_Bminus":2}"#,
    );
    let c = ok_json(&["gl", "count", "--dmax", "8", "--ceiling", "2", "--block-table", &table]);
    assert_eq!(c["exact"], "4");
}

#[test]
fn geometry_subcommands() {
    let v = ok_json(&["geom", "ball-volume", "--n", "3", "--r", "1"]);
    assert!((v["volume"].as_f64().unwrap() - 5.11093).abs() < 1e-4);
    let v = ok_json(&["geom", "ball-volume", "--n", "3", "--r", "2000", "--log-space"]);
    assert!(v["volume"].is_null());
    assert!(v["log_volume"].as_f64().unwrap() > 3000.0);
    let s = ok_json(&["geom", "sharpness", "--a", "1", "--b", "2", "--target", "10"]);
    assert!(s.is_object());
    assert_eq!(exit_code(&["geom", "ball-volume", "--n", "1", "--r", "1"]), 2);
}

#[test]
fn torsion_bound_reads_tables_and_scans() {
    let dir = tempfile::tempdir().unwrap();
    let table = write(dir.path(), "table.json", r#"[{"degree":1000000,"p":1,"constant":0.2}]"#);
    let b = ok_json(&["geom", "torsion-bound", "--n", "3", "--diam", "5", "--gabber-table", &table]);
    assert!(b.is_object());
    let scan = dir.path().join("scan.json");
    ok(&["gabber-scan", "--trials", "50", "--out", scan.to_str().unwrap()]);
    // a scan at degree 12 does not cover the degrees of a hyperbolic net
    let code = exit_code(&["geom", "torsion-bound", "--n", "3", "--diam", "5", "--gabber-table", scan.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn homology_of_a_complex_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "sphere.json",
        r#"{"vertices":4,"simplices":{"2":[[0,1,2],[0,1,3],[0,2,3],[1,2,3]]}}"#,
    );
    let csv = ok(&["homology", "--complex", &path, "--format", "csv"]);
    assert_eq!(csv, "p,simplices,betti,torsion\n0,4,1,\n1,6,0,\n2,4,1,\n");
    let bad = write(dir.path(), "bad.json", "{");
    assert_eq!(exit_code(&["homology", "--complex", &bad]), 2);
    assert_eq!(exit_code(&["homology", "--complex", "/nonexistent/complex.json"]), 2);
}

#[test]
fn nerve_of_model_spaces() {
    let r = ok_json(&["nerve", "--model", "circle", "--points", "120", "--sep", "0.3", "--radius", "0.32"]);
    assert_eq!(r["homology"][1]["betti"], 1);
    let r = ok_json(&[
        "nerve", "--model", "flat-torus", "--points", "900", "--sep", "0.15", "--radius", "0.16",
    ]);
    assert_eq!(r["homology"][1]["betti"], 2);
    let dir = tempfile::tempdir().unwrap();
    let matrix = write(dir.path(), "m.json", "[[0,1,1],[1,0,1],[1,1,0]]");
    let r = ok_json(&[
        "nerve", "--model", "explicit", "--matrix", &matrix, "--sep", "0.5", "--radius", "1.1",
    ]);
    assert_eq!(r["homology"][0]["betti"], 1);
    assert_eq!(
        exit_code(&["nerve", "--model", "flat-torus", "--points", "901", "--sep", "0.1", "--radius", "0.1"]),
        2
    );
}

#[test]
fn curves_have_csv_rows() {
    for args in [
        &["curves", "count-vs-diam", "--d-max", "6"][..],
        &["curves", "diam-vs-n", "--ns", "27,81", "--trials", "5"],
        &["curves", "torsion-vs-vertices", "--trials", "100"],
    ] {
        let csv = ok(args);
        assert!(csv.starts_with("x,y,lower,upper\n"));
        assert!(csv.lines().count() > 1);
        assert!(!csv.contains("-0,"));
    }
    assert_eq!(exit_code(&["curves", "nonsense"]), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(exit_code(&["frobnicate"]), 2);
    assert_eq!(exit_code(&["subgroups"]), 2);
    assert_eq!(exit_code(&["--threads", "0", "subgroups", "--max-index", "3"]), 2);
    assert!(run(&["--help"]).status.success());
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> (Vec<u8>, Value) {
    let out = dir.join(name);
    let mut full = args.to_vec();
    full.extend(["--out", out.to_str().unwrap()]);
    ok(&full);
    let manifest = dir.join(format!("{name}.manifest.json"));
    (
        std::fs::read(&out).unwrap(),
        serde_json::from_str(&std::fs::read_to_string(manifest).unwrap()).unwrap(),
    )
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    for (i, args) in [
        &["gabber-scan", "--trials", "300", "--seed", "7"][..],
        &["schreier", "diam-stats", "--n", "81", "--trials", "40", "--seed", "7"],
        &["nerve", "--model", "round-sphere", "--points", "400", "--sep", "0.5", "--radius", "0.6"],
        &["gl", "count", "--dmax", "6", "--ceiling", "4", "--trials", "30"],
    ]
    .iter()
    .enumerate()
    {
        let one: Vec<&str> = ["--threads", "1"].iter().chain(args.iter()).copied().collect();
        let four: Vec<&str> = ["--threads", "4"].iter().chain(args.iter()).copied().collect();
        let (a, ma) = run_to_file(dir.path(), &format!("a{i}"), &one);
        let (b, mb) = run_to_file(dir.path(), &format!("b{i}"), &four);
        let (c, _) = run_to_file(dir.path(), &format!("c{i}"), &four);
        assert_eq!(a, b, "{args:?}");
        assert_eq!(b, c, "{args:?}");
        assert_eq!(ma["config_hash"], mb["config_hash"]);
        assert_eq!(ma["output_sha256"], mb["output_sha256"]);
        assert_eq!(ma["threads"], 1);
        assert_eq!(mb["threads"], 4);
    }
}

#[test]
fn manifest_records_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let (data, m) = run_to_file(dir.path(), "sub.csv", &["subgroups", "--max-index", "5", "--seed", "9"]);
    assert_eq!(data, b"N,a_N\n1,1\n2,3\n3,13\n4,71\n5,461\n");
    assert_eq!(m["seed"], 9);
    assert_eq!(m["config"]["command"]["max_index"], 5);
    assert!(m["versions"]["diamtors-core"].is_string());
    assert!(m["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    let (_, other) = run_to_file(dir.path(), "sub2.csv", &["subgroups", "--max-index", "5", "--seed", "10"]);
    assert_ne!(m["config_hash"], other["config_hash"]);
}
