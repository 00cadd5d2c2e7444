use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isopompeiu"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn spectrum_clifford() {
    let o = run(&[
        "spectrum", "--n", "3", "--g", "2", "--m0", "1", "--m1", "1", "--kmax", "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert!(r[4].parse::<f64>().unwrap() < 1e-8);
    }
}

#[test]
fn spectrum_s2() {
    let o = run(&["spectrum", "--n", "2", "--g", "1", "--kmax", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let closed: Vec<String> = data_rows(&stdout(&o)).into_iter().map(|r| r[1].clone()).collect();
    assert_eq!(closed, ["0", "2", "6"]);
}

#[test]
fn spectrum_bad_g() {
    let o = run(&["spectrum", "--n", "3", "--g", "5", "--m0", "1", "--m1", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("{1,2,3,4,6}"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["spectrum", "--g", "2"]).status.code(), Some(2));
    assert_eq!(
        run(&["spectrum", "--n", "4", "--g", "2", "--m0", "1", "--m1", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["lambda2", "--r", "1.5"]).status.code(), Some(2));
    let o = run(&[
        "verify",
        "--n",
        "3",
        "--g",
        "2",
        "--degree",
        "2",
        "--radii",
        "0.3",
        "--samples",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn circle_third() {
    let o = run(&["circle", "--alpha-over-pi", "1/3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows[0][1], "FAILS");
    assert_eq!(rows[0][4], "cos(3x)");
}

#[test]
fn circle_multi_arc() {
    let o = run(&["circle", "--k", "2", "--l", "1,2,3", "--t", "pi/5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(data_rows(&stdout(&o)).len(), 30);
}

#[test]
fn lambda2_equality() {
    let o = run(&["lambda2", "--r", "0.7071067811865476"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert!((rows[0][2].parse::<f64>().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(rows[0][4], "true");
}

#[test]
fn verify_small_run_is_reproducible() {
    let args = [
        "verify",
        "--n",
        "3",
        "--g",
        "2",
        "--degree",
        "1",
        "--radii",
        "0.3,pi/4",
        "--rotations",
        "2",
        "--samples",
        "40000",
        "--seed",
        "7",
    ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let mut with_workers = args.to_vec();
    with_workers.extend(["--workers", "3"]);
    let b = run(&with_workers);
    assert_eq!(a.stdout, b.stdout);
    let csv = stdout(&a);
    assert!(csv.lines().nth(2).unwrap().starts_with("# fingerprint: sha256:"));
    assert_eq!(data_rows(&csv).len(), 2 * 3 * 4);
}

#[test]
fn verify_freak_radius_with_control() {
    let o = run(&[
        "verify",
        "--n",
        "2",
        "--g",
        "1",
        "--freak-k",
        "2",
        "--radii",
        "pi/2",
        "--control-t",
        "pi/3",
        "--rotations",
        "3",
        "--samples",
        "100000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.last().unwrap()[12], "POSITIVE_CONTROL_NONZERO");
}

#[test]
fn json_output() {
    let o = run(&["zeros", "--n", "2", "--g", "1", "--kmax", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["schema"], "isopompeiu/v1");
    assert!(doc["result"]["solver"]["basis_degree"].as_u64().unwrap() > 3);
}

#[test]
fn output_file_and_polys() {
    let path = std::env::temp_dir().join(format!("isopompeiu-polys-{}.csv", std::process::id()));
    let o = run(&[
        "polys",
        "--n",
        "3",
        "--g",
        "2",
        "--kmax",
        "2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(data_rows(&body).len(), 6);
}

#[test]
fn addition_residuals() {
    let o = run(&["addition", "--n", "2", "--l", "1,2,3", "--points", "50"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(data_rows(&stdout(&o)).len(), 3);
}
