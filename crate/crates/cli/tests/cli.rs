use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gauduchon")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_stable_output_is_byte_identical() {
    let args = ["verify", "--suite", "scalars", "--seed", "7", "--stable-output", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(v.get("elapsed_ms").is_none());
}

#[test]
fn verify_without_stable_output_reports_timings() {
    let o = run(&["verify", "--suite", "lck", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["elapsed_ms"].is_number());
    assert!(v["checks"][0]["elapsed_ms"].is_number());
}

#[test]
fn corrupted_closed_form_fails_with_exit_one() {
    let o = run(&["verify", "--suite", "dual-route", "--corrupt-closed-form", "--stable-output"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL dual-route/hopf(n=2)"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "--suite", "nonexistent"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--model", "hopf", "--quantity", "volume", "--t-range", "0:1:0.5"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--model", "hopf", "--quantity", "scal", "--t-range", "0:1"]).status.code(), Some(2));
    assert_eq!(run(&["curvature", "--model", "nosuch", "--point", "1,0", "--t", "0"]).status.code(), Some(2));
    assert_eq!(run(&["curvature", "--model", "hopf", "--point", "0,0", "--t", "0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn lambda_star_values_and_boundary() {
    let o = run(&["lambda-star", "--t", "0", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), -0.5);
    let o = run(&["lambda-star", "--t", "-1", "--n", "3"]);
    assert!((stdout(&o).trim().parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(run(&["lambda-star", "--t", "1", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn empty_sweep_is_header_only() {
    let o = run(&["sweep", "--model", "hopf", "--quantity", "scal", "--t-range", "1:0:0.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "t,scal\n");
}

#[test]
fn sweep_scal_is_affine_on_hopf() {
    let o = run(&["sweep", "--model", "hopf", "--quantity", "scal", "--t-range", "0:1:0.5", "--points", "3"]);
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for (r, want) in rows.iter().zip([0.25, 0.375, 0.5]) {
        assert!((r[1] - want).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn curvature_json_and_output_file() {
    let path = std::env::temp_dir().join(format!("gauduchon-cli-{}.json", std::process::id()));
    let o = run(&[
        "curvature", "--model", "hopf", "--point", "1,0.5i", "--t", "0.5", "--order", "3", "--format", "json", "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert!((v["chern"]["scal"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["gauduchon"]["scal"].as_f64().unwrap() - 0.375).abs() < 1e-12);
    assert!(v["ric1_closedness"].as_f64().unwrap() < 1e-10);
}

#[test]
fn curvature_from_metric_file() {
    let path = std::env::temp_dir().join(format!("gauduchon-cli-{}.metric", std::process::id()));
    let src = "dim 2\ng[1,1] = 1 + z_1*zb_1\ng[1,2] = 0.1*z_2\n";
    std::fs::write(&path, src).unwrap();
    let o = run(&["curvature", "--metric-file", path.to_str().unwrap(), "--point", "0.3,0.1-0.2i", "--t", "1"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("Chern connection"));
}
