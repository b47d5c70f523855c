use gauduchon_core::models::lambda_star;
use gauduchon_core::report::{
    emit_report, emit_table, parse_range, run_verification_suite, sweep, t_grid, Format, Quantity, Status,
    SweepConfig, VerifyConfig, SUITES,
};
use gauduchon_core::ModelSpec;

fn table(model: ModelSpec, quantity: Quantity, grid: Vec<f64>) -> gauduchon_core::report::SweepTable {
    sweep(&SweepConfig { model, quantity, grid, points: 3, seed: 1, breakdown: false }).unwrap()
}

#[test]
fn ranges() {
    assert_eq!(parse_range("-1:1:0.5").unwrap(), (-1.0, 1.0, 0.5));
    assert!(parse_range("0:1").is_err());
    assert!(parse_range("a:1:2").is_err());
    assert_eq!(t_grid(-1.0, 1.0, 0.25).unwrap().len(), 9);
    assert!(t_grid(1.0, 0.0, 0.1).unwrap().is_empty());
    assert!(t_grid(0.0, 1.0, 0.0).is_err());
}

#[test]
fn flat_sweep_is_zero() {
    for q in Quantity::ALL {
        let t = table(ModelSpec::new("flat", 2), q, t_grid(-1.0, 1.0, 0.5).unwrap());
        assert!(t.values.iter().all(|v| v.abs() < 1e-14), "{q:?}");
    }
}

#[test]
fn ricci_flat_only_at_its_own_t() {
    let spec = ModelSpec::hopf_lambda(2, lambda_star(0.0, 2).unwrap());
    let t = table(spec, Quantity::Ric1Norm, t_grid(-1.0, 1.0, 0.25).unwrap());
    for (tv, v) in t.t.iter().zip(&t.values) {
        if tv.abs() < 1e-12 {
            assert!(*v < 1e-10);
        } else {
            assert!(*v > 1e-3, "t = {tv}: {v}");
        }
    }
}

#[test]
fn torsion_norm_convex_with_minimum_nearest_one_third() {
    let t = table(ModelSpec::new("hopf", 2), Quantity::TorsionNorm, t_grid(-1.0, 2.0, 0.1).unwrap());
    let v = &t.values;
    assert!(v.windows(3).all(|w| w[0] + w[2] - 2.0 * w[1] > 0.0));
    let k = (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    assert!((t.t[k] - 1.0 / 3.0).abs() < 0.05 + 1e-9);
}

#[test]
fn empty_sweep_is_header_only() {
    let t = table(ModelSpec::new("hopf", 2), Quantity::Scal, Vec::new());
    assert_eq!(emit_table(&t, Format::Csv).unwrap(), "t,scal\n");
}

#[test]
fn breakdown_columns() {
    let cfg = SweepConfig {
        model: ModelSpec::new("hopf", 2),
        quantity: Quantity::HscMax,
        grid: vec![0.0, 1.0],
        points: 2,
        seed: 0,
        breakdown: true,
    };
    let csv = emit_table(&sweep(&cfg).unwrap(), Format::Csv).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,hsc_max,p0,p1");
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn kahler_and_hopf_ricci_flat_suites_pass() {
    for suite in ["kahler", "hopf-ricci-flat"] {
        let r = run_verification_suite(&VerifyConfig { suite: suite.into(), ..Default::default() }).unwrap();
        assert_eq!(r.status, Status::Pass, "{suite}");
        assert_eq!(r.exit_code(), 0);
    }
}

#[test]
fn corrupted_formula_is_recorded_as_failure() {
    let cfg = VerifyConfig { suite: "dual-route".into(), corrupt_closed_form: true, ..Default::default() };
    let r = run_verification_suite(&cfg).unwrap();
    assert_eq!(r.exit_code(), 1);
    let failed: Vec<_> = r.checks.iter().filter(|c| c.status == Status::Fail).collect();
    assert!(failed.iter().all(|c| c.residual.unwrap() > c.tolerance));
    assert!(failed.iter().any(|c| c.id.starts_with("dual-route/hopf(n=2)")));
    // Kahler metrics have no torsion, so the broken quadratic term is invisible there
    assert!(r.checks.iter().filter(|c| c.id.contains("fubini_study")).all(|c| c.status == Status::Pass));
}

#[test]
fn stable_reports_are_identical() {
    let cfg = VerifyConfig { suite: "berger".into(), seed: 3, stable_output: true, ..Default::default() };
    let a = emit_report(&run_verification_suite(&cfg).unwrap(), Format::Json).unwrap();
    let b = emit_report(&run_verification_suite(&cfg).unwrap(), Format::Json).unwrap();
    assert_eq!(a, b);
    assert!(!a.contains("elapsed_ms"));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, ["checks", "config", "failed", "passed", "schema_version", "skipped", "status", "tool", "version"]);
}

#[test]
fn invalid_configs() {
    for cfg in [
        VerifyConfig { suite: "nope".into(), ..Default::default() },
        VerifyConfig { tol: 0.0, ..Default::default() },
        VerifyConfig { points: 0, ..Default::default() },
    ] {
        assert!(matches!(run_verification_suite(&cfg), Err(gauduchon_core::Error::ConfigError(_))));
    }
    assert!(SUITES.contains(&"liu-yang"));
}

#[test]
fn csv_and_text_reports() {
    let r = run_verification_suite(&VerifyConfig { suite: "lck".into(), stable_output: true, ..Default::default() }).unwrap();
    let csv = emit_report(&r, Format::Csv).unwrap();
    assert!(csv.starts_with("id,suite,status,residual,bound,tolerance,anchor\n"));
    let text = emit_report(&r, Format::Text).unwrap();
    assert!(text.trim_end().ends_with("1 passed, 0 failed, 0 skipped: PASS"));
}
