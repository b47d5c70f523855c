use gauduchon_core::jets::{finite_difference_jet, numeric_field_derivative, zbv, zv, FD_STEP};
use gauduchon_core::metric_dsl::{compile, parse_metric_dsl};
use gauduchon_core::models::{sample_points, MODEL_NAMES};
use gauduchon_core::tensorcore::{Frame, IndexLabel, LabeledTensor, ONE, ZERO};
use gauduchon_core::{build_model, evaluate_jet, ChartPoint, MetricJet, ModelSpec, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn all_coeffs(jet: &MetricJet) -> Vec<C64> {
    let n = jet.n;
    (0..n * n).flat_map(|e| jet.entry_jet(e / n, e % n).coeffs().to_vec()).collect()
}

fn beyond_constant_zero(jet: &MetricJet) -> bool {
    let n = jet.n;
    (0..n * n).all(|e| jet.entry_jet(e / n, e % n).coeffs()[1..].iter().all(|z| *z == ZERO))
}

fn spec_for(name: &str) -> ModelSpec {
    match name {
        "iwasawa" => ModelSpec::new(name, 3),
        "hopf_lambda" => ModelSpec::hopf_lambda(3, 0.7),
        "random_poly" => ModelSpec::random_poly(3, 11),
        _ => ModelSpec::new(name, 2),
    }
}

#[test]
fn flat_jets_vanish_beyond_order_zero() {
    let f = build_model(&ModelSpec::new("flat", 2)).unwrap();
    let jet = evaluate_jet(&f, &ChartPoint::new(vec![c(0.3, -1.0), c(2.0, 0.5)]), 3).unwrap();
    assert!(beyond_constant_zero(&jet));
    let fd = finite_difference_jet(&f, &ChartPoint::new(vec![c(0.3, -1.0), c(2.0, 0.5)]), 3, FD_STEP).unwrap();
    assert!(beyond_constant_zero(&fd));
}

#[test]
fn hopf_first_derivative_by_hand() {
    let f = build_model(&ModelSpec::new("hopf", 2)).unwrap();
    let p = ChartPoint::new(vec![ONE, ZERO]);
    let jet = evaluate_jet(&f, &p, 2).unwrap();
    assert!((jet.dz(0, 0, 0) - c(-4.0, 0.0)).norm() < 1e-14);
    let fd = finite_difference_jet(&f, &p, 1, FD_STEP).unwrap();
    assert!((fd.dz(0, 0, 0) - c(-4.0, 0.0)).norm() < 1e-6);
}

#[test]
fn quadratic_entry_mixed_derivative() {
    let f = compile(parse_metric_dsl("dim 1\ng[1,1] = 1 + z_1*zb_1").unwrap());
    let p = ChartPoint::new(vec![c(0.4, 0.2)]);
    let fd = finite_difference_jet(&f, &p, 2, FD_STEP).unwrap();
    assert!((fd.partial(0, 0, &[zv(0), zbv(1, 0)]) - ONE).norm() < 1e-8);
    let jet = evaluate_jet(&f, &p, 2).unwrap();
    assert!((jet.partial(0, 0, &[zv(0), zbv(1, 0)]) - ONE).norm() < 1e-14);
}

#[test]
fn conjugation_symmetry_every_model() {
    for name in MODEL_NAMES {
        let spec = spec_for(name);
        let f = build_model(&spec).unwrap();
        for p in sample_points(&spec, 4, 3) {
            let jet = evaluate_jet(&f, &p, 3).unwrap();
            assert!(jet.conjugation_residual() < 1e-10, "{name}");
        }
    }
}

#[test]
fn jets_match_finite_differences_every_model() {
    for name in MODEL_NAMES {
        let spec = spec_for(name);
        let f = build_model(&spec).unwrap();
        for p in sample_points(&spec, 20, 17) {
            let jet = evaluate_jet(&f, &p, 3).unwrap();
            let fd = finite_difference_jet(&f, &p, 3, FD_STEP).unwrap();
            let rel = jet.relative_difference(&fd, 3);
            assert!(rel[1] < 1e-6 && rel[2] < 1e-6, "{name}: {rel:?}");
            assert!(rel[3] < 1e-4, "{name}: {rel:?}");
        }
    }
}

#[test]
fn dsl_hopf_matches_builtin() {
    let src = "dim 2\ng[1,1] = 4/abs2(z_1,z_2)\ng[2,2] = 4/abs2(z_1,z_2)";
    let dsl = compile(parse_metric_dsl(src).unwrap());
    let builtin = build_model(&ModelSpec::new("hopf", 2)).unwrap();
    let p = ChartPoint::new(vec![ONE, ZERO]);
    let (a, b) = (evaluate_jet(&dsl, &p, 3).unwrap(), evaluate_jet(&builtin, &p, 3).unwrap());
    for (x, y) in all_coeffs(&a).iter().zip(&all_coeffs(&b)) {
        assert!((x - y).norm() < 1e-12);
    }
}

#[test]
fn numeric_derivative_of_linear_field() {
    let fixed = LabeledTensor::from_fn(2, &[IndexLabel::HolDown, IndexLabel::AntiholDown], Frame::Coordinate, |x| {
        c(x[0] as f64 + 1.0, x[1] as f64 - 0.5)
    });
    let field = |q: &ChartPoint| Ok(fixed.scale(q.z[0]));
    let d = numeric_field_derivative(field, &ChartPoint::new(vec![c(0.2, 0.1), c(-1.0, 0.3)]), FD_STEP).unwrap();
    assert!(d[zv(0)].max_diff(&fixed).unwrap() < 1e-8);
    assert!(d[zbv(2, 0)].max_abs() < 1e-8);
    assert!(d[zv(1)].max_abs() < 1e-8);
}

#[test]
fn mixed_partials_commute() {
    let spec = ModelSpec::random_poly(2, 5);
    let f = build_model(&spec).unwrap();
    let p = sample_points(&spec, 1, 1).remove(0);
    let jet = evaluate_jet(&f, &p, 3).unwrap();
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        let a = jet.partial(i, j, &[zv(0), zbv(2, 1), zv(1)]);
        let b = jet.partial(i, j, &[zv(1), zv(0), zbv(2, 1)]);
        assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fubini_study_jets_match_fd(re1 in -1.5f64..1.5, im1 in -1.5f64..1.5, re2 in -1.5f64..1.5, im2 in -1.5f64..1.5) {
        let f = build_model(&ModelSpec::new("fubini_study", 2)).unwrap();
        let p = ChartPoint::new(vec![c(re1, im1), c(re2, im2)]);
        let rel = evaluate_jet(&f, &p, 2).unwrap().relative_difference(&finite_difference_jet(&f, &p, 2, FD_STEP).unwrap(), 2);
        prop_assert!(rel[1] < 1e-6 && rel[2] < 1e-6);
    }
}
