use gauduchon_core::chern::chern_package;
use gauduchon_core::gauduchon::{curvature_closed_form, presets};
use gauduchon_core::models::{lambda_star, random_unit_vector, sample_points, HOPF_RADII};
use gauduchon_core::tensorcore::{from_unitary_frame, ONE, ZERO};
use gauduchon_core::{build_model, evaluate_jet, ChartPoint, Error, ModelSpec, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The closed-form family is `omega_0 + 4 lambda 0Ric1(omega_0)`, with the
/// Ricci form computed by the curvature code from the standard metric.
#[test]
fn hopf_lambda_pinned_to_lichnerowicz_ricci() {
    for n in [2usize, 3] {
        let base = build_model(&ModelSpec::new("hopf", n)).unwrap();
        for lam in [-0.5, 0.3, 1.7] {
            let fam = build_model(&ModelSpec::hopf_lambda(n, lam)).unwrap();
            for p in sample_points(&ModelSpec::new("hopf", n), 4, 7) {
                let pkg = chern_package(&evaluate_jet(&base, &p, 2).unwrap()).unwrap();
                let c = curvature_closed_form(presets::LICHNEROWICZ, &pkg).unwrap();
                let ric = from_unitary_frame(&c.ricci[0], &c.frame).unwrap().to_matrix();
                let want = pkg.metric.matrix() + ric * C64::new(4.0 * lam, 0.0);
                let got = fam.metric_at(&p).unwrap();
                assert!((got.matrix() - want).camax() < 1e-9, "n={n} lambda={lam}");
            }
        }
    }
}

#[test]
fn hopf_lambda_zero_is_hopf() {
    let a = build_model(&ModelSpec::hopf_lambda(3, 0.0)).unwrap();
    let b = build_model(&ModelSpec::new("hopf", 3)).unwrap();
    for p in sample_points(&ModelSpec::new("hopf", 3), 3, 2) {
        let (ja, jb) = (evaluate_jet(&a, &p, 3).unwrap(), evaluate_jet(&b, &p, 3).unwrap());
        assert!(ja.relative_difference(&jb, 3).iter().all(|&r| r == 0.0));
    }
}

#[test]
fn model_values_at_fixed_points() {
    let hopf = build_model(&ModelSpec::new("hopf", 2)).unwrap();
    let g = hopf.metric_at(&ChartPoint::new(vec![ONE, ZERO])).unwrap();
    assert!((g.matrix() - gauduchon_core::CMat::identity(2, 2) * C64::new(4.0, 0.0)).camax() < 1e-15);
    let iw = build_model(&ModelSpec::new("iwasawa", 3)).unwrap();
    let g0 = iw.metric_at(&ChartPoint::new(vec![ZERO; 3])).unwrap();
    assert!((g0.matrix() - gauduchon_core::CMat::identity(3, 3)).camax() < 1e-15);
    let g1 = iw.metric_at(&ChartPoint::new(vec![ONE, ZERO, ZERO])).unwrap();
    let m = g1.matrix();
    assert_eq!((m[(1, 1)], m[(2, 2)], m[(1, 2)]), (C64::new(2.0, 0.0), ONE, -ONE));
}

#[test]
fn lambda_star_examples() {
    assert_eq!(lambda_star(0.0, 2).unwrap(), -0.5);
    assert_eq!(lambda_star(-1.0, 2).unwrap(), 0.0);
    assert!(matches!(lambda_star(1.0, 2), Err(Error::OutOfRange(_))));
    assert!(matches!(lambda_star(0.0, 1), Err(Error::InvalidParameter(_))));
}

#[test]
fn model_validation() {
    assert!(build_model(&ModelSpec::hopf_lambda(2, -1.0)).is_err());
    assert!(build_model(&ModelSpec::new("iwasawa", 2)).is_err());
    assert!(build_model(&ModelSpec::new("klein", 2)).is_err());
    let hopf = build_model(&ModelSpec::new("hopf", 2)).unwrap();
    assert!(matches!(hopf.check_point(&ChartPoint::new(vec![ZERO, ZERO])), Err(Error::PointOutsideChart(_))));
}

#[test]
fn sampling_is_seeded_and_in_domain() {
    let spec = ModelSpec::new("hopf", 3);
    assert_eq!(sample_points(&spec, 1, 9), sample_points(&spec, 1, 9));
    assert_ne!(sample_points(&spec, 4, 9), sample_points(&spec, 4, 10));
    for p in sample_points(&spec, 200, 1) {
        assert!(p.norm() >= HOPF_RADII.0 - 1e-12 && p.norm() <= HOPF_RADII.1 + 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let v = random_unit_vector(&mut rng, 4);
    assert!((v.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-14);
}
