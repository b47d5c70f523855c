use gauduchon_core::chern::{chern_package, ChernPackage};
use gauduchon_core::gauduchon::*;
use gauduchon_core::models::{random_unit_vector, sample_points};
use gauduchon_core::tensorcore::{CMat, ONE, ZERO};
use gauduchon_core::{build_model, evaluate_jet, ChartPoint, Error, MetricJet, ModelSpec, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn at(spec: &ModelSpec, p: &ChartPoint) -> (MetricJet, ChernPackage) {
    let jet = evaluate_jet(&build_model(spec).unwrap(), p, 2).unwrap();
    let pkg = chern_package(&jet).unwrap();
    (jet, pkg)
}

fn hopf_e1() -> (MetricJet, ChernPackage) {
    at(&ModelSpec::new("hopf", 2), &ChartPoint::new(vec![ONE, ZERO]))
}

fn random_metric(seed: u64) -> (MetricJet, ChernPackage) {
    let spec = ModelSpec::random_poly(3, seed);
    at(&spec, &sample_points(&spec, 1, seed).remove(0))
}

#[test]
fn presets_by_name() {
    assert_eq!(presets::by_name("chern"), Some(1.0));
    assert_eq!(presets::by_name("bismut"), Some(-1.0));
    assert_eq!(presets::by_name("minimal"), Some(1.0 / 3.0));
    assert_eq!(presets::by_name("nope"), None);
}

#[test]
fn a_tensor_endpoints() {
    let (_, pkg) = random_metric(3);
    assert_eq!(gauduchon_a_tensor(1.0, &pkg).unwrap().max_abs(), 0.0);
    let a = gauduchon_a_tensor(-1.0, &pkg).unwrap();
    let tf = pkg.torsion_frame();
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.get(&[k, i, j]) - tf.get(&[j, i, k]).conj()).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn chern_endpoint_and_kahler_collapse() {
    let (jet, pkg) = random_metric(4);
    let c = curvature_direct(1.0, &jet).unwrap();
    assert!(c.r11.max_diff(&pkg.in_frame(&pkg.curvature)).unwrap() < 1e-10);
    assert!(c.r20.max_abs() < 1e-10);
    let spec = ModelSpec::new("fubini_study", 2);
    let (jet, pkg) = at(&spec, &sample_points(&spec, 1, 1)[0]);
    for t in [-1.0, 0.0, 0.5, 2.0] {
        let c = curvature_closed_form(t, &pkg).unwrap();
        assert!(c.r11.max_diff(&pkg.in_frame(&pkg.curvature)).unwrap() < 1e-10);
        assert!(curvature_direct(t, &jet).unwrap().r20.max_abs() < 1e-10);
    }
}

#[test]
fn curvature_symmetries() {
    for seed in 0..4 {
        let (_, pkg) = random_metric(seed);
        for t in [-1.0, 0.0, 0.5, 2.0] {
            let c = curvature_closed_form(t, &pkg).unwrap();
            assert!(c.hermitian_residual() < 1e-9);
            assert!(c.r20_antisymmetry_residual() < 1e-10);
        }
    }
}

#[test]
fn direct_and_closed_form_agree() {
    for seed in 0..3 {
        let (jet, pkg) = random_metric(20 + seed);
        for t in [-1.0, 0.0, 1.0 / 3.0, 0.5, 2.0] {
            let a = curvature_closed_form(t, &pkg).unwrap();
            let b = curvature_direct(t, &jet).unwrap();
            assert!(a.r11.max_diff(&b.r11).unwrap() < 1e-8);
            assert!(a.r20.max_diff(&b.r20).unwrap() < 1e-8);
        }
    }
}

#[test]
fn corrupted_closed_form_is_caught() {
    let (jet, pkg) = random_metric(5);
    let bad = curvature_closed_form_corrupted(0.0, &pkg).unwrap();
    let good = curvature_direct(0.0, &jet).unwrap();
    assert!(bad.r11.max_diff(&good.r11).unwrap() > 1e-4);
}

#[test]
fn frame_diagonal_entry_loses_torsion_square() {
    let (_, pkg) = hopf_e1();
    let rc = pkg.in_frame(&pkg.curvature).get(&[0, 0, 0, 0]);
    let tf = pkg.torsion_frame();
    let s: f64 = (0..2).map(|r| tf.get(&[0, 0, r]).norm_sqr()).sum();
    for t in [-1.0, 0.0, 0.5, 3.0] {
        let c = curvature_closed_form(t, &pkg).unwrap();
        let want = rc.re - (1.0 - t).powi(2) / 4.0 * s;
        assert!((c.r11.get(&[0, 0, 0, 0]).re - want).abs() < 1e-12, "t = {t}");
    }
}

#[test]
fn hopf_ricci_in_terms_of_p_and_q() {
    let spec = ModelSpec::new("hopf", 2);
    for p in sample_points(&spec, 3, 8) {
        let (_, pkg) = at(&spec, &p);
        for t in [-1.0, 0.0, 0.5, 2.0] {
            let c = curvature_closed_form(t, &pkg).unwrap();
            let pq = pkg.p_term().add(&pkg.q_term()).unwrap().scale(C64::new((t - 1.0) / 2.0, 0.0));
            let want = pkg.in_frame(&pkg.ric(1).add(&pq).unwrap());
            assert!(c.ricci[0].max_diff(&want).unwrap() < 1e-9);
        }
    }
}

#[test]
fn gauduchon_ricci_routes() {
    let (_, pkg) = random_metric(9);
    let r = gauduchon_ricci(0.25, &pkg).unwrap();
    assert!(r.route_residuals.iter().all(|&x| x < RICCI_ROUTE_TOL));
    let c = curvature_closed_form(1.0, &pkg).unwrap();
    for k in 0..4 {
        assert!(c.ricci[k].max_diff(&pkg.in_frame(&pkg.ricci[k])).unwrap() < 1e-10);
    }
}

/// With the general scalar relations, `Scal - Scal~` at `t = 1/2` is
/// `(1/16)(|T|^2 + |tau|^2)`, not `1/8` of it.
#[test]
fn hermitian_conformal_scalar_gap_coefficient() {
    let (_, pkg) = hopf_e1();
    let (s, st) = gauduchon_scalars(presets::HERMITIAN_CONFORMAL, &pkg).unwrap();
    assert!((s - 0.375).abs() < 1e-12 && (st - 0.328125).abs() < 1e-12);
    let q = pkg.quadratics();
    let sum = q.t_norm2 + q.tau_norm2;
    assert!((s - st - sum / 16.0).abs() < 1e-12);
    assert!((s - st - sum / 8.0).abs() > 1e-2);
}

#[test]
fn scalars_at_endpoints() {
    let (_, pkg) = random_metric(12);
    let (s, st) = gauduchon_scalars(1.0, &pkg).unwrap();
    assert!((s - pkg.scal).abs() < 1e-10 && (st - pkg.scal_tilde).abs() < 1e-10);
    let (s0, _) = gauduchon_scalars(0.0, &pkg).unwrap();
    assert!((s0 - pkg.scal_tilde).abs() < 1e-10);
}

#[test]
fn bisectional_single_direction() {
    let (_, pkg) = random_metric(13);
    let c = curvature_closed_form(0.3, &pkg).unwrap();
    let u = CMat::identity(3, 3);
    let lam = [1.0, 0.0, 0.0];
    let h = hsc_frame(&c, &[ONE, ZERO, ZERO]).unwrap();
    assert!((rbc(&c, &u, &lam).unwrap() - h).abs() < 1e-12);
    assert!((altered_rbc(&c, &u, &lam).unwrap() - h).abs() < 1e-12);
    assert!(matches!(rbc(&c, &u, &[0.0, 0.0, 0.0]), Err(Error::ZeroVector)));
}

#[test]
fn altered_gap_vanishes_at_chern_and_on_kahler() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (_, pkg) = random_metric(14);
    let u = CMat::identity(3, 3);
    assert!(altered_gap(1.0, &pkg, &u, &[0.3, -1.0, 2.0]).unwrap().abs() < 1e-14);
    let spec = ModelSpec::new("fubini_study", 2);
    let (_, fs) = at(&spec, &sample_points(&spec, 1, 2)[0]);
    let w = random_unit_vector(&mut rng, 2);
    let u = CMat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => w[0],
        (1, 0) => w[1],
        (0, 1) => -w[1].conj(),
        _ => w[0].conj(),
    });
    assert!(altered_gap(-1.0, &fs, &u, &[1.0, 0.5]).unwrap().abs() < 1e-14);
}

#[test]
fn altered_gap_strict_on_hopf() {
    let (_, pkg) = hopf_e1();
    let chk = altered_hsc_check(-1.0, &pkg, &CMat::identity(2, 2), &[1.0, 1.0], 1e-8).unwrap();
    assert!(chk.gap > 1e-4);
    assert!(chk.residual < 1e-12);
}

/// The gap identity holds for every sign pattern of lambda, but the gap
/// itself can be negative once lambda has mixed signs.
#[test]
fn altered_gap_negative_with_mixed_signs() {
    let spec = ModelSpec::new("iwasawa", 3);
    let (_, pkg) = at(&spec, &ChartPoint::new(vec![C64::new(0.4, 0.1), ZERO, ZERO]));
    let mut least = f64::INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let m = CMat::from_fn(3, 3, |_, _| C64::new(rand::Rng::gen::<f64>(&mut rng) - 0.5, rand::Rng::gen::<f64>(&mut rng) - 0.5));
        let u = m.qr().q();
        let lam = [1.0, -1.0, 0.5];
        let chk = altered_hsc_check(-1.0, &pkg, &u, &lam, 1e-8).unwrap();
        assert!(chk.residual < 1e-10);
        least = least.min(chk.gap);
    }
    assert!(least < -1e-3, "{least}");
}

#[test]
fn hsc_extrema_examples() {
    let flat = build_model(&ModelSpec::new("flat", 2)).unwrap();
    let e = hsc_extrema(&flat, &[ChartPoint::new(vec![ONE, ONE])], 0.0, 2, 1).unwrap();
    assert_eq!((e.min, e.max), (0.0, 0.0));
    let spec = ModelSpec::new("hopf", 2);
    let e = hsc_extrema(&build_model(&spec).unwrap(), &sample_points(&spec, 3, 1), 1.0, 3, 1).unwrap();
    assert!(e.min >= -1e-9 && (e.max - 0.25).abs() < 1e-6);
    let fs = build_model(&ModelSpec::new("fubini_study", 1)).unwrap();
    let pts = sample_points(&ModelSpec::new("fubini_study", 1), 10, 4);
    let e = hsc_extrema(&fs, &pts, 1.0, 1, 1).unwrap();
    assert!(e.max - e.min < 1e-8);
}

#[test]
fn berger_flat_and_exact() {
    let flat = ModelSpec::new("flat", 2);
    let (_, pkg) = at(&flat, &ChartPoint::new(vec![ONE, ZERO]));
    let c = curvature_closed_form(0.0, &pkg).unwrap();
    let b = berger_average(&c, &[ONE, ONE], BergerPairing::Bisectional, AverageOver::Second, BergerMode::Exact).unwrap();
    assert_eq!((b.average, b.reference), (ZERO, ZERO));
    let (_, pkg) = hopf_e1();
    let c = curvature_closed_form(0.0, &pkg).unwrap();
    let v = [C64::new(0.3, 0.1), C64::new(-0.2, 0.7)];
    for pairing in [BergerPairing::Bisectional, BergerPairing::Altered] {
        for over in [AverageOver::First, AverageOver::Second] {
            let b = berger_average(&c, &v, pairing, over, BergerMode::Exact).unwrap();
            assert!(b.deviation < 1e-10);
            let mc = berger_average(&c, &v, pairing, over, BergerMode::MonteCarlo { samples: 20_000, seed: 5 }).unwrap();
            assert!(mc.deviation <= 4.0 * mc.std_error.unwrap() + 1e-12);
        }
    }
}

#[test]
fn torsion_decomposition_examples() {
    let (jet, _) = hopf_e1();
    let d = torsion_decomposition(-1.0, &jet).unwrap();
    assert!(d.t11_b_norm < 1e-9 && d.residual_c < 1e-9);
    let d = torsion_decomposition(0.5, &jet).unwrap();
    assert!(d.residual_20 < 1e-9);
    let full = full_torsion(0.2, &jet).unwrap();
    let (a, b, c) = (full.part_20(), full.part_02(), full.part_11());
    let mut worst: f64 = 0.0;
    for (k, x) in full.data.iter().enumerate() {
        worst = worst.max((x - a.data[k] - b.data[k] - c.data[k]).norm());
    }
    assert!(worst < 1e-10);
    let spec = ModelSpec::new("fubini_study", 2);
    let (jet, _) = at(&spec, &sample_points(&spec, 1, 3)[0]);
    assert!(full_torsion(-1.0, &jet).unwrap().norm2() < 1e-20);
}

#[test]
fn torsion_profile_vertex() {
    for spec in [ModelSpec::new("hopf", 2), ModelSpec::new("iwasawa", 3)] {
        for p in sample_points(&spec, 5, 6) {
            let (jet, _) = at(&spec, &p);
            let prof = torsion_norm_profile(&jet, &[-1.0, 0.0, 1.0, 2.0]).unwrap();
            assert!((prof.vertex - 1.0 / 3.0).abs() < 1e-3);
        }
    }
    let spec = ModelSpec::new("fubini_study", 2);
    let (jet, _) = at(&spec, &sample_points(&spec, 1, 3)[0]);
    assert!(matches!(torsion_norm_profile(&jet, &[-1.0, 0.0, 1.0]), Err(Error::DegenerateFit(_))));
}

#[test]
fn lck_surface_identity() {
    let spec = ModelSpec::new("hopf", 2);
    for p in sample_points(&spec, 10, 2) {
        let (_, pkg) = at(&spec, &p);
        let b = curvature_closed_form(presets::BISMUT, &pkg).unwrap().ricci[0].to_matrix();
        let r2 = pkg.in_frame(pkg.ric(2)).to_matrix();
        let shift = CMat::identity(2, 2) * C64::new(pkg.scal_tilde - pkg.scal, 0.0);
        assert!((b - r2 - shift).camax() < 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hsc_duality_and_monotonicity(t in -4.0f64..4.0, a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, seed in 0u64..50) {
        let (_, pkg) = random_metric(seed);
        let v = [C64::new(a, b), C64::new(c, 0.3), C64::new(0.1, -a)];
        let ct = curvature_closed_form(t, &pkg).unwrap();
        let cd = curvature_closed_form(2.0 - t, &pkg).unwrap();
        let c1 = curvature_closed_form(1.0, &pkg).unwrap();
        let h = hsc(&ct, &v).unwrap();
        prop_assert!((h - hsc(&cd, &v).unwrap()).abs() < 1e-10);
        prop_assert!(h <= hsc(&c1, &v).unwrap() + 1e-10);
    }
}
