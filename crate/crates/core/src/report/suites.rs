use super::{Bound, CheckResult, Status, VerificationReport, VerifyConfig};
use crate::chern::{
    chern_package, ddbar_omega_trace, liu_yang_defect_with, liu_yang_residual, ric1_closedness_exact,
    ric1_closedness_numeric, ChernPackage,
};
use crate::error::{Error, Result};
use crate::gauduchon::*;
use crate::jets::{evaluate_jet, finite_difference_jet, ChartPoint, MetricField, MetricJet, FD_STEP};
use crate::models::{build_model, lambda_star, random_unit_vector, sample_points, ModelSpec};
use crate::tensorcore::{from_unitary_frame, CMat, C64, ONE, ZERO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

pub const SUITES: [&str; 15] = [
    "jets",
    "kahler",
    "dual-route",
    "connection",
    "hopf-ricci-flat",
    "ricci-routes",
    "scalars",
    "hsc",
    "torsion",
    "balanced",
    "vertex",
    "bianchi",
    "berger",
    "liu-yang",
    "lck",
];

const T_GRID: [f64; 6] = [-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0, 2.0];

type Outcome = Result<(f64, Option<String>)>;

struct Task {
    id: String,
    suite: &'static str,
    description: String,
    anchor: &'static str,
    tolerance: f64,
    bound: Bound,
    run: Box<dyn Fn() -> Outcome + Send + Sync>,
}

impl Task {
    fn new(
        suite: &'static str,
        id: String,
        description: impl Into<String>,
        anchor: &'static str,
        tolerance: f64,
        run: impl Fn() -> Outcome + Send + Sync + 'static,
    ) -> Self {
        Task {
            id: format!("{suite}/{id}"),
            suite,
            description: description.into(),
            anchor,
            tolerance,
            bound: Bound::AtMost,
            run: Box::new(run),
        }
    }

    fn at_least(mut self) -> Self {
        self.bound = Bound::AtLeast;
        self
    }

    fn execute(&self) -> CheckResult {
        let start = Instant::now();
        let out = (self.run)();
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let (residual, detail, status) = match out {
            Ok((r, d)) => {
                let ok = match self.bound {
                    Bound::AtMost => r <= self.tolerance,
                    Bound::AtLeast => r >= self.tolerance,
                };
                (Some(r), d, if ok { Status::Pass } else { Status::Fail })
            }
            Err(e) => (None, Some(e.to_string()), Status::Fail),
        };
        CheckResult {
            id: self.id.clone(),
            suite: self.suite.into(),
            description: self.description.clone(),
            anchor: self.anchor.into(),
            residual,
            tolerance: self.tolerance,
            bound: self.bound,
            status,
            detail,
            elapsed_ms: Some(elapsed),
        }
    }
}

/// Run the configured suite(s); check failures are recorded, only an
/// invalid configuration is an error.
pub fn run_verification_suite(config: &VerifyConfig) -> Result<VerificationReport> {
    config.validate()?;
    let start = Instant::now();
    let names: Vec<&str> = if config.suite == "all" { SUITES.to_vec() } else { vec![config.suite.as_str()] };
    let tasks: Vec<Task> = names.iter().flat_map(|s| tasks_for(s, config)).collect();
    let checks: Vec<CheckResult> = tasks.par_iter().map(Task::execute).collect();
    Ok(VerificationReport::assemble(config.clone(), checks, start.elapsed().as_secs_f64() * 1e3))
}

fn tasks_for(suite: &str, cfg: &VerifyConfig) -> Vec<Task> {
    match suite {
        "jets" => jets_suite(cfg),
        "kahler" => kahler_suite(cfg),
        "dual-route" => dual_route_suite(cfg),
        "connection" => connection_suite(cfg),
        "hopf-ricci-flat" => hopf_ricci_flat_suite(cfg),
        "ricci-routes" => ricci_routes_suite(cfg),
        "scalars" => scalars_suite(cfg),
        "hsc" => hsc_suite(cfg),
        "torsion" => torsion_suite(cfg),
        "balanced" => balanced_suite(cfg),
        "vertex" => vertex_suite(cfg),
        "bianchi" => bianchi_suite(cfg),
        "berger" => berger_suite(cfg),
        "liu-yang" => liu_yang_suite(cfg),
        "lck" => lck_suite(cfg),
        _ => Vec::new(),
    }
}

/// Models of the main grid: non-Kahler, balanced, Kahler and random.
pub(crate) fn grid_models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::new("hopf", 2),
        ModelSpec::new("hopf", 3),
        ModelSpec::hopf_lambda(2, -0.5),
        ModelSpec::new("iwasawa", 3),
        ModelSpec::new("fubini_study", 2),
        ModelSpec::random_poly(3, 1),
        ModelSpec::random_poly(3, 2),
        ModelSpec::random_poly(2, 3),
    ]
}

/// Seed for the sample points of one model, mixed from the run seed.
pub(crate) fn point_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn points_for(spec: &ModelSpec, count: usize, seed: u64) -> Vec<ChartPoint> {
    sample_points(spec, count, point_seed(seed, &spec.label()))
}

fn t_label(t: f64) -> String {
    if (t - 1.0 / 3.0).abs() < 1e-12 {
        "1/3".into()
    } else {
        format!("{t}")
    }
}

fn package(field: &MetricField, p: &ChartPoint, order: usize) -> Result<(MetricJet, ChernPackage)> {
    let jet = evaluate_jet(field, p, order)?;
    let pkg = chern_package(&jet)?;
    Ok((jet, pkg))
}

/// Max of `f` over the sample points of a model.
fn max_over_points(
    spec: &ModelSpec,
    count: usize,
    seed: u64,
    order: usize,
    f: impl Fn(&MetricField, &ChartPoint, &MetricJet, &ChernPackage) -> Result<f64>,
) -> Outcome {
    let field = build_model(spec)?;
    let mut worst: f64 = 0.0;
    for p in points_for(spec, count, seed) {
        let (jet, pkg) = package(&field, &p, order)?;
        let r = f(&field, &p, &jet, &pkg)?;
        if r.is_nan() {
            return Err(Error::ConsistencyFailure { what: "residual is NaN".into(), residual: r, tol: 0.0 });
        }
        worst = worst.max(r);
    }
    Ok((worst, None))
}

fn jets_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut models = grid_models();
    models.push(ModelSpec::new("flat", 2));
    models.push(ModelSpec::new("fubini_study", 3));
    let mut out = Vec::new();
    for spec in models {
        let seed = cfg.seed;
        out.push(Task::new(
            "jets",
            spec.label(),
            "jet derivatives of orders 1 and 2 against finite differences at 20 points",
            "jets.finite_difference_agreement",
            1e-6,
            move || {
                max_over_points(&spec, 20, seed, 2, |field, p, jet, _| {
                    let fd = finite_difference_jet(field, p, 2, FD_STEP)?;
                    let rel = jet.relative_difference(&fd, 2);
                    Ok(rel[1].max(rel[2]))
                })
            },
        ));
    }
    out
}

fn kahler_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for spec in [ModelSpec::new("flat", 2), ModelSpec::new("fubini_study", 2), ModelSpec::new("fubini_study", 3)] {
        let (pts, seed) = (cfg.points, cfg.seed);
        let s1 = spec.clone();
        out.push(Task::new(
            "kahler",
            format!("{}/torsion-and-ricci", spec.label()),
            "Kahler metric: Chern torsion and d omega vanish, the four Chern Riccis coincide",
            "chern.kahler_detectors",
            cfg.scaled(1e-10),
            move || {
                max_over_points(&s1, pts, seed, 2, |_, _, jet, pkg| {
                    let mut r = pkg.torsion.max_abs().max(crate::chern::d_omega(jet).max_abs());
                    for k in 1..4 {
                        r = r.max(pkg.ricci[0].max_diff(&pkg.ricci[k])?);
                    }
                    Ok(r)
                })
            },
        ));
        let s2 = spec.clone();
        out.push(Task::new(
            "kahler",
            format!("{}/t-independence", spec.label()),
            "Kahler metric: every Gauduchon curvature equals the Chern curvature and R20 vanishes",
            "gauduchon.kahler_collapse",
            cfg.scaled(1e-10),
            move || {
                max_over_points(&s2, pts, seed, 2, |_, _, jet, pkg| {
                    let rc = pkg.in_frame(&pkg.curvature);
                    let mut r: f64 = 0.0;
                    for t in [-1.0, 0.0, 2.0] {
                        let c = curvature_direct(t, jet)?;
                        r = r.max(c.r11.max_diff(&rc)?).max(c.r20.max_abs());
                    }
                    Ok(r)
                })
            },
        ));
    }
    out
}

fn dual_route_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for spec in grid_models() {
        for t in T_GRID {
            let (pts, seed, corrupt) = (cfg.points, cfg.seed, cfg.corrupt_closed_form);
            let spec = spec.clone();
            out.push(Task::new(
                "dual-route",
                format!("{}/t={}", spec.label(), t_label(t)),
                "curvature from the A-field derivative against the closed form (R11 and R20)",
                "gauduchon.curvature_closed_form",
                cfg.scaled(1e-8),
                move || {
                    max_over_points(&spec, pts, seed, 2, |_, _, jet, pkg| {
                        let cf = if corrupt { curvature_closed_form_corrupted(t, pkg)? } else { curvature_closed_form(t, pkg)? };
                        let d = curvature_direct(t, jet)?;
                        Ok(cf.r11.max_diff(&d.r11)?.max(cf.r20.max_diff(&d.r20)?))
                    })
                },
            ));
        }
    }
    out
}

fn connection_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for spec in grid_models() {
        let (pts, seed) = (cfg.points, cfg.seed);
        let s1 = spec.clone();
        out.push(Task::new(
            "connection",
            format!("{}/affine-in-t", spec.label()),
            "connection coefficients satisfy tnabla = t 1nabla + (1-t) 0nabla",
            "gauduchon.line_interpolation",
            cfg.scaled(1e-12),
            move || {
                max_over_points(&s1, pts, seed, 2, |_, _, jet, _| {
                    let c1 = connection_coefficients(1.0, jet)?;
                    let c0 = connection_coefficients(0.0, jet)?;
                    let mut r: f64 = 0.0;
                    for t in [-1.0, 0.5, 2.0] {
                        let ct = connection_coefficients(t, jet)?;
                        for i in 0..jet.n {
                            let h = &c1.hol[i] * C64::new(t, 0.0) + &c0.hol[i] * C64::new(1.0 - t, 0.0);
                            let a = &c1.antihol[i] * C64::new(t, 0.0) + &c0.antihol[i] * C64::new(1.0 - t, 0.0);
                            r = r.max((&ct.hol[i] - h).camax()).max((&ct.antihol[i] - a).camax());
                        }
                    }
                    Ok(r)
                })
            },
        ));
        let s2 = spec.clone();
        out.push(Task::new(
            "connection",
            format!("{}/curvature-from-connection", spec.label()),
            "closed-form curvature against X(w_Y) - Y(w_X) + [w_X, w_Y] from the connection matrices",
            "gauduchon.curvature_closed_form",
            cfg.scaled(1e-8),
            move || {
                max_over_points(&s2, pts, seed, 2, |_, _, jet, pkg| {
                    let mut r: f64 = 0.0;
                    for t in [-1.0, 0.5, 2.0] {
                        let cf = curvature_closed_form(t, pkg)?;
                        let (r11, r20) = curvature_from_connection_matrices(t, jet)?;
                        r = r.max(cf.r11.max_diff(&r11)?).max(cf.r20.max_diff(&r20)?);
                    }
                    Ok(r)
                })
            },
        ));
    }
    out
}

/// `alpha = i d dbar log|z|^2` in coordinates.
pub(crate) fn hopf_alpha(z: &[C64]) -> CMat {
    let n = z.len();
    let r2: f64 = z.iter().map(|w| w.norm_sqr()).sum();
    CMat::from_fn(n, n, |i, j| {
        let d = if i == j { ONE } else { ZERO };
        d / r2 - z[i].conj() * z[j] / (r2 * r2)
    })
}

fn hopf_ricci_flat_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for n in [2usize, 3] {
        for t in [-1.0, 0.0, 1.0 / 3.0, 0.5] {
            let seed = cfg.seed;
            out.push(Task::new(
                "hopf-ricci-flat",
                format!("n={n}/t={}/vanishing", t_label(t)),
                "first Gauduchon Ricci form of the Hopf metric at lambda* vanishes",
                "models.hopf_ricci_flat_lambda",
                cfg.scaled(1e-8),
                move || {
                    let spec = ModelSpec::hopf_lambda(n, lambda_star(t, n)?);
                    max_over_points(&spec, 10, seed, 2, |_, _, _, pkg| Ok(curvature_closed_form(t, pkg)?.ricci[0].max_abs()))
                },
            ));
            out.push(Task::new(
                "hopf-ricci-flat",
                format!("n={n}/t={}/proportionality", t_label(t)),
                "tRic1 of the Hopf family equals ((n(1+l) + (t-1)(n-1))/(1+l)) alpha, relative error",
                "models.hopf_family_ricci",
                1e-6,
                move || {
                    let mut worst: f64 = 0.0;
                    for lam in [-0.85, -0.3, 0.4, 1.1, 2.0] {
                        let spec = ModelSpec::hopf_lambda(n, lam);
                        let k = (n as f64 * (1.0 + lam) + (t - 1.0) * (n as f64 - 1.0)) / (1.0 + lam);
                        let (r, _) = max_over_points(&spec, 3, seed, 2, |_, p, _, pkg| {
                            let c = curvature_closed_form(t, pkg)?;
                            let ric = from_unitary_frame(&c.ricci[0], &c.frame)?.to_matrix();
                            let want = hopf_alpha(&p.z) * C64::new(k, 0.0);
                            Ok((&ric - &want).camax() / want.camax().max(1e-300))
                        })?;
                        worst = worst.max(r);
                    }
                    Ok((worst, None))
                },
            ));
        }
    }
    out
}

fn ricci_routes_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for spec in grid_models() {
        for t in T_GRID {
            let (pts, seed) = (cfg.points, cfg.seed);
            let spec = spec.clone();
            out.push(Task::new(
                "ricci-routes",
                format!("{}/t={}", spec.label(), t_label(t)),
                "four Gauduchon Riccis by traces, from Chern Riccis, and from P, Q",
                "gauduchon.ricci_relations",
                cfg.scaled(1e-7),
                move || {
                    max_over_points(&spec, pts, seed, 2, |_, _, _, pkg| {
                        let c = curvature_closed_form(t, pkg)?;
                        Ok(ricci_route_disagreement(&c, pkg)?.iter().cloned().fold(0.0, f64::max))
                    })
                },
            ));
        }
    }
    out
}

fn scalars_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for spec in grid_models() {
        let (pts, seed) = (cfg.points, cfg.seed);
        let s1 = spec.clone();
        out.push(Task::new(
            "scalars",
            format!("{}/relations", spec.label()),
            "tScal = t Scal + (1-t) Scal~ and tScal~ = t Scal~ + (1-t) Scal - ((1-t)^2/4)(|T|^2 + |tau|^2)",
            "gauduchon.scalar_relations",
            cfg.scaled(1e-8),
            move || {
                max_over_points(&s1, pts, seed, 2, |_, _, _, pkg| {
                    let mut r: f64 = 0.0;
                    for t in T_GRID {
                        r = r.max(scalar_identities(&curvature_closed_form(t, pkg)?, pkg).residual);
                    }
                    Ok(r)
                })
            },
        ));
        let s2 = spec.clone();
        out.push(Task::new(
            "scalars",
            format!("{}/lichnerowicz", spec.label()),
            "Lichnerowicz scalar curvature equals the Chern Scal~",
            "gauduchon.scalar_relations",
            cfg.scaled(1e-8),
            move || max_over_points(&s2, pts, seed, 2, |_, _, _, pkg| Ok((curvature_closed_form(0.0, pkg)?.scal - pkg.scal_tilde).abs())),
        ));
    }
    out
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let m = CMat::from_fn(n, n, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    m.qr().q()
}

fn hsc_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for spec in grid_models() {
        let seed = cfg.seed;
        let s1 = spec.clone();
        let pts = cfg.points;
        out.push(Task::new(
            "hsc",
            format!("{}/duality", spec.label()),
            "hsc(t, v) = hsc(2 - t, v) over 100 random (point, v, t)",
            "gauduchon.hsc_duality",
            cfg.scaled(1e-10),
            move || hsc_triples(&s1, seed, |curv_t, curv_dual, _, w| Ok((hsc_frame(curv_t, w)? - hsc_frame(curv_dual, w)?).abs())),
        ));
        let s2 = spec.clone();
        out.push(Task::new(
            "hsc",
            format!("{}/monotonicity", spec.label()),
            "hsc(t, v) - hsc(1, v) over 100 random (point, v, t) never exceeds zero",
            "gauduchon.hsc_monotonicity",
            cfg.scaled(1e-10),
            move || hsc_triples(&s2, seed, |curv_t, _, chern, w| Ok(hsc_frame(curv_t, w)? - hsc_frame(chern, w)?)),
        ));
        let s3 = spec.clone();
        out.push(Task::new(
            "hsc",
            format!("{}/altered-gap", spec.label()),
            "altered HSC at t equals the Chern value minus the torsion gap",
            "gauduchon.altered_hsc_gap",
            cfg.scaled(1e-8),
            move || {
                let field = build_model(&s3)?;
                let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, &s3.label()) ^ 0xa1);
                let mut worst: f64 = 0.0;
                let mut min_gap = f64::INFINITY;
                for p in points_for(&s3, pts, seed) {
                    let (_, pkg) = package(&field, &p, 2)?;
                    let chern = curvature_closed_form(1.0, &pkg)?;
                    for _ in 0..4 {
                        let t = rng.gen::<f64>() * 6.0 - 3.0;
                        let u = random_unitary(&mut rng, pkg.n);
                        let lam: Vec<f64> = (0..pkg.n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
                        let ct = curvature_closed_form(t, &pkg)?;
                        let gap = altered_gap(t, &pkg, &u, &lam)?;
                        let r = altered_hsc(&ct, &u, &lam)? - altered_hsc(&chern, &u, &lam)? + gap;
                        worst = worst.max(r.abs());
                        min_gap = min_gap.min(gap);
                    }
                }
                Ok((worst, Some(format!("sampled minimum gap {min_gap:.3e}"))))
            },
        ));
    }
    out.push(Task::new(
        "hsc",
        "hopf(n=2)/strict-gap".into(),
        "altered HSC gap of the Hopf metric at z = (1,0), t = -1, lambda = (1,1) is strictly positive",
        "gauduchon.altered_hsc_gap",
        1e-4,
        || {
            let field = build_model(&ModelSpec::new("hopf", 2))?;
            let (_, pkg) = package(&field, &ChartPoint::new(vec![ONE, ZERO]), 2)?;
            Ok((altered_gap(-1.0, &pkg, &CMat::identity(2, 2), &[1.0, 1.0])?, None))
        },
    )
    .at_least());
    let seed = cfg.seed;
    out.push(Task::new(
        "hsc",
        "hopf(n=2)/chern-nonnegative".into(),
        "sampled minimum of the Chern HSC of the Hopf metric",
        "gauduchon.hsc_extrema",
        -1e-9,
        move || {
            let spec = ModelSpec::new("hopf", 2);
            let e = hsc_extrema(&build_model(&spec)?, &points_for(&spec, 5, seed), 1.0, 4, seed)?;
            Ok((e.min, Some(format!("max {:.6}", e.max))))
        },
    )
    .at_least());
    out.push(Task::new(
        "hsc",
        "fubini_study(n=2)/constant".into(),
        "spread of the sampled HSC of Fubini-Study",
        "gauduchon.hsc_extrema",
        1e-6,
        move || {
            let spec = ModelSpec::new("fubini_study", 2);
            let e = hsc_extrema(&build_model(&spec)?, &points_for(&spec, 3, seed), 0.5, 4, seed)?;
            Ok((e.max - e.min, Some(format!("value {:.9}", e.min))))
        },
    ));
    out
}

/// 100 triples: 10 points times 10 random (v, t).
fn hsc_triples(
    spec: &ModelSpec,
    seed: u64,
    f: impl Fn(&GauduchonCurvature, &GauduchonCurvature, &GauduchonCurvature, &[C64]) -> Result<f64>,
) -> Outcome {
    let field = build_model(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, &spec.label()) ^ 0x45c);
    let mut worst = f64::NEG_INFINITY;
    for p in points_for(spec, 10, seed) {
        let (_, pkg) = package(&field, &p, 2)?;
        let chern = curvature_closed_form(1.0, &pkg)?;
        for _ in 0..10 {
            let t = rng.gen::<f64>() * 6.0 - 3.0;
            let w = random_unit_vector(&mut rng, pkg.n);
            let ct = curvature_closed_form(t, &pkg)?;
            let cd = curvature_closed_form(2.0 - t, &pkg)?;
            worst = worst.max(f(&ct, &cd, &chern, &w)?);
        }
    }
    Ok((worst, None))
}

fn torsion_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for spec in [ModelSpec::new("hopf", 2), ModelSpec::new("hopf", 3), ModelSpec::new("iwasawa", 3)] {
        for t in T_GRID {
            let (pts, seed) = (cfg.points, cfg.seed);
            let spec = spec.clone();
            out.push(Task::new(
                "torsion",
                format!("{}/t={}", spec.label(), t_label(t)),
                "T11_b = 0, B(T11_c) = ((t-1)/3) d^c omega, B(T20 - T11_c) = d^c omega / 3, T02 = 0",
                "gauduchon.defining_property",
                cfg.scaled(1e-9),
                move || max_over_points(&spec, pts, seed, 2, |_, _, jet, _| Ok(torsion_decomposition(t, jet)?.max_residual())),
            ));
        }
    }
    out
}

fn balanced_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let (pts, seed) = (cfg.points, cfg.seed);
    let iw = ModelSpec::new("iwasawa", 3);
    let iw2 = iw.clone();
    vec![
        Task::new(
            "balanced",
            "iwasawa(n=3)/ric1-t-independent".into(),
            "tRic1 of the balanced Iwasawa metric is the same for t in {-1, 0, 1/2, 1}",
            "gauduchon.balanced_ricci",
            cfg.scaled(1e-9),
            move || {
                max_over_points(&iw, pts, seed, 2, |_, _, _, pkg| {
                    let base = curvature_closed_form(1.0, pkg)?.ricci[0].clone();
                    let mut r: f64 = 0.0;
                    for t in [-1.0, 0.0, 0.5] {
                        r = r.max(curvature_closed_form(t, pkg)?.ricci[0].max_diff(&base)?);
                    }
                    Ok(r)
                })
            },
        ),
        Task::new(
            "balanced",
            "iwasawa(n=3)/tau-and-heart".into(),
            "torsion trace tau and the quadratic T_heart vanish on the Iwasawa metric",
            "chern.balanced_torsion",
            cfg.scaled(1e-10),
            move || {
                max_over_points(&iw2, pts, seed, 2, |_, _, _, pkg| {
                    let q = pkg.quadratics();
                    Ok(q.tau_norm2.sqrt().max(q.heart.camax()))
                })
            },
        ),
        Task::new(
            "balanced",
            "hopf(n=2)/ric1-t-dependent".into(),
            "largest entry of 0Ric1 - 1Ric1 on the non-balanced Hopf metric",
            "gauduchon.balanced_ricci",
            1e-2,
            move || {
                let spec = ModelSpec::new("hopf", 2);
                let field = build_model(&spec)?;
                let mut least = f64::INFINITY;
                for p in points_for(&spec, pts, seed) {
                    let (_, pkg) = package(&field, &p, 2)?;
                    let d = curvature_closed_form(0.0, &pkg)?.ricci[0].max_diff(&curvature_closed_form(1.0, &pkg)?.ricci[0])?;
                    least = least.min(d);
                }
                Ok((least, None))
            },
        )
        .at_least(),
    ]
}

fn vertex_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for spec in [ModelSpec::new("hopf", 2), ModelSpec::new("hopf", 3), ModelSpec::new("iwasawa", 3)] {
        let seed = cfg.seed;
        out.push(Task::new(
            "vertex",
            spec.label(),
            "vertex of the parabola t -> |T(tnabla)|^2 sits at 1/3",
            "gauduchon.minimal_connection",
            1e-3,
            move || {
                max_over_points(&spec, 5, seed, 2, |_, _, jet, _| {
                    let prof = torsion_norm_profile(jet, &[-1.0, -0.5, 0.0, 0.5, 1.0, 1.5])?;
                    Ok((prof.vertex - 1.0 / 3.0).abs())
                })
            },
        ));
    }
    out
}

fn bianchi_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    let mut models = grid_models();
    models.push(ModelSpec::new("flat", 2));
    for spec in models {
        let (pts, seed) = (cfg.points, cfg.seed);
        out.push(Task::new(
            "bianchi",
            format!("{}/chern-bianchi", spec.label()),
            "first Bianchi identity of the Chern connection",
            "chern.bianchi",
            cfg.scaled(1e-8),
            move || max_over_points(&spec, pts, seed, 2, |_, _, _, pkg| Ok(pkg.bianchi_residual())),
        ));
    }
    for spec in [ModelSpec::new("hopf", 2), ModelSpec::new("hopf", 3), ModelSpec::random_poly(3, 1)] {
        let (pts, seed) = (cfg.points, cfg.seed);
        let s1 = spec.clone();
        out.push(Task::new(
            "bianchi",
            format!("{}/d-ric1-numeric", spec.label()),
            "Chern Ric1 field differentiated numerically is d-closed",
            "chern.ric1_closed",
            1e-5,
            move || max_over_points(&s1, pts, seed, 2, |field, p, _, _| ric1_closedness_numeric(field, p, FD_STEP)),
        ));
        out.push(Task::new(
            "bianchi",
            format!("{}/d-ric1-exact", spec.label()),
            "Chern Ric1 is d-closed, differentiated through order-3 jets",
            "chern.ric1_closed",
            cfg.scaled(1e-8),
            move || max_over_points(&spec, pts, seed, 3, |_, _, jet, _| ric1_closedness_exact(jet)),
        ));
    }
    out
}

fn berger_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    let pairs = [
        (BergerPairing::Bisectional, AverageOver::Second, "hbc-ric1"),
        (BergerPairing::Bisectional, AverageOver::First, "hbc-ric2"),
        (BergerPairing::Altered, AverageOver::Second, "altered-ric3"),
        (BergerPairing::Altered, AverageOver::First, "altered-ric4"),
    ];
    for n in [2usize, 3] {
        for t in [1.0, 0.0] {
            for (pairing, over, name) in pairs {
                let (seed, samples) = (cfg.seed, cfg.mc_samples);
                let setup = move || -> Result<(GauduchonCurvature, Vec<C64>)> {
                    let spec = ModelSpec::new("hopf", n);
                    let p = points_for(&spec, 1, seed).remove(0);
                    let (_, pkg) = package(&build_model(&spec)?, &p, 2)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, "berger") ^ n as u64);
                    Ok((curvature_closed_form(t, &pkg)?, random_unit_vector(&mut rng, n)))
                };
                out.push(Task::new(
                    "berger",
                    format!("hopf(n={n})/t={}/{name}/exact", t_label(t)),
                    "sphere average by the exact second moment against the Ricci trace",
                    "gauduchon.berger_average",
                    cfg.scaled(1e-10),
                    move || {
                        let (c, v) = setup()?;
                        Ok((berger_average(&c, &v, pairing, over, BergerMode::Exact)?.deviation, None))
                    },
                ));
                out.push(Task::new(
                    "berger",
                    format!("hopf(n={n})/t={}/{name}/monte-carlo", t_label(t)),
                    "Monte Carlo sphere average, deviation from the Ricci trace in standard errors",
                    "gauduchon.berger_average",
                    3.0,
                    move || {
                        let (c, v) = setup()?;
                        let b = berger_average(&c, &v, pairing, over, BergerMode::MonteCarlo { samples, seed: seed ^ 0xbe })?;
                        // A constant integrand has zero spread; the floor keeps round-off from counting.
                        let se = b.std_error.unwrap_or(0.0) + 1e-12;
                        Ok((b.deviation / se, Some(format!("deviation {:.3e}, standard error {se:.3e}", b.deviation))))
                    },
                ));
            }
        }
    }
    out
}

fn liu_yang_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for s in 0..10u64 {
        let spec = ModelSpec::random_poly(3, 100 + s);
        let (pts, seed) = (cfg.points, cfg.seed);
        out.push(Task::new(
            "liu-yang",
            spec.label(),
            "Ric2 = Ric1 - i Lambda(d dbar omega) - (P + Q) + T_diamond with the frozen Lambda",
            "chern.liu_yang",
            cfg.scaled(1e-8),
            move || max_over_points(&spec, pts, seed, 2, |_, _, jet, pkg| liu_yang_residual(pkg, jet)),
        ));
    }
    let seed = cfg.seed;
    out.push(Task::new(
        "liu-yang",
        "circ-variant-not-closable".into(),
        "best residual over all Lambda scalings when T_circ replaces T_diamond (must stay large)",
        "chern.liu_yang",
        1e-3,
        move || {
            let mut num = ZERO;
            let mut den = 0.0;
            let mut data = Vec::new();
            for s in 0..10u64 {
                let spec = ModelSpec::random_poly(3, 100 + s);
                let field = build_model(&spec)?;
                let p = points_for(&spec, 1, seed).remove(0);
                let (jet, pkg) = package(&field, &p, 2)?;
                let d = liu_yang_defect_with(&pkg, &pkg.quadratics().circ)?;
                let y = pkg.in_frame(&ddbar_omega_trace(&jet)?);
                for (a, b) in d.data.iter().zip(&y.data) {
                    num += b.conj() * a;
                    den += b.norm_sqr();
                }
                data.push((d, y));
            }
            let kappa = num / den;
            let mut worst: f64 = 0.0;
            for (d, y) in &data {
                worst = worst.max(d.sub(&y.scale(kappa))?.max_abs());
            }
            Ok((worst, Some(format!("least-squares scale {kappa:.4}"))))
        },
    )
    .at_least());
    out
}

fn lck_suite(cfg: &VerifyConfig) -> Vec<Task> {
    let seed = cfg.seed;
    vec![Task::new(
        "lck",
        "hopf(n=2)/bismut-ric1".into(),
        "on the Hopf surface bRic1 - Ric2 = (Scal~ - Scal) g",
        "gauduchon.lck_surface_scalar",
        cfg.scaled(1e-7),
        move || {
            max_over_points(&ModelSpec::new("hopf", 2), 10, seed, 2, |_, _, _, pkg| {
                let b = curvature_closed_form(-1.0, pkg)?.ricci[0].to_matrix();
                let r2 = pkg.in_frame(pkg.ric(2)).to_matrix();
                let id = CMat::identity(2, 2) * C64::new(pkg.scal_tilde - pkg.scal, 0.0);
                Ok((b - r2 - id).camax())
            })
        },
    )]
}
