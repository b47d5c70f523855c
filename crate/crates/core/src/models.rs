//! Built-in metrics and point samplers.

use crate::error::{Error, Result};
use crate::jets::{ChartPoint, GenericMetric, MetricField, Scalar};
use crate::metric_dsl::{fmt_complex, parse_metric_dsl};
use crate::tensorcore::{C64, ONE, ZERO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub const MODEL_NAMES: [&str; 6] = ["flat", "fubini_study", "hopf", "hopf_lambda", "iwasawa", "random_poly"];

/// Radii between which points of the Hopf models are sampled.
pub const HOPF_RADII: (f64, f64) = (0.2, 5.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub n: usize,
    pub lambda: f64,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(name: &str, n: usize) -> Self {
        ModelSpec { name: name.into(), n, lambda: 0.0, seed: 0 }
    }

    pub fn hopf_lambda(n: usize, lambda: f64) -> Self {
        ModelSpec { name: "hopf_lambda".into(), n, lambda, seed: 0 }
    }

    pub fn random_poly(n: usize, seed: u64) -> Self {
        ModelSpec { name: "random_poly".into(), n, lambda: 0.0, seed }
    }

    pub fn label(&self) -> String {
        match self.name.as_str() {
            "hopf_lambda" => format!("hopf_lambda(n={}, lambda={})", self.n, self.lambda),
            "random_poly" => format!("random_poly(n={}, seed={})", self.n, self.seed),
            _ => format!("{}(n={})", self.name, self.n),
        }
    }
}

pub fn build_model(spec: &ModelSpec) -> Result<MetricField> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    Ok(match spec.name.as_str() {
        "flat" => MetricField::new(Flat { n }),
        "fubini_study" => MetricField::new(FubiniStudy { n }),
        "hopf" => MetricField::new(Hopf { n, lambda: 0.0 }),
        "hopf_lambda" => {
            if n < 2 {
                return Err(Error::InvalidParameter("hopf_lambda needs n >= 2".into()));
            }
            if !(spec.lambda > -1.0) || !spec.lambda.is_finite() {
                return Err(Error::InvalidParameter(format!("lambda = {} must exceed -1", spec.lambda)));
            }
            MetricField::new(Hopf { n, lambda: spec.lambda })
        }
        "iwasawa" => {
            if n != 3 {
                return Err(Error::InvalidParameter("iwasawa is defined for n = 3".into()));
            }
            MetricField::new(Iwasawa)
        }
        "random_poly" => {
            let src = random_poly_source(n, spec.seed, 0.3, 2);
            MetricField::new(parse_metric_dsl(&src)?.with_name(format!("random_poly[{}]", spec.seed)))
        }
        other => return Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
    })
}

/// Ricci-flat parameter of the Hopf family for the Gauduchon parameter `t`.
pub fn lambda_star(t: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter("t must be finite".into()));
    }
    let l = (t * (1.0 - n as f64) - 1.0) / n as f64;
    if l <= -1.0 {
        return Err(Error::OutOfRange(format!("lambda* = {l} is not > -1 for t = {t}, n = {n}")));
    }
    Ok(l)
}

fn abs2_sum<S: Scalar>(z: &[S], zb: &[S]) -> S {
    let mut s = z[0].clone() * zb[0].clone();
    for k in 1..z.len() {
        s = s + z[k].clone() * zb[k].clone();
    }
    s
}

fn var_list(n: usize, prefix: &str) -> String {
    (1..=n).map(|k| format!("{prefix}_{k}")).collect::<Vec<_>>().join(", ")
}

fn norm2_text(n: usize) -> String {
    (1..=n).map(|k| format!("z_{k}*zb_{k}")).collect::<Vec<_>>().join(" + ")
}

pub struct Flat {
    pub n: usize,
}

impl GenericMetric for Flat {
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        "flat".into()
    }
    fn upper<S: Scalar>(&self, z: &[S], _zb: &[S]) -> Result<Vec<S>> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                out.push(z[0].lift(if i == j { ONE } else { ZERO }));
            }
        }
        Ok(out)
    }
    fn dsl_source(&self) -> Option<String> {
        Some(format!("dim {}\n", self.n))
    }
}

/// `g = d dbar log(1 + |z|^2)`.
pub struct FubiniStudy {
    pub n: usize,
}

impl GenericMetric for FubiniStudy {
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        "fubini_study".into()
    }
    fn upper<S: Scalar>(&self, z: &[S], zb: &[S]) -> Result<Vec<S>> {
        let s = abs2_sum(z, zb) + z[0].lift(ONE);
        let inv = s.recip();
        let inv2 = inv.clone() * inv.clone();
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                let cross = zb[i].clone() * z[j].clone() * inv2.clone();
                out.push(if i == j { inv.clone() - cross } else { -cross });
            }
        }
        Ok(out)
    }
    fn dsl_source(&self) -> Option<String> {
        let s = format!("(1 + {})", norm2_text(self.n));
        let mut src = format!("# Fubini-Study metric in the chart {}\ndim {}\n", var_list(self.n, "z"), self.n);
        for i in 1..=self.n {
            for j in i..=self.n {
                if i == j {
                    src.push_str(&format!("g[{i},{i}] = 1/{s} - zb_{i}*z_{i}/{s}^2\n"));
                } else {
                    src.push_str(&format!("g[{i},{j}] = -zb_{i}*z_{j}/{s}^2\n"));
                }
            }
        }
        Some(src)
    }
}

/// `g_lambda = (4/|z|^2) ((1 + lambda) delta_ij - lambda zbar_i z_j / |z|^2)`
/// on `C^n \ {0}`; `lambda = 0` is the standard Hopf metric.
pub struct Hopf {
    pub n: usize,
    pub lambda: f64,
}

impl GenericMetric for Hopf {
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        if self.lambda == 0.0 {
            "hopf".into()
        } else {
            format!("hopf_lambda[{}]", self.lambda)
        }
    }
    fn check_domain(&self, z: &[C64]) -> Result<()> {
        let r2: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        if r2 < 1e-24 {
            return Err(Error::PointOutsideChart("the Hopf metric is undefined at the origin".into()));
        }
        Ok(())
    }
    fn upper<S: Scalar>(&self, z: &[S], zb: &[S]) -> Result<Vec<S>> {
        let s = abs2_sum(z, zb);
        if s.value().norm() < 1e-24 {
            return Err(Error::PointOutsideChart("the Hopf metric is undefined at the origin".into()));
        }
        let inv = s.recip();
        let c1 = C64::new(4.0 * (1.0 + self.lambda), 0.0);
        let c2 = C64::new(-4.0 * self.lambda, 0.0);
        let inv2 = inv.clone() * inv.clone();
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                let cross = (zb[i].clone() * z[j].clone() * inv2.clone()).scale(c2);
                out.push(if i == j { inv.scale(c1) + cross } else { cross });
            }
        }
        Ok(out)
    }
    fn dsl_source(&self) -> Option<String> {
        let s = format!("({})", norm2_text(self.n));
        let c1 = fmt_complex(C64::new(4.0 * (1.0 + self.lambda), 0.0));
        let c2 = fmt_complex(C64::new(-4.0 * self.lambda, 0.0));
        let mut src = format!("dim {}\n", self.n);
        for i in 1..=self.n {
            for j in i..=self.n {
                let cross = format!("{c2}*zb_{i}*z_{j}/{s}^2");
                if i == j {
                    src.push_str(&format!("g[{i},{i}] = {c1}/{s} + {cross}\n"));
                } else {
                    src.push_str(&format!("g[{i},{j}] = {cross}\n"));
                }
            }
        }
        Some(src)
    }
}

/// Left-invariant metric `|dz1|^2 + |dz2|^2 + |dz3 - z1 dz2|^2`.
pub struct Iwasawa;

impl GenericMetric for Iwasawa {
    fn dim(&self) -> usize {
        3
    }
    fn name(&self) -> String {
        "iwasawa".into()
    }
    fn upper<S: Scalar>(&self, z: &[S], zb: &[S]) -> Result<Vec<S>> {
        let one = z[0].lift(ONE);
        let zero = z[0].lift(ZERO);
        Ok(vec![
            one.clone(),
            zero.clone(),
            zero,
            one.clone() + z[0].clone() * zb[0].clone(),
            -z[0].clone(),
            one,
        ])
    }
    fn dsl_source(&self) -> Option<String> {
        Some("dim 3\ng[2,2] = 1 + z_1*zb_1\ng[2,3] = -z_1\n".into())
    }
}

/// Source text of `g = I + F^dagger F` with `F` a seeded matrix of
/// polynomials in `(z, zbar)`.
pub fn random_poly_source(n: usize, seed: u64, amplitude: f64, degree: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut monomials: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..degree {
        let mut next = Vec::new();
        for m in &frontier {
            let lo = m.last().copied().unwrap_or(0);
            for v in lo..2 * n {
                let mut e = m.clone();
                e.push(v);
                next.push(e);
            }
        }
        monomials.extend(next.iter().cloned());
        frontier = next;
    }
    let scale = amplitude / (2.0f64).sqrt();
    let mut f = vec![vec![String::new(); n]; n];
    for row in f.iter_mut() {
        for entry in row.iter_mut() {
            let terms: Vec<String> = monomials
                .iter()
                .map(|m| {
                    let re: f64 = rng.sample::<f64, _>(StandardNormal) * scale;
                    let im: f64 = rng.sample::<f64, _>(StandardNormal) * scale;
                    let mut t = fmt_complex(C64::new(re, im));
                    for &v in m {
                        if v < n {
                            t.push_str(&format!("*z_{}", v + 1));
                        } else {
                            t.push_str(&format!("*zb_{}", v - n + 1));
                        }
                    }
                    t
                })
                .collect();
            *entry = format!("({})", terms.join(" + "));
        }
    }
    let mut src = format!("# random_poly seed {seed}\ndim {n}\n");
    for i in 0..n {
        for j in i..n {
            let sum: Vec<String> = (0..n).map(|a| format!("conj{}*{}", f[a][i], f[a][j])).collect();
            let delta = if i == j { "1 + " } else { "" };
            src.push_str(&format!("g[{},{}] = {delta}{}\n", i + 1, j + 1, sum.join(" + ")));
        }
    }
    src
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Unit vector drawn uniformly from the sphere in `C^n`.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let r = v.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        if r > 1e-8 {
            return v.into_iter().map(|w| w / r).collect();
        }
    }
}

/// Deterministic sample points inside the domain of the model.
pub fn sample_points(spec: &ModelSpec, count: usize, seed: u64) -> Vec<ChartPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0000_0000_0000);
    let n = spec.n;
    (0..count)
        .map(|_| {
            let dir = random_unit_vector(&mut rng, n);
            let r = match spec.name.as_str() {
                "hopf" | "hopf_lambda" => {
                    let (a, b) = HOPF_RADII;
                    (a.ln() + rng.gen::<f64>() * (b.ln() - a.ln())).exp()
                }
                "random_poly" => 0.7 * rng.gen::<f64>().powf(1.0 / (2 * n) as f64),
                _ => 1.5 * rng.gen::<f64>().powf(1.0 / (2 * n) as f64),
            };
            ChartPoint::new(dir.into_iter().map(|w| w * r).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::evaluate_jet;

    #[test]
    fn lambda_star_values() {
        assert!((lambda_star(0.0, 2).unwrap() + 0.5).abs() < 1e-15);
        assert!(lambda_star(-1.0, 2).unwrap().abs() < 1e-15);
        assert!(matches!(lambda_star(1.0, 2), Err(Error::OutOfRange(_))));
        assert!(matches!(lambda_star(0.0, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn hopf_example_values() {
        let f = build_model(&ModelSpec::new("hopf", 2)).unwrap();
        let p = ChartPoint::new(vec![ONE, ZERO]);
        let j = evaluate_jet(&f, &p, 2).unwrap();
        assert!((j.value()[(0, 0)].re - 4.0).abs() < 1e-14);
        assert!((j.dz(0, 0, 0) - C64::new(-4.0, 0.0)).norm() < 1e-14);
        let origin = ChartPoint::new(vec![ZERO, ZERO]);
        assert!(matches!(f.metric_at(&origin), Err(Error::PointOutsideChart(_))));
    }

    #[test]
    fn iwasawa_entries() {
        let f = build_model(&ModelSpec::new("iwasawa", 3)).unwrap();
        let g = f.matrix_raw(&[ONE, ZERO, ZERO]).unwrap();
        assert_eq!(g[(1, 1)], C64::new(2.0, 0.0));
        assert_eq!(g[(1, 2)], C64::new(-1.0, 0.0));
        assert_eq!(g[(2, 2)], ONE);
        let g = f.matrix_raw(&[C64::new(0.3, 0.4), ZERO, ZERO]).unwrap();
        assert_eq!(g[(1, 2)], C64::new(-0.3, -0.4));
        assert!(build_model(&ModelSpec::new("iwasawa", 2)).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(build_model(&ModelSpec::hopf_lambda(2, -1.0)).is_err());
        assert!(build_model(&ModelSpec::hopf_lambda(1, 0.5)).is_err());
        assert!(build_model(&ModelSpec::new("nope", 2)).is_err());
    }

    #[test]
    fn samples_are_in_domain_and_metrics_positive() {
        for name in MODEL_NAMES {
            let spec = ModelSpec { name: name.into(), n: 3, lambda: 0.7, seed: 4 };
            let f = build_model(&spec).unwrap();
            for p in sample_points(&spec, 8, 1) {
                f.metric_at(&p).unwrap();
                if name.starts_with("hopf") {
                    let r = p.norm();
                    assert!((0.2..=5.0).contains(&r));
                }
            }
        }
    }

    #[test]
    fn random_poly_is_seeded() {
        assert_eq!(random_poly_source(2, 7, 0.3, 2), random_poly_source(2, 7, 0.3, 2));
        assert_ne!(random_poly_source(2, 7, 0.3, 2), random_poly_source(2, 8, 0.3, 2));
    }
}
