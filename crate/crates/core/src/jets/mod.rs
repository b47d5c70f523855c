//! Metric fields and their derivative jets.
//!
//! A jet is computed in the Wirtinger variables: the `2n` independent
//! variables are `z_1..z_n` followed by `zbar_1..zbar_n`, so a Taylor
//! coefficient times its multi-index factorial is a mixed Wirtinger
//! derivative. The finite-difference oracle works on real coordinates and
//! converts with `d/dz = (d/dx - i d/dy) / 2`.

pub mod taylor;

use crate::error::{Error, Result};
use crate::tensorcore::{CMat, HermitianMatrix, LabeledTensor, C64, I, ZERO};
pub use taylor::{jet_solve, Jet, JetSpace, Scalar, MAX_ORDER};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default finite-difference step, scaled by `max(1, |p|)`.
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub z: Vec<C64>,
}

impl ChartPoint {
    pub fn new(z: Vec<C64>) -> Self {
        ChartPoint { z }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn norm(&self) -> f64 {
        self.z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn zbar(&self) -> Vec<C64> {
        self.z.iter().map(|w| w.conj()).collect()
    }
}

/// Index of the variable `z_a` among the jet variables.
pub fn zv(a: usize) -> usize {
    a
}

/// Index of the variable `zbar_a` among the jet variables.
pub fn zbv(n: usize, a: usize) -> usize {
    n + a
}

/// A metric written once and evaluated on complex numbers or on jets.
/// Only entries with `i <= j` are produced; the rest follow by conjugation.
pub trait GenericMetric: Send + Sync {
    fn dim(&self) -> usize;
    fn name(&self) -> String;
    fn check_domain(&self, _z: &[C64]) -> Result<()> {
        Ok(())
    }
    fn upper<S: Scalar>(&self, z: &[S], zb: &[S]) -> Result<Vec<S>>;
    fn dsl_source(&self) -> Option<String> {
        None
    }
}

/// Object-safe form of [`GenericMetric`].
pub trait MetricSource: Send + Sync {
    fn dim(&self) -> usize;
    fn name(&self) -> String;
    fn check_domain(&self, z: &[C64]) -> Result<()>;
    fn upper_complex(&self, z: &[C64], zb: &[C64]) -> Result<Vec<C64>>;
    fn upper_jet(&self, z: &[Jet], zb: &[Jet]) -> Result<Vec<Jet>>;
    fn dsl_source(&self) -> Option<String>;
}

impl<T: GenericMetric> MetricSource for T {
    fn dim(&self) -> usize {
        GenericMetric::dim(self)
    }
    fn name(&self) -> String {
        GenericMetric::name(self)
    }
    fn check_domain(&self, z: &[C64]) -> Result<()> {
        GenericMetric::check_domain(self, z)
    }
    fn upper_complex(&self, z: &[C64], zb: &[C64]) -> Result<Vec<C64>> {
        self.upper(z, zb)
    }
    fn upper_jet(&self, z: &[Jet], zb: &[Jet]) -> Result<Vec<Jet>> {
        self.upper(z, zb)
    }
    fn dsl_source(&self) -> Option<String> {
        GenericMetric::dsl_source(self)
    }
}

/// Offset of `(i, j)`, `i <= j`, in the packed upper triangle.
pub fn upper_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j);
    i * n - i * (i + 1) / 2 + j
}

#[derive(Clone)]
pub struct MetricField {
    src: Arc<dyn MetricSource>,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MetricField({}, n={})", self.src.name(), self.src.dim())
    }
}

impl MetricField {
    pub fn new(src: impl MetricSource + 'static) -> Self {
        MetricField { src: Arc::new(src) }
    }

    pub fn dim(&self) -> usize {
        self.src.dim()
    }

    pub fn name(&self) -> String {
        self.src.name()
    }

    pub fn dsl_source(&self) -> Option<String> {
        self.src.dsl_source()
    }

    pub fn check_point(&self, p: &ChartPoint) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.dim() });
        }
        if p.z.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::PointOutsideChart("non-finite coordinate".into()));
        }
        self.src.check_domain(&p.z)
    }

    /// Metric matrix `g_{i jbar}` at a point, no positivity check.
    pub fn matrix_raw(&self, z: &[C64]) -> Result<CMat> {
        let n = self.dim();
        let zb: Vec<C64> = z.iter().map(|w| w.conj()).collect();
        let up = self.src.upper_complex(z, &zb)?;
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = up[upper_index(n, i, j)];
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        Ok(m)
    }

    /// Metric at a point, checked Hermitian positive definite.
    pub fn metric_at(&self, p: &ChartPoint) -> Result<HermitianMatrix> {
        self.check_point(p)?;
        let m = self.matrix_raw(&p.z)?;
        check_diagonal_real(&m)?;
        let g = HermitianMatrix::new(m)?;
        match g.unitary_frame() {
            Ok(_) => Ok(g),
            Err(Error::SingularMetric { pivot, .. }) => Err(Error::NonPositiveDefinite(pivot)),
            Err(e) => Err(e),
        }
    }
}

fn check_diagonal_real(m: &CMat) -> Result<()> {
    for i in 0..m.nrows() {
        let v = m[(i, i)];
        if v.im.abs() > 1e-12 * (1.0 + v.re.abs()) {
            return Err(Error::NonHermitianEntry(i + 1));
        }
    }
    Ok(())
}

/// Taylor data of `g_{i jbar}` at a point up to a fixed order.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub n: usize,
    pub order: usize,
    pub point: ChartPoint,
    space: Arc<JetSpace>,
    /// Row-major `n x n`, each a coefficient vector over the monomials.
    coeffs: Vec<Vec<C64>>,
}

impl MetricJet {
    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn value(&self) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| self.coeffs[i * self.n + j][0])
    }

    pub fn metric(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.value())
    }

    pub fn coeff(&self, i: usize, j: usize, m: usize) -> C64 {
        self.coeffs[i * self.n + j][m]
    }

    /// Mixed Wirtinger derivative of `g_{i jbar}` in the listed variables
    /// (see [`zv`] and [`zbv`]).
    pub fn partial(&self, i: usize, j: usize, vars: &[usize]) -> C64 {
        assert!(vars.len() <= self.order);
        let m = self.space.monomial(vars).expect("variable out of range");
        self.coeffs[i * self.n + j][m] * self.space.factorial(m)
    }

    /// `d/dz_a g_{i jbar}`.
    pub fn dz(&self, a: usize, i: usize, j: usize) -> C64 {
        self.partial(i, j, &[zv(a)])
    }

    /// `d/dzbar_a g_{i jbar}`.
    pub fn dzb(&self, a: usize, i: usize, j: usize) -> C64 {
        self.partial(i, j, &[zbv(self.n, a)])
    }

    /// Entry as a jet in the shared space.
    pub fn entry_jet(&self, i: usize, j: usize) -> Jet {
        Jet::from_coeffs(&self.space, self.coeffs[i * self.n + j].clone(), self.order)
    }

    /// Largest violation of `conj(coeff_{ij}(alpha)) = coeff_{ji}(swap alpha)`.
    pub fn conjugation_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                for m in 0..self.space.len() {
                    let a = self.coeff(i, j, m).conj();
                    let b = self.coeff(j, i, self.space.swapped(m));
                    r = r.max((a - b).norm());
                }
            }
        }
        r
    }

    /// Per-order relative difference `max|a - b| / max(1, max|a|)`, for
    /// orders `0..=max_order`.
    pub fn relative_difference(&self, other: &MetricJet, max_order: usize) -> Vec<f64> {
        let top = max_order.min(self.order).min(other.order);
        (0..=top)
            .map(|d| {
                let mut diff: f64 = 0.0;
                let mut scale: f64 = 1.0;
                for e in 0..self.n * self.n {
                    for m in self.space.degree_range(d) {
                        let f = self.space.factorial(m);
                        let a = self.coeffs[e][m] * f;
                        let b = other.coeffs[e][m] * f;
                        diff = diff.max((a - b).norm());
                        scale = scale.max(a.norm());
                    }
                }
                diff / scale
            })
            .collect()
    }
}

/// Jet of the metric at `p` up to `order` (1..=3), by jet arithmetic.
pub fn evaluate_jet(field: &MetricField, p: &ChartPoint, order: usize) -> Result<MetricJet> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidParameter(format!("jet order {order} not in 1..=3")));
    }
    field.metric_at(p)?;
    let n = field.dim();
    let space = JetSpace::get(2 * n, order);
    let z: Vec<Jet> = (0..n).map(|a| Jet::variable(&space, zv(a), p.z[a])).collect();
    let zb: Vec<Jet> = (0..n).map(|a| Jet::variable(&space, zbv(n, a), p.z[a].conj())).collect();
    let up = field.src.upper_jet(&z, &zb)?;
    let mut coeffs = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in i..n {
            let e = &up[upper_index(n, i, j)];
            coeffs[i * n + j] = e.coeffs().to_vec();
            if i != j {
                coeffs[j * n + i] = e.conj_swap().coeffs().to_vec();
            }
        }
    }
    Ok(MetricJet { n, order, point: p.clone(), space, coeffs })
}

/// Finite-difference oracle for [`evaluate_jet`]. Central differences in the
/// real coordinates with step `h = step * max(1, |p|)`, Richardson-extrapolated
/// from `h` and `2h`; third derivatives use a base step ten times larger to
/// balance truncation against round-off.
pub fn finite_difference_jet(field: &MetricField, p: &ChartPoint, order: usize, step: f64) -> Result<MetricJet> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidParameter(format!("jet order {order} not in 1..=3")));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
    }
    field.metric_at(p)?;
    let n = field.dim();
    let space = JetSpace::get(2 * n, order);
    let h0 = step * p.norm().max(1.0);
    let g0 = field.matrix_raw(&p.z)?;
    let mut coeffs = vec![vec![ZERO; space.len()]; n * n];
    for e in 0..n * n {
        coeffs[e][0] = g0[(e / n, e % n)];
    }
    for d in 1..=order {
        let h = if d == 3 { 10.0 * h0 } else { h0 };
        for m in space.degree_range(d) {
            let mut vars = Vec::new();
            for (v, &k) in space.exponents(m).iter().enumerate() {
                vars.extend(std::iter::repeat_n(v, k as usize));
            }
            // One Richardson step cancels the h^2 error term.
            let deriv = (wirtinger_fd(field, &p.z, &vars, h)? * C64::new(4.0, 0.0)
                - wirtinger_fd(field, &p.z, &vars, 2.0 * h)?)
                / C64::new(3.0, 0.0);
            let f = space.factorial(m);
            for e in 0..n * n {
                coeffs[e][m] = deriv[(e / n, e % n)] / f;
            }
        }
    }
    Ok(MetricJet { n, order, point: p.clone(), space, coeffs })
}

/// Real direction for a Wirtinger variable: `(coordinate, dx or dy)`, with
/// its weight in `d/dz = (dx - i dy) / 2` or `d/dzbar = (dx + i dy) / 2`.
fn real_parts(n: usize, var: usize) -> [(usize, C64, C64); 2] {
    let (a, sign) = if var < n { (var, -1.0) } else { (var - n, 1.0) };
    [(a, C64::new(1.0, 0.0), C64::new(0.5, 0.0)), (a, I, C64::new(0.0, 0.5 * sign))]
}

fn wirtinger_fd(field: &MetricField, z: &[C64], vars: &[usize], h: f64) -> Result<CMat> {
    let n = field.dim();
    let k = vars.len();
    let mut total = CMat::zeros(n, n);
    for choice in 0..(1usize << k) {
        let mut weight = C64::new(1.0, 0.0);
        let mut dirs: Vec<(usize, C64)> = Vec::with_capacity(k);
        for (slot, &v) in vars.iter().enumerate() {
            let (a, dir, w) = real_parts(n, v)[(choice >> slot) & 1];
            weight *= w;
            dirs.push((a, dir));
        }
        // Nested central differences along the chosen real directions.
        let mut acc = CMat::zeros(n, n);
        for signs in 0..(1usize << k) {
            let mut q = z.to_vec();
            let mut s = 1.0;
            for (slot, (a, dir)) in dirs.iter().enumerate() {
                let sg = if (signs >> slot) & 1 == 0 { 1.0 } else { -1.0 };
                s *= sg;
                q[*a] += dir * (sg * h);
            }
            acc += field.matrix_raw(&q)? * C64::new(s, 0.0);
        }
        total += acc * (weight / (2.0 * h).powi(k as i32));
    }
    Ok(total)
}

/// First Wirtinger derivatives of a tensor-valued function of the point,
/// by the five-point central stencil (error O(h^4)). Entry `v` of the result is the derivative along
/// jet variable `v` (`z_a` first, then `zbar_a`).
pub fn numeric_field_derivative<F>(f: F, p: &ChartPoint, step: f64) -> Result<Vec<LabeledTensor>>
where
    F: Fn(&ChartPoint) -> Result<LabeledTensor>,
{
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
    }
    let n = p.dim();
    let h = step * p.norm().max(1.0);
    let mut dx = Vec::with_capacity(n);
    let mut dy = Vec::with_capacity(n);
    for a in 0..n {
        for (dir, out) in [(C64::new(1.0, 0.0), &mut dx), (I, &mut dy)] {
            let at = |k: f64| {
                let mut q = p.clone();
                q.z[a] += dir * (k * h);
                f(&q)
            };
            let near = at(1.0)?.sub(&at(-1.0)?)?.scale(C64::new(8.0, 0.0));
            let far = at(2.0)?.sub(&at(-2.0)?)?;
            out.push(near.sub(&far)?.scale(C64::new(1.0 / (12.0 * h), 0.0)));
        }
    }
    let mut res = Vec::with_capacity(2 * n);
    for a in 0..n {
        res.push(dx[a].sub(&dy[a].scale(I))?.scale(C64::new(0.5, 0.0)));
    }
    for a in 0..n {
        res.push(dx[a].add(&dy[a].scale(I))?.scale(C64::new(0.5, 0.0)));
    }
    Ok(res)
}
