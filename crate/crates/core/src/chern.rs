//! Chern connection data of a metric jet: Christoffel symbols, torsion,
//! curvature, the four Ricci traces and torsion quadratics.
//!
//! Conventions. `Gamma^k_{ij} = g^{k lbar} d_i g_{j lbar}`,
//! `T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}` and
//! `R_{i jbar k lbar} = -d_i d_jbar g_{k lbar} + g^{p qbar} d_i g_{k qbar} d_jbar g_{p lbar}`.
//! The Ricci traces are
//! `Ric1_{i jbar} = g^{k lbar} R_{i jbar k lbar}`,
//! `Ric2_{k lbar} = g^{i jbar} R_{i jbar k lbar}`,
//! `Ric3_{i lbar} = g^{k jbar} R_{i jbar k lbar}`,
//! `Ric4_{k jbar} = g^{i lbar} R_{i jbar k lbar}`.
//! Torsion quadratics are built from unitary-frame components.

use crate::error::{Error, Result};
use crate::jets::{evaluate_jet, jet_solve, numeric_field_derivative, zbv, zv, ChartPoint, Jet, MetricField, MetricJet};
use crate::tensorcore::{
    to_unitary_frame, CMat, Frame, HermitianMatrix, IndexLabel, LabeledTensor, UnitaryFrame, C64, I, ONE, ZERO,
};
use IndexLabel::*;

/// Coefficient `kappa` in `Lambda(d dbar omega)_{k lbar} = kappa * g^{i jbar} S_{i jbar k lbar}`,
/// where `S` is the antisymmetrised second derivative of the metric (see
/// [`ddbar_omega_trace`]). Fixed by requiring the Liu-Yang Ricci identity to
/// hold on random metrics.
pub const LIU_YANG_LAMBDA: C64 = C64::new(0.0, -1.0);

#[derive(Debug, Clone)]
pub struct ChernPackage {
    pub n: usize,
    pub metric: HermitianMatrix,
    /// `g^{k lbar}` indexed `[k][l]`.
    pub ginv: CMat,
    pub frame: UnitaryFrame,
    /// `Gamma^k_{ij}` with labels `(k, i, j)`.
    pub gamma: LabeledTensor,
    /// `T^k_{ij}` with labels `(k, i, j)`.
    pub torsion: LabeledTensor,
    /// `R_{i jbar k lbar}`.
    pub curvature: LabeledTensor,
    /// `[Ric1, Ric2, Ric3, Ric4]`, each `(hol, antihol)`.
    pub ricci: [LabeledTensor; 4],
    pub scal: f64,
    pub scal_tilde: f64,
    /// `T^l_{ik,j}`, labels `(l, i, k, j)`.
    pub nabla_torsion: LabeledTensor,
    /// `T^l_{ik,jbar}`, labels `(l, i, k, jbar)`.
    pub nabla_bar_torsion: LabeledTensor,
}

impl ChernPackage {
    pub fn ric(&self, k: usize) -> &LabeledTensor {
        &self.ricci[k - 1]
    }

    /// `Ric1 - Ric3`.
    pub fn p_term(&self) -> LabeledTensor {
        self.ricci[0].sub(&self.ricci[2]).unwrap()
    }

    /// `Ric1 - Ric4`.
    pub fn q_term(&self) -> LabeledTensor {
        self.ricci[0].sub(&self.ricci[3]).unwrap()
    }

    pub fn in_frame(&self, t: &LabeledTensor) -> LabeledTensor {
        to_unitary_frame(t, &self.frame).expect("coordinate tensor of matching dimension")
    }

    /// Torsion components in the unitary frame.
    pub fn torsion_frame(&self) -> LabeledTensor {
        self.in_frame(&self.torsion)
    }

    pub fn quadratics(&self) -> TorsionQuadratics {
        torsion_quadratics(&self.torsion_frame())
    }

    /// Largest residual of the Chern Bianchi identity
    /// `T^k_{ji,lbar} = R_{i lbar j}^k - R_{j lbar i}^k`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        let mut rhs = ZERO;
                        for m in 0..n {
                            rhs += (self.curvature.get(&[i, l, j, m]) - self.curvature.get(&[j, l, i, m]))
                                * self.ginv[(k, m)];
                        }
                        let lhs = self.nabla_bar_torsion.get(&[k, j, i, l]);
                        r = r.max((lhs - rhs).norm());
                    }
                }
            }
        }
        r
    }

    /// `|T|` small relative to the metric scale.
    pub fn is_kahler(&self, tol: f64) -> bool {
        self.quadratics().t_norm2.sqrt() < tol
    }
}

#[derive(Debug, Clone)]
pub struct TorsionQuadratics {
    /// `sum T^k_{iq} conj(T^k_{jq})`.
    pub diamond: CMat,
    /// `sum T^j_{sp} conj(T^i_{sp})`.
    pub circ: CMat,
    /// `sum_q T^j_{iq} conj(sum_k T^k_{kq})`.
    pub heart: CMat,
    /// `tau_i = sum_k T^k_{ik}`.
    pub tau: Vec<C64>,
    pub t_norm2: f64,
    pub tau_norm2: f64,
}

/// Quadratics of torsion components given in a unitary frame.
pub fn torsion_quadratics(t: &LabeledTensor) -> TorsionQuadratics {
    assert_eq!(t.frame, Frame::Unitary);
    let n = t.n;
    let tau: Vec<C64> = (0..n).map(|i| (0..n).map(|k| t.get(&[k, i, k])).sum()).collect();
    let trace_low: Vec<C64> = (0..n).map(|q| (0..n).map(|k| t.get(&[k, k, q])).sum()).collect();
    let mut diamond = CMat::zeros(n, n);
    let mut circ = CMat::zeros(n, n);
    let mut heart = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut d = ZERO;
            let mut c = ZERO;
            let mut h = ZERO;
            for q in 0..n {
                h += t.get(&[j, i, q]) * trace_low[q].conj();
                for k in 0..n {
                    d += t.get(&[k, i, q]) * t.get(&[k, j, q]).conj();
                    c += t.get(&[j, k, q]) * t.get(&[i, k, q]).conj();
                }
            }
            diamond[(i, j)] = d;
            circ[(i, j)] = c;
            heart[(i, j)] = h;
        }
    }
    let t_norm2 = t.data.iter().map(|z| z.norm_sqr()).sum();
    let tau_norm2 = tau.iter().map(|z| z.norm_sqr()).sum();
    TorsionQuadratics { diamond, circ, heart, tau, t_norm2, tau_norm2 }
}

/// Derivative arrays of a jet: `dg[a][(j, l)] = d_a g_{j lbar}` and so on.
pub(crate) struct Derivs {
    pub dg: Vec<CMat>,
    pub dgb: Vec<CMat>,
    /// `ddg[a][i][(j, l)] = d_a d_i g_{j lbar}`.
    pub ddg: Vec<Vec<CMat>>,
    /// `dbd[b][i][(j, l)] = d_bbar d_i g_{j lbar}`.
    pub dbd: Vec<Vec<CMat>>,
}

impl Derivs {
    pub fn new(jet: &MetricJet) -> Derivs {
        let n = jet.n;
        let dg = (0..n).map(|a| CMat::from_fn(n, n, |j, l| jet.partial(j, l, &[zv(a)]))).collect();
        let dgb = (0..n).map(|b| CMat::from_fn(n, n, |j, l| jet.partial(j, l, &[zbv(n, b)]))).collect();
        let ddg = (0..n)
            .map(|a| (0..n).map(|i| CMat::from_fn(n, n, |j, l| jet.partial(j, l, &[zv(a), zv(i)]))).collect())
            .collect();
        let dbd = (0..n)
            .map(|b| (0..n).map(|i| CMat::from_fn(n, n, |j, l| jet.partial(j, l, &[zbv(n, b), zv(i)]))).collect())
            .collect();
        Derivs { dg, dgb, ddg, dbd }
    }
}

pub fn chern_package(jet: &MetricJet) -> Result<ChernPackage> {
    if jet.order < 2 {
        return Err(Error::InvalidParameter("Chern curvature needs a jet of order >= 2".into()));
    }
    let n = jet.n;
    let metric = jet.metric()?;
    let frame = metric.unitary_frame()?;
    let gi = metric.inv_upper()?;
    let d = Derivs::new(jet);

    let gamma = LabeledTensor::from_fn(n, &[HolUp, HolDown, HolDown], Frame::Coordinate, |x| {
        let (k, i, j) = (x[0], x[1], x[2]);
        (0..n).map(|l| gi[(k, l)] * d.dg[i][(j, l)]).sum()
    });
    // d_a g^{k lbar} and d_bbar g^{k lbar}.
    let dgi = |dm: &CMat| -> CMat { -(&gi * dm.transpose() * &gi) };
    // gi * dm^T * gi has entry [k][l] = sum_{q,p} gi[k][q] dm[p][q] gi[p][l].
    let dginv: Vec<CMat> = d.dg.iter().map(dgi).collect();
    let dbginv: Vec<CMat> = d.dgb.iter().map(dgi).collect();
    // d_a Gamma^k_{ij}, d_bbar Gamma^k_{ij}, labels (k, i, j, a).
    let dgamma = LabeledTensor::from_fn(n, &[HolUp, HolDown, HolDown, HolDown], Frame::Coordinate, |x| {
        let (k, i, j, a) = (x[0], x[1], x[2], x[3]);
        (0..n).map(|l| dginv[a][(k, l)] * d.dg[i][(j, l)] + gi[(k, l)] * d.ddg[a][i][(j, l)]).sum()
    });
    let dbgamma = LabeledTensor::from_fn(n, &[HolUp, HolDown, HolDown, AntiholDown], Frame::Coordinate, |x| {
        let (k, i, j, b) = (x[0], x[1], x[2], x[3]);
        (0..n).map(|l| dbginv[b][(k, l)] * d.dg[i][(j, l)] + gi[(k, l)] * d.dbd[b][i][(j, l)]).sum()
    });

    let torsion = LabeledTensor::from_fn(n, &[HolUp, HolDown, HolDown], Frame::Coordinate, |x| {
        gamma.get(&[x[0], x[1], x[2]]) - gamma.get(&[x[0], x[2], x[1]])
    });

    let curvature = LabeledTensor::from_fn(n, &[HolDown, AntiholDown, HolDown, AntiholDown], Frame::Coordinate, |x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        let mut s = -d.dbd[j][i][(k, l)];
        for p in 0..n {
            for q in 0..n {
                s += gi[(p, q)] * d.dg[i][(k, q)] * d.dgb[j][(p, l)];
            }
        }
        s
    });

    let nabla_torsion = LabeledTensor::from_fn(n, &[HolUp, HolDown, HolDown, HolDown], Frame::Coordinate, |x| {
        let (l, i, k, j) = (x[0], x[1], x[2], x[3]);
        let mut s = dgamma.get(&[l, i, k, j]) - dgamma.get(&[l, k, i, j]);
        for p in 0..n {
            s += gamma.get(&[l, j, p]) * torsion.get(&[p, i, k]);
            s -= gamma.get(&[p, j, i]) * torsion.get(&[l, p, k]);
            s -= gamma.get(&[p, j, k]) * torsion.get(&[l, i, p]);
        }
        s
    });
    let nabla_bar_torsion = LabeledTensor::from_fn(n, &[HolUp, HolDown, HolDown, AntiholDown], Frame::Coordinate, |x| {
        let (l, i, k, j) = (x[0], x[1], x[2], x[3]);
        dbgamma.get(&[l, i, k, j]) - dbgamma.get(&[l, k, i, j])
    });

    let ricci = ricci_traces(&curvature, &gi);
    let scal = metric_trace(&ricci[0], &gi);
    let scal_tilde = metric_trace(&ricci[2], &gi);
    Ok(ChernPackage {
        n,
        metric,
        ginv: gi,
        frame,
        gamma,
        torsion,
        curvature,
        ricci,
        scal: scal.re,
        scal_tilde: scal_tilde.re,
        nabla_torsion,
        nabla_bar_torsion,
    })
}

/// The four traces of a `(i, jbar, k, lbar)` curvature tensor. `gi` is
/// `g^{k lbar}`; pass the identity for unitary-frame components.
pub fn ricci_traces(r: &LabeledTensor, gi: &CMat) -> [LabeledTensor; 4] {
    let n = r.n;
    let fr = r.frame;
    let lab = [HolDown, AntiholDown];
    let tr = |f: &dyn Fn(usize, usize, usize, usize) -> C64| {
        LabeledTensor::from_fn(n, &lab, fr, |x| {
            let mut s = ZERO;
            for p in 0..n {
                for q in 0..n {
                    s += gi[(p, q)] * f(x[0], x[1], p, q);
                }
            }
            s
        })
    };
    [
        tr(&|i, j, k, l| r.get(&[i, j, k, l])),
        tr(&|k, l, i, j| r.get(&[i, j, k, l])),
        tr(&|i, l, k, j| r.get(&[i, j, k, l])),
        tr(&|k, j, i, l| r.get(&[i, j, k, l])),
    ]
}

pub fn metric_trace(m: &LabeledTensor, gi: &CMat) -> C64 {
    let n = m.n;
    let mut s = ZERO;
    for i in 0..n {
        for j in 0..n {
            s += gi[(i, j)] * m.get(&[i, j]);
        }
    }
    s
}

/// `g^{i jbar} S_{i jbar k lbar}` with
/// `S = d_i d_jbar g_{k lbar} - d_k d_jbar g_{i lbar} - d_i d_lbar g_{k jbar} + d_k d_lbar g_{i jbar}`,
/// the components of `d dbar omega` up to a constant factor.
pub fn ddbar_omega_trace(jet: &MetricJet) -> Result<LabeledTensor> {
    if jet.order < 2 {
        return Err(Error::InvalidParameter("needs a jet of order >= 2".into()));
    }
    let n = jet.n;
    let gi = jet.metric()?.inv_upper()?;
    let h = |a: usize, b: usize, k: usize, l: usize| jet.partial(k, l, &[zv(a), zbv(n, b)]);
    Ok(LabeledTensor::from_fn(n, &[HolDown, AntiholDown], Frame::Coordinate, |x| {
        let (k, l) = (x[0], x[1]);
        let mut s = ZERO;
        for i in 0..n {
            for j in 0..n {
                let sv = h(i, j, k, l) - h(k, j, i, l) - h(i, l, k, j) + h(k, l, i, j);
                s += gi[(i, j)] * sv;
            }
        }
        s
    }))
}

/// `Lambda(d dbar omega)` with the calibrated normalisation.
pub fn lambda_ddbar_omega(jet: &MetricJet) -> Result<LabeledTensor> {
    Ok(ddbar_omega_trace(jet)?.scale(LIU_YANG_LAMBDA))
}

/// Residual of the Liu-Yang identity
/// `Ric2 = Ric1 - i Lambda(d dbar omega) - (P + Q) + T_diamond` in the unitary frame,
/// with `P = Ric1 - Ric3` and `Q = Ric1 - Ric4`.
pub fn liu_yang_residual(pkg: &ChernPackage, jet: &MetricJet) -> Result<f64> {
    let lhs = liu_yang_defect(pkg)?;
    let lam = pkg.in_frame(&lambda_ddbar_omega(jet)?).scale(I);
    Ok(lhs.add(&lam)?.max_abs())
}

/// `Ric2 - Ric1 + (P + Q) - T_diamond` in the unitary frame; the identity says
/// this equals `-i Lambda(d dbar omega)`.
///
/// The quadratic term is the one summing `T^k_{iq} conj(T^k_{jq})`. With the
/// `T_circ` contraction instead no normalisation of `Lambda` closes the
/// identity (see the `liu_yang` tests).
pub fn liu_yang_defect(pkg: &ChernPackage) -> Result<LabeledTensor> {
    liu_yang_defect_with(pkg, &pkg.quadratics().diamond)
}

/// Same as [`liu_yang_defect`] with an arbitrary quadratic term.
pub fn liu_yang_defect_with(pkg: &ChernPackage, quad: &CMat) -> Result<LabeledTensor> {
    let f = |t: &LabeledTensor| pkg.in_frame(t);
    let circ = LabeledTensor::from_matrix(quad, [HolDown, AntiholDown], Frame::Unitary);
    f(pkg.ric(2))
        .sub(&f(pkg.ric(1)))?
        .add(&f(&pkg.p_term()))?
        .add(&f(&pkg.q_term()))?
        .sub(&circ)
}

/// A complex 3-form on the complexified tangent space, stored on the basis
/// `d/dz_1..d/dz_n, d/dzbar_1..d/dzbar_n` (index `n + a` is `d/dzbar_a`).
#[derive(Debug, Clone, PartialEq)]
pub struct Form3 {
    pub n: usize,
    pub frame: Frame,
    pub data: Vec<C64>,
}

impl Form3 {
    pub fn zeros(n: usize, frame: Frame) -> Self {
        Form3 { n, frame, data: vec![ZERO; 8 * n * n * n] }
    }

    #[inline]
    pub fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        let m = 2 * self.n;
        (a * m + b) * m + c
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> C64 {
        self.data[self.idx(a, b, c)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, v: C64) {
        let i = self.idx(a, b, c);
        self.data[i] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Form3 { n: self.n, frame: self.frame, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn sub(&self, o: &Form3) -> Form3 {
        assert_eq!(self.frame, o.frame);
        Form3 { n: self.n, frame: self.frame, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    /// Keep components with exactly `p` holomorphic slots.
    pub fn bidegree_part(&self, p: usize) -> Form3 {
        let n = self.n;
        let mut out = self.clone();
        let m = 2 * n;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let hol = [a, b, c].iter().filter(|&&x| x < n).count();
                    if hol != p {
                        let i = out.idx(a, b, c);
                        out.data[i] = ZERO;
                    }
                }
            }
        }
        out
    }

    pub fn to_frame(&self, f: &UnitaryFrame) -> Form3 {
        let n = self.n;
        let m = 2 * n;
        let basis = complex_basis_matrix(f);
        let mut cur = self.data.clone();
        for axis in 0..3 {
            let stride = m.pow(2 - axis as u32);
            let mut next = vec![ZERO; cur.len()];
            for (off, v) in cur.iter().enumerate() {
                if *v == ZERO {
                    continue;
                }
                let i = (off / stride) % m;
                let base = off - i * stride;
                for a in 0..m {
                    let w = basis[(i, a)];
                    if w != ZERO {
                        next[base + a * stride] += v * w;
                    }
                }
            }
            cur = next;
        }
        Form3 { n, frame: Frame::Unitary, data: cur }
    }
}

/// Block matrix `diag(E, conj(E))` taking coordinate components of the
/// complexified tangent space to the frame `e_a, ebar_a`.
pub fn complex_basis_matrix(f: &UnitaryFrame) -> CMat {
    let n = f.n();
    let mut b = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for a in 0..n {
            b[(i, a)] = f.e[(i, a)];
            b[(n + i, n + a)] = f.e[(i, a)].conj();
        }
    }
    b
}

/// `d omega` for `omega = i g_{i jbar} dz^i ^ dzbar^j`, evaluated on
/// coordinate vectors with `d omega(X,Y,Z) = X omega(Y,Z) - Y omega(X,Z) + Z omega(X,Y)`.
pub fn d_omega(jet: &MetricJet) -> Form3 {
    let n = jet.n;
    let m = 2 * n;
    // omega(A, B) on the complex basis, and its derivative along basis vector X.
    let omega_d = |x: usize, a: usize, b: usize| -> C64 {
        let var = if x < n { zv(x) } else { zbv(n, x - n) };
        match (a < n, b < n) {
            (true, false) => I * jet.partial(a, b - n, &[var]),
            (false, true) => -I * jet.partial(b, a - n, &[var]),
            _ => ZERO,
        }
    };
    let mut f = Form3::zeros(n, Frame::Coordinate);
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                let v = omega_d(x, y, z) - omega_d(y, x, z) + omega_d(z, x, y);
                f.set(x, y, z, v);
            }
        }
    }
    f
}

/// `d^c omega = i (dbar - d) omega`.
pub fn dc_omega(jet: &MetricJet) -> Form3 {
    let dw = d_omega(jet);
    let d_part = dw.bidegree_part(2);
    let dbar_part = dw.bidegree_part(1);
    dbar_part.sub(&d_part).scale(I)
}

/// Components of `d Ric1` from the coordinate Ricci field `rho`, given its
/// first derivatives `d[v]` along jet variable `v`: the largest of
/// `|d_a rho_{i jbar} - d_i rho_{a jbar}|` and `|d_bbar rho_{i jbar} - d_jbar rho_{i bbar}|`.
fn closedness_defect(n: usize, d: impl Fn(usize, usize, usize) -> C64) -> f64 {
    let mut r: f64 = 0.0;
    for a in 0..n {
        for i in 0..n {
            for j in 0..n {
                r = r.max((d(zv(a), i, j) - d(zv(i), a, j)).norm());
                r = r.max((d(zbv(n, a), i, j) - d(zbv(n, j), i, a)).norm());
            }
        }
    }
    r
}

/// Largest component of `d Ric1` with `Ric1` differentiated numerically
/// as a field (five-point stencil).
pub fn ric1_closedness_numeric(field: &MetricField, p: &ChartPoint, step: f64) -> Result<f64> {
    let ric = |q: &ChartPoint| -> Result<LabeledTensor> {
        let jet = evaluate_jet(field, q, 2)?;
        Ok(chern_package(&jet)?.ricci[0].clone())
    };
    let d = numeric_field_derivative(ric, p, step)?;
    Ok(closedness_defect(p.dim(), |v, i, j| d[v].get(&[i, j])))
}

/// Largest component of `d Ric1` computed exactly from an order-3 jet, with
/// `Ric1 = g^{k lbar} R_{i jbar k lbar}` carried as jets.
pub fn ric1_closedness_exact(jet: &MetricJet) -> Result<f64> {
    if jet.order < 3 {
        return Err(Error::InvalidParameter("d Ric1 needs a jet of order 3".into()));
    }
    let n = jet.n;
    let s = jet.space().clone();
    let g: Vec<Vec<Jet>> = (0..n).map(|i| (0..n).map(|j| jet.entry_jet(i, j)).collect()).collect();
    let id: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| Jet::constant(&s, if i == j { ONE } else { ZERO })).collect())
        .collect();
    let inv = jet_solve(&g, &id).ok_or(Error::SingularMetric { row: 0, pivot: 0.0 })?;
    // g^{k lbar} = inv[l][k].
    let mut ric = vec![vec![Jet::constant(&s, ZERO); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Jet::constant(&s, ZERO);
            for k in 0..n {
                for l in 0..n {
                    let mut r = -g[k][l].diff(zv(i)).diff(zbv(n, j));
                    for p in 0..n {
                        for q in 0..n {
                            r = &r + &(&(&inv[q][p] * &g[k][q].diff(zv(i))) * &g[p][l].diff(zbv(n, j)));
                        }
                    }
                    acc = &acc + &(&inv[l][k] * &r);
                }
            }
            ric[i][j] = acc;
        }
    }
    Ok(closedness_defect(n, |v, i, j| ric[i][j].partial(&[v])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{evaluate_jet, ChartPoint};
    use crate::models::{build_model, ModelSpec};
    use crate::tensorcore::ONE;

    fn hopf_package() -> ChernPackage {
        let f = build_model(&ModelSpec::new("hopf", 2)).unwrap();
        let j = evaluate_jet(&f, &ChartPoint::new(vec![ONE, ZERO]), 2).unwrap();
        chern_package(&j).unwrap()
    }

    fn near(a: C64, re: f64) -> bool {
        (a - C64::new(re, 0.0)).norm() < 1e-13
    }

    #[test]
    fn hopf_christoffel_and_torsion() {
        let p = hopf_package();
        assert!(near(p.gamma.get(&[0, 0, 0]), -1.0));
        assert!(near(p.gamma.get(&[1, 0, 1]), -1.0));
        for k in 0..2 {
            for j in 0..2 {
                assert!(near(p.gamma.get(&[k, 1, j]), 0.0));
            }
        }
        assert!(near(p.torsion.get(&[1, 0, 1]), -1.0));
        assert!(near(p.torsion.get(&[0, 0, 1]), 0.0));
        let tf = p.torsion_frame();
        assert!(near(tf.get(&[1, 0, 1]), -0.5));
        let q = p.quadratics();
        assert!(near(q.tau[0], -0.5) && near(q.tau[1], 0.0));
        assert!((q.tau_norm2 - 0.25).abs() < 1e-13);
    }

    #[test]
    fn hopf_ricci_one() {
        let p = hopf_package();
        let r = p.ric(1);
        assert!(near(r.get(&[0, 0]), 0.0) && near(r.get(&[1, 1]), 2.0));
        assert!(near(r.get(&[0, 1]), 0.0) && near(r.get(&[1, 0]), 0.0));
    }

    #[test]
    fn fubini_study_is_kahler_with_equal_riccis() {
        let f = build_model(&ModelSpec::new("fubini_study", 2)).unwrap();
        let pt = ChartPoint::new(vec![C64::new(0.3, -0.2), C64::new(0.1, 0.5)]);
        let j = evaluate_jet(&f, &pt, 2).unwrap();
        let p = chern_package(&j).unwrap();
        assert!(p.is_kahler(1e-12));
        assert!(d_omega(&j).max_abs() < 1e-12);
        for k in 2..=4 {
            assert!(p.ric(1).max_diff(p.ric(k)).unwrap() < 1e-12);
        }
        // Constant holomorphic sectional curvature 2 for this normalisation.
        let e = &p.frame.e;
        let r = p.in_frame(&p.curvature);
        let _ = e;
        assert!((r.get(&[0, 0, 0, 0]).re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hopf_is_not_kahler() {
        let p = hopf_package();
        assert!(!p.is_kahler(1e-6));
        assert!(p.ric(1).max_diff(p.ric(2)).unwrap() > 1e-3);
        assert!(p.bianchi_residual() < 1e-12);
    }
}
