//! The Gauduchon line of Hermitian connections `t -> tnabla`, `t = 1` Chern,
//! `t = 0` Lichnerowicz, `t = -1` Bismut.
//!
//! `tnabla_ubar = cnabla_ubar + A_ubar`, `tnabla_u = cnabla_u - (A_ubar)^*`
//! with `A^k_{ibar j} = ((1-t)/2) conj(T^j_{ik})` in a unitary frame.
//!
//! Curvature is computed two ways. [`curvature_direct`] differentiates the
//! `A` field through jet arithmetic and applies the general formula for
//! `Theta = cTheta + cnabla A + (cnabla A)^* - [A^*, A] - A^*_T`.
//! [`curvature_closed_form`] expresses everything through Chern curvature,
//! torsion and its covariant derivative. All outputs are unitary-frame
//! components: `R11_{i jbar k lbar}` and `R20_{i j k lbar}`.

use crate::chern::{complex_basis_matrix, dc_omega, ricci_traces, ChernPackage, Form3};
use crate::error::{Error, Result};
use crate::jets::{evaluate_jet, jet_solve, zbv, zv, ChartPoint, Jet, MetricField, MetricJet};
use crate::models::random_unit_vector;
use crate::tensorcore::{
    to_unitary_frame, CMat, Frame, IndexLabel, LabeledTensor, UnitaryFrame, C64, ONE, ZERO,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use IndexLabel::*;

/// Named points on the line.
pub mod presets {
    pub const CHERN: f64 = 1.0;
    pub const LICHNEROWICZ: f64 = 0.0;
    pub const BISMUT: f64 = -1.0;
    pub const MINIMAL: f64 = 1.0 / 3.0;
    pub const HERMITIAN_CONFORMAL: f64 = 0.5;

    pub fn by_name(name: &str) -> Option<f64> {
        Some(match name {
            "chern" => CHERN,
            "lichnerowicz" => LICHNEROWICZ,
            "bismut" => BISMUT,
            "minimal" => MINIMAL,
            "hermitian_conformal" => HERMITIAN_CONFORMAL,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Direct,
    ClosedForm,
}

const R11_LABELS: [IndexLabel; 4] = [HolDown, AntiholDown, HolDown, AntiholDown];
const R20_LABELS: [IndexLabel; 4] = [HolDown, HolDown, HolDown, AntiholDown];

fn c_of(t: f64) -> f64 {
    (1.0 - t) / 2.0
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("t = {t} is not finite")))
    }
}

#[derive(Debug, Clone)]
pub struct GauduchonCurvature {
    pub t: f64,
    pub route: Route,
    pub n: usize,
    pub frame: UnitaryFrame,
    pub r11: LabeledTensor,
    pub r20: LabeledTensor,
    /// Traces of `r11`, unitary frame.
    pub ricci: [LabeledTensor; 4],
    pub scal: f64,
    pub scal_tilde: f64,
}

impl GauduchonCurvature {
    fn from_parts(t: f64, route: Route, frame: UnitaryFrame, r11: LabeledTensor, r20: LabeledTensor) -> Self {
        let n = r11.n;
        let id = CMat::identity(n, n);
        let ricci = ricci_traces(&r11, &id);
        let scal = trace(&ricci[0]).re;
        let scal_tilde = trace(&ricci[2]).re;
        GauduchonCurvature { t, route, n, frame, r11, r20, ricci, scal, scal_tilde }
    }

    pub fn ric(&self, k: usize) -> &LabeledTensor {
        &self.ricci[k - 1]
    }

    /// Largest `|R20_{ijkl} + R20_{jikl}|`.
    pub fn r20_antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        r = r.max((self.r20.get(&[i, j, k, l]) + self.r20.get(&[j, i, k, l])).norm());
                    }
                }
            }
        }
        r
    }

    /// Largest violation of `R_{i jbar k lbar} = conj(R_{j ibar l kbar})`.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let a = self.r11.get(&[i, j, k, l]);
                        let b = self.r11.get(&[j, i, l, k]).conj();
                        r = r.max((a - b).norm());
                    }
                }
            }
        }
        r
    }

    /// `R11(v, vbar, w, wbar)` etc. for frame vectors.
    pub fn r11_eval(&self, a: &[C64], b: &[C64], c: &[C64], d: &[C64]) -> C64 {
        let n = self.n;
        let mut s = ZERO;
        for i in 0..n {
            for j in 0..n {
                let ab = a[i] * b[j].conj();
                if ab == ZERO {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        s += ab * c[k] * d[l].conj() * self.r11.get(&[i, j, k, l]);
                    }
                }
            }
        }
        s
    }
}

fn trace(m: &LabeledTensor) -> C64 {
    (0..m.n).map(|i| m.get(&[i, i])).sum()
}

/// `A^k_{ibar j}` in the unitary frame, labels `(k, ibar, j)`.
pub fn gauduchon_a_tensor(t: f64, pkg: &ChernPackage) -> Result<LabeledTensor> {
    check_t(t)?;
    let tf = pkg.torsion_frame();
    let c = c_of(t);
    Ok(LabeledTensor::from_fn(pkg.n, &[HolUp, AntiholDown, HolDown], Frame::Unitary, |x| {
        tf.get(&[x[2], x[1], x[0]]).conj() * c
    }))
}

/// Coordinate components of [`gauduchon_a_tensor`].
pub fn gauduchon_a_tensor_coordinates(t: f64, pkg: &ChernPackage) -> Result<LabeledTensor> {
    crate::tensorcore::from_unitary_frame(&gauduchon_a_tensor(t, pkg)?, &pkg.frame)
}

/// Curvature from Chern data:
/// `R11 = t cR_{i jbar k lbar} + c (cR_{k jbar i lbar} + cR_{i lbar k jbar})
///        + c^2 (T^r_{ik} conj(T^r_{jl}) - T^l_{ir} conj(T^k_{jr}))`,
/// `R20 = c (T^l_{ik,j} - T^l_{jk,i}) + c^2 (T^r_{jk} T^l_{ir} - T^r_{ik} T^l_{jr})
///        - c T^r_{ij} T^l_{rk}`, with `c = (1-t)/2`.
pub fn curvature_closed_form(t: f64, pkg: &ChernPackage) -> Result<GauduchonCurvature> {
    closed_form_variant(t, pkg, false)
}

/// Closed form with one term's sign flipped, used to check that the
/// verification suite notices a broken formula.
#[doc(hidden)]
pub fn curvature_closed_form_corrupted(t: f64, pkg: &ChernPackage) -> Result<GauduchonCurvature> {
    closed_form_variant(t, pkg, true)
}

fn closed_form_variant(t: f64, pkg: &ChernPackage, corrupt: bool) -> Result<GauduchonCurvature> {
    check_t(t)?;
    let n = pkg.n;
    let c = c_of(t);
    let rc = pkg.in_frame(&pkg.curvature);
    let tf = pkg.torsion_frame();
    let nt = pkg.in_frame(&pkg.nabla_torsion);
    let quad_sign = if corrupt { -1.0 } else { 1.0 };
    let r11 = LabeledTensor::from_fn(n, &R11_LABELS, Frame::Unitary, |x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        let mut s = rc.get(&[i, j, k, l]) * t + (rc.get(&[k, j, i, l]) + rc.get(&[i, l, k, j])) * c;
        let mut q = ZERO;
        for r in 0..n {
            q += tf.get(&[r, i, k]) * tf.get(&[r, j, l]).conj() - tf.get(&[l, i, r]) * tf.get(&[k, j, r]).conj();
        }
        s += q * (c * c * quad_sign);
        s
    });
    let r20 = LabeledTensor::from_fn(n, &R20_LABELS, Frame::Unitary, |x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        let mut s = (nt.get(&[l, i, k, j]) - nt.get(&[l, j, k, i])) * c;
        for r in 0..n {
            s += (tf.get(&[r, j, k]) * tf.get(&[l, i, r]) - tf.get(&[r, i, k]) * tf.get(&[l, j, r])) * (c * c);
            s -= tf.get(&[r, i, j]) * tf.get(&[l, r, k]) * c;
        }
        s
    });
    Ok(GauduchonCurvature::from_parts(t, Route::ClosedForm, pkg.frame.clone(), r11, r20))
}

/// Connection data of `tnabla` as jets in coordinates.
struct ConnectionJets {
    n: usize,
    g: Vec<Vec<Jet>>,
    /// `g^{k lbar}` indexed `[k][l]`.
    gi: Vec<Vec<Jet>>,
    /// `Gamma^k_{ij}` as `gamma[k][i][j]`.
    gamma: Vec<Vec<Vec<Jet>>>,
    torsion: Vec<Vec<Vec<Jet>>>,
    /// `A^k_{ibar j}` as `a[k][i][j]`.
    a: Vec<Vec<Vec<Jet>>>,
    /// `(A_ibar)^*` as `astar[i][k][j]`, the matrix `(k, j)` of the adjoint.
    astar: Vec<Vec<Vec<Jet>>>,
}

fn connection_jets(t: f64, jet: &MetricJet) -> Result<ConnectionJets> {
    let n = jet.n;
    let s = jet.space().clone();
    let g: Vec<Vec<Jet>> = (0..n).map(|i| (0..n).map(|j| jet.entry_jet(i, j)).collect()).collect();
    let id: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| Jet::constant(&s, if i == j { ONE } else { ZERO })).collect())
        .collect();
    let inv = jet_solve(&g, &id).ok_or(Error::SingularMetric { row: 0, pivot: 0.0 })?;
    let gi: Vec<Vec<Jet>> = (0..n).map(|k| (0..n).map(|l| inv[l][k].clone()).collect()).collect();
    let dg: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|a| (0..n).map(|j| (0..n).map(|l| g[j][l].diff(zv(a))).collect()).collect())
        .collect();
    let sum = |terms: &mut dyn Iterator<Item = Jet>| -> Jet {
        let mut acc = Jet::constant(&s, ZERO);
        for t in terms {
            acc = &acc + &t;
        }
        acc
    };
    let gamma: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| (0..n).map(|j| sum(&mut (0..n).map(|l| &gi[k][l] * &dg[i][j][l]))).collect())
                .collect()
        })
        .collect();
    let torsion: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|k| (0..n).map(|i| (0..n).map(|j| &gamma[k][i][j] - &gamma[k][j][i]).collect()).collect())
        .collect();
    let c = C64::new(c_of(t), 0.0);
    let tconj: Vec<Vec<Vec<Jet>>> = torsion
        .iter()
        .map(|m| m.iter().map(|r| r.iter().map(|x| x.conj_swap()).collect()).collect())
        .collect();
    // A_{ibar j mbar} = c g_{j pbar} conj(T^p_{im});  A^k_{ibar j} = g^{k mbar} A_{ibar j mbar}.
    let a_low: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|m| sum(&mut (0..n).map(|p| &g[j][p] * &tconj[p][i][m])).scale(c)).collect())
                .collect()
        })
        .collect();
    let a: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| (0..n).map(|j| sum(&mut (0..n).map(|m| &gi[k][m] * &a_low[i][j][m]))).collect())
                .collect()
        })
        .collect();
    // (A_ibar)^*{}^k_j = g^{k mbar} conj(A^p_{ibar m}) g_{j pbar}.
    let aconj: Vec<Vec<Vec<Jet>>> =
        a.iter().map(|m| m.iter().map(|r| r.iter().map(|x| x.conj_swap()).collect()).collect()).collect();
    let astar: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    (0..n)
                        .map(|j| {
                            let mut acc = Jet::constant(&s, ZERO);
                            for m in 0..n {
                                let inner = sum(&mut (0..n).map(|p| &aconj[p][i][m] * &g[j][p]));
                                acc = &acc + &(&gi[k][m] * &inner);
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(ConnectionJets { n, g, gi, gamma, torsion, a, astar })
}

/// Connection matrices of `tnabla` at the point:
/// `tnabla_{d/dz_i} d/dz_j = hol[i][(k, j)] d/dz_k` and
/// `tnabla_{d/dzbar_i} d/dz_j = antihol[i][(k, j)] d/dz_k`.
#[derive(Debug, Clone)]
pub struct ConnectionCoefficients {
    pub hol: Vec<CMat>,
    pub antihol: Vec<CMat>,
}

pub fn connection_coefficients(t: f64, jet: &MetricJet) -> Result<ConnectionCoefficients> {
    check_t(t)?;
    let cj = connection_jets(t, jet)?;
    let n = cj.n;
    let hol = (0..n)
        .map(|i| CMat::from_fn(n, n, |k, j| cj.gamma[k][i][j].value() - cj.astar[i][k][j].value()))
        .collect();
    let antihol = (0..n).map(|i| CMat::from_fn(n, n, |k, j| cj.a[k][i][j].value())).collect();
    Ok(ConnectionCoefficients { hol, antihol })
}

/// Curvature by differentiating the `A` field (jet order >= 2).
pub fn curvature_direct(t: f64, jet: &MetricJet) -> Result<GauduchonCurvature> {
    check_t(t)?;
    if jet.order < 2 {
        return Err(Error::InvalidParameter("direct curvature needs a jet of order >= 2".into()));
    }
    let n = jet.n;
    let cj = connection_jets(t, jet)?;
    let g = CMat::from_fn(n, n, |i, j| cj.g[i][j].value());
    let gi = CMat::from_fn(n, n, |k, l| cj.gi[k][l].value());
    let gam = |k: usize, i: usize, j: usize| cj.gamma[k][i][j].value();
    let av = |k: usize, i: usize, j: usize| cj.a[k][i][j].value();
    let astar = |i: usize| CMat::from_fn(n, n, |k, j| cj.astar[i][k][j].value());
    let a_mat = |i: usize| CMat::from_fn(n, n, |k, j| av(k, i, j));
    // Covariant derivatives of A along d/dz_a and d/dzbar_b, as matrices
    // over (k, j) for each (direction, ibar).
    let da = |a: usize, i: usize| {
        CMat::from_fn(n, n, |k, j| {
            let mut s = cj.a[k][i][j].partial(&[zv(a)]);
            for p in 0..n {
                s += gam(k, a, p) * av(p, i, j) - gam(p, a, j) * av(k, i, p);
            }
            s
        })
    };
    let dba = |b: usize, i: usize| {
        CMat::from_fn(n, n, |k, j| {
            let mut s = cj.a[k][i][j].partial(&[zbv(n, b)]);
            for p in 0..n {
                s -= gam(p, b, i).conj() * av(k, p, j);
            }
            s
        })
    };
    // Metric adjoint: adj(S)^k_j = g^{k mbar} conj(S^p_m) g_{j pbar}.
    let adj = |s: &CMat| -> CMat { &gi * s.map(|z| z.conj()).transpose() * g.transpose() };
    let chern_end = |i: usize, j: usize| CMat::from_fn(n, n, |p, k| -cj.gamma[p][i][k].partial(&[zbv(n, j)]));
    let lower = |theta: &CMat, k: usize, l: usize| -> C64 { (0..n).map(|p| theta[(p, k)] * g[(p, l)]).sum() };

    let astars: Vec<CMat> = (0..n).map(astar).collect();
    let amats: Vec<CMat> = (0..n).map(a_mat).collect();
    let mut r11c = LabeledTensor::zeros(n, &R11_LABELS, Frame::Coordinate);
    let mut r20c = LabeledTensor::zeros(n, &R20_LABELS, Frame::Coordinate);
    for i in 0..n {
        for j in 0..n {
            let theta11 = chern_end(i, j) + da(i, j) + adj(&da(j, i))
                - (&astars[i] * &amats[j] - &amats[j] * &astars[i]);
            let mut theta20 = -adj(&dba(i, j)) + adj(&dba(j, i)) + (&astars[i] * &astars[j] - &astars[j] * &astars[i]);
            for r in 0..n {
                theta20 -= &astars[r] * cj.torsion[r][i][j].value();
            }
            for k in 0..n {
                for l in 0..n {
                    r11c.set(&[i, j, k, l], lower(&theta11, k, l));
                    r20c.set(&[i, j, k, l], lower(&theta20, k, l));
                }
            }
        }
    }
    let frame = jet.metric()?.unitary_frame()?;
    let r11 = to_unitary_frame(&r11c, &frame)?;
    let r20 = to_unitary_frame(&r20c, &frame)?;
    Ok(GauduchonCurvature::from_parts(t, Route::Direct, frame, r11, r20))
}

/// Ricci forms of `tnabla` from the Chern Riccis and torsion (unitary frame):
/// `tRic1 = t Ric1 + c (Ric3 + Ric4)`,
/// `tRic2 = t Ric2 + c (Ric3 + Ric4) + c^2 sum (T^r_{ik} conj(T^r_{il}) - T^l_{ir} conj(T^k_{ir}))`,
/// `tRic3 = t Ric3 + c (Ric1 + Ric2) + c^2 sum (T^r_{ik} conj(T^r_{kl}) - T^l_{ir} conj(T^k_{kr}))`,
/// `tRic4 = t Ric4 + c (Ric1 + Ric2) + c^2 sum (T^r_{ik} conj(T^r_{ji}) - T^i_{ir} conj(T^k_{jr}))`.
pub fn ricci_from_chern(t: f64, pkg: &ChernPackage) -> Result<[LabeledTensor; 4]> {
    check_t(t)?;
    let n = pkg.n;
    let c = c_of(t);
    let rc: Vec<LabeledTensor> = pkg.ricci.iter().map(|r| pkg.in_frame(r)).collect();
    let tf = pkg.torsion_frame();
    let tt = |k: usize, i: usize, j: usize| tf.get(&[k, i, j]);
    let lab = [HolDown, AntiholDown];
    let mk = |f: &dyn Fn(usize, usize) -> C64| LabeledTensor::from_fn(n, &lab, Frame::Unitary, |x| f(x[0], x[1]));
    let r1 = mk(&|i, j| rc[0].get(&[i, j]) * t + (rc[2].get(&[i, j]) + rc[3].get(&[i, j])) * c);
    let r2 = mk(&|k, l| {
        let mut q = ZERO;
        for i in 0..n {
            for r in 0..n {
                q += tt(r, i, k) * tt(r, i, l).conj() - tt(l, i, r) * tt(k, i, r).conj();
            }
        }
        rc[1].get(&[k, l]) * t + (rc[2].get(&[k, l]) + rc[3].get(&[k, l])) * c + q * (c * c)
    });
    let r3 = mk(&|i, l| {
        let mut q = ZERO;
        for k in 0..n {
            for r in 0..n {
                q += tt(r, i, k) * tt(r, k, l).conj() - tt(l, i, r) * tt(k, k, r).conj();
            }
        }
        rc[2].get(&[i, l]) * t + (rc[0].get(&[i, l]) + rc[1].get(&[i, l])) * c + q * (c * c)
    });
    let r4 = mk(&|k, j| {
        let mut q = ZERO;
        for i in 0..n {
            for r in 0..n {
                q += tt(r, i, k) * tt(r, j, i).conj() - tt(i, i, r) * tt(k, j, r).conj();
            }
        }
        rc[3].get(&[k, j]) * t + (rc[0].get(&[k, j]) + rc[1].get(&[k, j])) * c + q * (c * c)
    });
    Ok([r1, r2, r3, r4])
}

/// Ricci forms of `tnabla` through `P = Ric1 - Ric3`, `Q = Ric1 - Ric4` and
/// the torsion quadratics:
/// `tRic1 = Ric1 + ((t-1)/2)(P + Q)`,
/// `tRic2 = t Ric2 + (1-t) Ric1 + ((t-1)/2)(P + Q) + c^2 (Tdiamond - Tcirc)`,
/// `tRic3 = t Ric3 + c (Ric1 + Ric2) - c^2 (Tdiamond + Theart)`,
/// `tRic4 = t Ric4 + c (Ric1 + Ric2) - c^2 (Tdiamond + Theart^dagger)`.
pub fn ricci_from_pq(t: f64, pkg: &ChernPackage) -> Result<[LabeledTensor; 4]> {
    check_t(t)?;
    let c = c_of(t);
    let h = (t - 1.0) / 2.0;
    let f = |x: &LabeledTensor| pkg.in_frame(x);
    let rc: Vec<CMat> = pkg.ricci.iter().map(|r| f(r).to_matrix()).collect();
    let p = f(&pkg.p_term()).to_matrix();
    let q = f(&pkg.q_term()).to_matrix();
    let quad = pkg.quadratics();
    let pq = (&p + &q) * C64::new(h, 0.0);
    let cc = C64::new(c * c, 0.0);
    let r1 = &rc[0] + &pq;
    let (tc, oc, cc1) = (C64::new(t, 0.0), C64::new(1.0 - t, 0.0), C64::new(c, 0.0));
    let r2 = &rc[1] * tc + &rc[0] * oc + &pq + (&quad.diamond - &quad.circ) * cc;
    let r3 = &rc[2] * tc + (&rc[0] + &rc[1]) * cc1 - (&quad.diamond + &quad.heart) * cc;
    let r4 = &rc[3] * tc + (&rc[0] + &rc[1]) * cc1 - (&quad.diamond + quad.heart.adjoint()) * cc;
    let wrap = |m: CMat| LabeledTensor::from_matrix(&m, [HolDown, AntiholDown], Frame::Unitary);
    Ok([wrap(r1), wrap(r2), wrap(r3), wrap(r4)])
}

/// Largest disagreement between the three Ricci routes, per trace.
pub fn ricci_route_disagreement(curv: &GauduchonCurvature, pkg: &ChernPackage) -> Result<[f64; 4]> {
    let b = ricci_from_chern(curv.t, pkg)?;
    let c = ricci_from_pq(curv.t, pkg)?;
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = curv.ricci[k].max_diff(&b[k])?.max(curv.ricci[k].max_diff(&c[k])?).max(b[k].max_diff(&c[k])?);
    }
    Ok(out)
}

/// Ricci forms of `tnabla` (trace route) with the disagreement of the other
/// two routes.
#[derive(Debug, Clone)]
pub struct GauduchonRicci {
    pub ricci: [LabeledTensor; 4],
    pub route_residuals: [f64; 4],
}

pub const RICCI_ROUTE_TOL: f64 = 1e-7;

pub fn gauduchon_ricci(t: f64, pkg: &ChernPackage) -> Result<GauduchonRicci> {
    let curv = curvature_closed_form(t, pkg)?;
    let route_residuals = ricci_route_disagreement(&curv, pkg)?;
    let worst = route_residuals.iter().cloned().fold(0.0, f64::max);
    if worst > RICCI_ROUTE_TOL {
        return Err(Error::ConsistencyFailure { what: "Ricci routes".into(), residual: worst, tol: RICCI_ROUTE_TOL });
    }
    Ok(GauduchonRicci { ricci: curv.ricci, route_residuals })
}

/// `(tScal, tScal~)` as traces, cross-checked against the closed forms.
pub fn gauduchon_scalars(t: f64, pkg: &ChernPackage) -> Result<(f64, f64)> {
    let curv = curvature_closed_form(t, pkg)?;
    let chk = scalar_identities(&curv, pkg);
    let tol = 1e-8 * (1.0 + curv.scal.abs().max(curv.scal_tilde.abs()));
    if chk.residual > tol {
        return Err(Error::ConsistencyFailure { what: "scalar curvature relations".into(), residual: chk.residual, tol });
    }
    Ok((curv.scal, curv.scal_tilde))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalarCheck {
    pub t: f64,
    pub scal: f64,
    pub scal_tilde: f64,
    pub predicted_scal: f64,
    pub predicted_scal_tilde: f64,
    pub residual: f64,
}

/// Compare the Gauduchon scalar curvatures against
/// `tScal = t Scal + (1-t) Scal~` and
/// `tScal~ = t Scal~ + (1-t) Scal - ((1-t)^2/4)(|T|^2 + |tau|^2)`.
pub fn scalar_identities(curv: &GauduchonCurvature, pkg: &ChernPackage) -> ScalarCheck {
    let t = curv.t;
    let q = pkg.quadratics();
    let ps = t * pkg.scal + (1.0 - t) * pkg.scal_tilde;
    let pst = t * pkg.scal_tilde + (1.0 - t) * pkg.scal - (1.0 - t).powi(2) / 4.0 * (q.t_norm2 + q.tau_norm2);
    let residual = (curv.scal - ps).abs().max((curv.scal_tilde - pst).abs());
    ScalarCheck { t, scal: curv.scal, scal_tilde: curv.scal_tilde, predicted_scal: ps, predicted_scal_tilde: pst, residual }
}

/// Holomorphic sectional curvature `R11(v, vbar, v, vbar) / |v|^4` for a
/// vector given in coordinates.
pub fn hsc(curv: &GauduchonCurvature, v: &[C64]) -> Result<f64> {
    if v.len() != curv.n {
        return Err(Error::DimensionMismatch { expected: curv.n, got: v.len() });
    }
    let w = curv.frame.vector_to_frame(v);
    hsc_frame(curv, &w)
}

/// Same as [`hsc`] for a vector given in the unitary frame.
pub fn hsc_frame(curv: &GauduchonCurvature, w: &[C64]) -> Result<f64> {
    let nrm2: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    if nrm2 < 1e-300 {
        return Err(Error::ZeroVector);
    }
    Ok(curv.r11_eval(w, w, w, w).re / (nrm2 * nrm2))
}

fn rotate_frame(r: &LabeledTensor, u: &CMat) -> LabeledTensor {
    let uc = u.map(|z| z.conj());
    let mut out = r.clone();
    for (axis, l) in r.labels.iter().enumerate() {
        let m = match l {
            HolDown | AntiholUp => u.clone(),
            HolUp | AntiholDown => uc.clone(),
        };
        out = out.apply_along(axis, &m);
    }
    out
}

fn check_rotation(u: &CMat, lambda: &[f64], n: usize) -> Result<f64> {
    if u.nrows() != n || u.ncols() != n || lambda.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lambda.len().min(u.nrows()) });
    }
    let res = crate::tensorcore::identity_residual(&(u.adjoint() * u));
    if res > 1e-10 {
        return Err(Error::InvalidParameter(format!("rotation is not unitary (residual {res:.2e})")));
    }
    let l2: f64 = lambda.iter().map(|x| x * x).sum();
    if l2 < 1e-300 {
        return Err(Error::ZeroVector);
    }
    Ok(l2)
}

/// Real bisectional curvature `sum R_{a abar c cbar} lambda_a lambda_c / |lambda|^2`
/// in the frame `e'_a = sum_b u[(b, a)] e_b`.
pub fn rbc(curv: &GauduchonCurvature, u: &CMat, lambda: &[f64]) -> Result<f64> {
    let l2 = check_rotation(u, lambda, curv.n)?;
    let r = rotate_frame(&curv.r11, u);
    let mut s = ZERO;
    for a in 0..curv.n {
        for c in 0..curv.n {
            s += r.get(&[a, a, c, c]) * (lambda[a] * lambda[c]);
        }
    }
    Ok(s.re / l2)
}

/// Altered real bisectional curvature, built on `R_{a cbar c abar}`.
pub fn altered_rbc(curv: &GauduchonCurvature, u: &CMat, lambda: &[f64]) -> Result<f64> {
    let l2 = check_rotation(u, lambda, curv.n)?;
    let r = rotate_frame(&curv.r11, u);
    let mut s = ZERO;
    for a in 0..curv.n {
        for c in 0..curv.n {
            s += r.get(&[a, c, c, a]) * (lambda[a] * lambda[c]);
        }
    }
    Ok(s.re / l2)
}

pub fn altered_hsc(curv: &GauduchonCurvature, u: &CMat, lambda: &[f64]) -> Result<f64> {
    Ok(rbc(curv, u, lambda)? + altered_rbc(curv, u, lambda)?)
}

/// `((t-1)^2 / (4|lambda|^2)) sum (T^i_{iq} conj(T^k_{kq}) + T^k_{iq} conj(T^k_{iq})) lambda_i lambda_k`
/// in the rotated frame.
pub fn altered_gap(t: f64, pkg: &ChernPackage, u: &CMat, lambda: &[f64]) -> Result<f64> {
    check_t(t)?;
    let n = pkg.n;
    let l2 = check_rotation(u, lambda, n)?;
    let tr = rotate_frame(&pkg.torsion_frame(), u);
    let mut s = ZERO;
    for i in 0..n {
        for k in 0..n {
            for q in 0..n {
                s += (tr.get(&[i, i, q]) * tr.get(&[k, k, q]).conj() + tr.get(&[k, i, q]) * tr.get(&[k, i, q]).conj())
                    * (lambda[i] * lambda[k]);
            }
        }
    }
    Ok((t - 1.0).powi(2) / (4.0 * l2) * s.re)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlteredCheck {
    pub value_t: f64,
    pub value_chern: f64,
    pub gap: f64,
    pub residual: f64,
}

/// Check `altered_hsc(t) = altered_hsc(1) - gap`.
pub fn altered_hsc_check(t: f64, pkg: &ChernPackage, u: &CMat, lambda: &[f64], tol: f64) -> Result<AlteredCheck> {
    let ct = curvature_closed_form(t, pkg)?;
    let c1 = curvature_closed_form(1.0, pkg)?;
    let value_t = altered_hsc(&ct, u, lambda)?;
    let value_chern = altered_hsc(&c1, u, lambda)?;
    let gap = altered_gap(t, pkg, u, lambda)?;
    let residual = (value_t - value_chern + gap).abs();
    if residual > tol * (1.0 + value_chern.abs()) {
        return Err(Error::ConsistencyFailure { what: "altered HSC gap".into(), residual, tol });
    }
    Ok(AlteredCheck { value_t, value_chern, gap, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BergerPairing {
    /// `R(v, vbar, w, wbar)`.
    Bisectional,
    /// `R(v, wbar, w, vbar)`.
    Altered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AverageOver {
    /// Average the second vector `w`, `v` fixed.
    Second,
    /// Average the first vector `v`, `w` fixed.
    First,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BergerMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BergerResult {
    pub average: C64,
    /// `Ric_k(x, xbar) / (n |x|^2)` for the matching trace.
    pub reference: C64,
    pub std_error: Option<f64>,
    pub deviation: f64,
}

/// Sphere average of a bisectional-type curvature against its Ricci trace.
/// `fixed` is the non-averaged vector, in coordinates.
pub fn berger_average(
    curv: &GauduchonCurvature,
    fixed: &[C64],
    pairing: BergerPairing,
    over: AverageOver,
    mode: BergerMode,
) -> Result<BergerResult> {
    let n = curv.n;
    if fixed.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: fixed.len() });
    }
    let x = curv.frame.vector_to_frame(fixed);
    let x2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if x2 < 1e-300 {
        return Err(Error::ZeroVector);
    }
    let eval = |y: &[C64]| -> C64 {
        let (v, w) = match over {
            AverageOver::Second => (&x[..], y),
            AverageOver::First => (y, &x[..]),
        };
        match pairing {
            BergerPairing::Bisectional => curv.r11_eval(v, v, w, w),
            BergerPairing::Altered => curv.r11_eval(v, w, w, v),
        }
    };
    let ric_idx = match (pairing, over) {
        (BergerPairing::Bisectional, AverageOver::Second) => 0,
        (BergerPairing::Bisectional, AverageOver::First) => 1,
        (BergerPairing::Altered, AverageOver::Second) => 2,
        (BergerPairing::Altered, AverageOver::First) => 3,
    };
    let ric = &curv.ricci[ric_idx];
    let mut rx = ZERO;
    for i in 0..n {
        for j in 0..n {
            rx += ric.get(&[i, j]) * x[i] * x[j].conj();
        }
    }
    let reference = rx / (n as f64 * x2);
    let (average, std_error) = match mode {
        BergerMode::Exact => {
            // E[w_k conj(w_l)] = delta_kl / n on the unit sphere.
            let mut s = ZERO;
            for k in 0..n {
                let mut e = vec![ZERO; n];
                e[k] = ONE;
                s += eval(&e);
            }
            (s / (n as f64 * x2), None)
        }
        BergerMode::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::InvalidParameter("need at least two samples".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sum = ZERO;
            let mut sq_re = 0.0;
            let mut sq_im = 0.0;
            for _ in 0..samples {
                let y = random_unit_vector(&mut rng, n);
                let v = eval(&y) / x2;
                sum += v;
                sq_re += v.re * v.re;
                sq_im += v.im * v.im;
            }
            let m = samples as f64;
            let mean = sum / m;
            let var = (sq_re / m - mean.re * mean.re) + (sq_im / m - mean.im * mean.im);
            (mean, Some((var.max(0.0) / (m - 1.0)).sqrt()))
        }
    };
    Ok(BergerResult { average, reference, std_error, deviation: (average - reference).norm() })
}

#[derive(Debug, Clone, Serialize)]
pub struct HscExtrema {
    pub min: f64,
    pub max: f64,
    pub argmin: (Vec<C64>, Vec<C64>),
    pub argmax: (Vec<C64>, Vec<C64>),
}

/// Extremes of HSC over the given points by random restarts and local
/// refinement on the unit sphere. Directions are reported in coordinates.
pub fn hsc_extrema(field: &MetricField, points: &[ChartPoint], t: f64, restarts: usize, seed: u64) -> Result<HscExtrema> {
    check_t(t)?;
    if points.is_empty() || restarts == 0 {
        return Err(Error::InvalidParameter("need at least one point and one restart".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = HscExtrema {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        argmin: (vec![], vec![]),
        argmax: (vec![], vec![]),
    };
    for p in points {
        let jet = evaluate_jet(field, p, 2)?;
        let pkg = crate::chern::chern_package(&jet)?;
        let curv = curvature_closed_form(t, &pkg)?;
        let n = curv.n;
        for sign in [1.0, -1.0] {
            for _ in 0..restarts {
                let mut w = random_unit_vector(&mut rng, n);
                let mut f = sign * hsc_frame(&curv, &w)?;
                let mut step = 0.5;
                while step > 1e-7 {
                    let mut improved = false;
                    for _ in 0..4 * n {
                        let cand: Vec<C64> = w
                            .iter()
                            .map(|z| {
                                z + C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * step
                            })
                            .collect();
                        let r = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                        let cand: Vec<C64> = cand.into_iter().map(|z| z / r).collect();
                        let fc = sign * hsc_frame(&curv, &cand)?;
                        if fc < f {
                            f = fc;
                            w = cand;
                            improved = true;
                        }
                    }
                    if !improved {
                        step *= 0.5;
                    }
                }
                let value = sign * f;
                let v = curv.frame.vector_from_frame(&w);
                if sign > 0.0 && value < best.min {
                    best.min = value;
                    best.argmin = (p.z.clone(), v);
                } else if sign < 0.0 && value > best.max {
                    best.max = value;
                    best.argmax = (p.z.clone(), v);
                }
            }
        }
    }
    Ok(best)
}

/// Torsion of `tnabla` on the complexified tangent space as a tangent-valued
/// 2-form: `data[(x, y, z)]` is the `z` component of `T(f_x, f_y)` where
/// `f_0..f_{n-1} = e_a` and `f_n..f_{2n-1} = ebar_a` in the unitary frame.
#[derive(Debug, Clone)]
pub struct TangentTwoForm {
    pub n: usize,
    pub data: Vec<C64>,
}

impl TangentTwoForm {
    fn zeros(n: usize) -> Self {
        TangentTwoForm { n, data: vec![ZERO; 8 * n * n * n] }
    }
    fn idx(&self, x: usize, y: usize, z: usize) -> usize {
        let m = 2 * self.n;
        (x * m + y) * m + z
    }
    pub fn get(&self, x: usize, y: usize, z: usize) -> C64 {
        self.data[self.idx(x, y, z)]
    }
    fn set(&mut self, x: usize, y: usize, z: usize, v: C64) {
        let i = self.idx(x, y, z);
        self.data[i] = v;
    }
    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
    /// Keep the slots `(x, y)` with the given number of holomorphic entries.
    fn form_part(&self, hol: usize) -> TangentTwoForm {
        let n = self.n;
        let mut out = self.clone();
        for x in 0..2 * n {
            for y in 0..2 * n {
                if [x, y].iter().filter(|&&s| s < n).count() != hol {
                    for z in 0..2 * n {
                        out.set(x, y, z, ZERO);
                    }
                }
            }
        }
        out
    }
    /// `(2,0) + (0,2)` form part with values of matching type.
    pub fn part_20(&self) -> TangentTwoForm {
        let n = self.n;
        let mut a = self.form_part(2);
        let b = self.form_part(0);
        for (k, v) in b.data.iter().enumerate() {
            a.data[k] += v;
        }
        // Zero the (0,1)-valued (2,0) and (1,0)-valued (0,2) pieces.
        for x in 0..2 * n {
            for y in 0..2 * n {
                for z in 0..2 * n {
                    if (x < n) != (z < n) {
                        a.set(x, y, z, ZERO);
                    }
                }
            }
        }
        a
    }
    /// Pieces of `T^{0,2}`: `(0,1)`-valued on two holomorphic slots and the
    /// conjugate.
    pub fn part_02(&self) -> TangentTwoForm {
        let n = self.n;
        let mut a = self.form_part(2);
        let b = self.form_part(0);
        for (k, v) in b.data.iter().enumerate() {
            a.data[k] += v;
        }
        for x in 0..2 * n {
            for y in 0..2 * n {
                for z in 0..2 * n {
                    if (x < n) == (z < n) {
                        a.set(x, y, z, ZERO);
                    }
                }
            }
        }
        a
    }
    pub fn part_11(&self) -> TangentTwoForm {
        self.form_part(1)
    }
    fn sub(&self, o: &TangentTwoForm) -> TangentTwoForm {
        TangentTwoForm { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }
}

/// Torsion of `tnabla` from its coordinate connection coefficients,
/// expressed in the unitary frame.
pub fn full_torsion(t: f64, jet: &MetricJet) -> Result<TangentTwoForm> {
    let cc = connection_coefficients(t, jet)?;
    let n = jet.n;
    let mut tc = TangentTwoForm::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // T(d_i, d_j) = nabla_i d_j - nabla_j d_i.
                let v = cc.hol[i][(k, j)] - cc.hol[j][(k, i)];
                tc.set(i, j, k, v);
                tc.set(n + i, n + j, n + k, v.conj());
                // T(d_i, dbar_j) = conj(nabla_ibar d_j) - nabla_jbar d_i.
                let bar = cc.antihol[i][(k, j)].conj();
                let hol = -cc.antihol[j][(k, i)];
                tc.set(i, n + j, n + k, bar);
                tc.set(i, n + j, k, hol);
                tc.set(n + j, i, n + k, -bar);
                tc.set(n + j, i, k, -hol);
            }
        }
    }
    let frame = jet.metric()?.unitary_frame()?;
    let b = complex_basis_matrix(&frame);
    let binv = b.clone().try_inverse().ok_or(Error::SingularMetric { row: 0, pivot: 0.0 })?;
    let m = 2 * n;
    let mut out = TangentTwoForm::zeros(n);
    for a in 0..m {
        for c in 0..m {
            for z in 0..m {
                let mut s = ZERO;
                for x in 0..m {
                    if b[(x, a)] == ZERO {
                        continue;
                    }
                    for y in 0..m {
                        if b[(y, c)] == ZERO {
                            continue;
                        }
                        let w = b[(x, a)] * b[(y, c)];
                        for zz in 0..m {
                            s += w * binv[(z, zz)] * tc.get(x, y, zz);
                        }
                    }
                }
                out.set(a, c, z, s);
            }
        }
    }
    Ok(out)
}

/// `B(alpha)(x, y, z) = (g(alpha(x,y), z) + g(alpha(y,z), x) + g(alpha(z,x), y)) / 3`
/// on frame vectors, with `g(e_a, ebar_b) = delta_ab`.
pub fn bianchi_projector(alpha: &TangentTwoForm) -> Form3 {
    let n = alpha.n;
    let m = 2 * n;
    let partner = |z: usize| if z < n { z + n } else { z - n };
    let gv = |x: usize, y: usize, z: usize| alpha.get(x, y, partner(z));
    let mut f = Form3::zeros(n, Frame::Unitary);
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                f.set(x, y, z, (gv(x, y, z) + gv(y, z, x) + gv(z, x, y)) / 3.0);
            }
        }
    }
    f
}

#[derive(Debug, Clone, Serialize)]
pub struct TorsionDecomposition {
    pub t: f64,
    /// `|T^{1,1}_b|`, which must vanish.
    pub t11_b_norm: f64,
    pub t11_c_norm: f64,
    pub t20_norm: f64,
    /// `|T^{0,2}|`, which must vanish.
    pub t02_norm: f64,
    /// `|B(T^{1,1}_c) - ((t-1)/3) d^c omega|`.
    pub residual_c: f64,
    /// `|B(T^{2,0} - T^{1,1}_c) - d^c omega / 3|`.
    pub residual_20: f64,
}

impl TorsionDecomposition {
    pub fn max_residual(&self) -> f64 {
        self.t11_b_norm.max(self.t02_norm).max(self.residual_c).max(self.residual_20)
    }
}

/// Split the torsion of `tnabla` into types and into the kernel of the
/// Bianchi projector and its orthogonal complement inside `Omega^{1,1}(TX)`.
pub fn torsion_decomposition(t: f64, jet: &MetricJet) -> Result<TorsionDecomposition> {
    check_t(t)?;
    let n = jet.n;
    let m = 2 * n;
    let tor = full_torsion(t, jet)?;
    let t11 = tor.part_11();
    let t20 = tor.part_20();
    let t02 = tor.part_02();

    // Coordinates of Omega^{1,1}(TX): alpha(e_a, ebar_b) in C^{2n}.
    let dim = n * n * m;
    let triples: Vec<(usize, usize, usize)> = (0..m)
        .flat_map(|x| (x + 1..m).flat_map(move |y| (y + 1..m).map(move |z| (x, y, z))))
        .collect();
    let mut bm = CMat::zeros(triples.len(), dim);
    let coord = |a: usize, b: usize, z: usize| (a * n + b) * m + z;
    for a in 0..n {
        for b in 0..n {
            for z in 0..m {
                let mut e = TangentTwoForm::zeros(n);
                e.set(a, n + b, z, ONE);
                e.set(n + b, a, z, -ONE);
                let f = bianchi_projector(&e);
                for (r, &(x, y, w)) in triples.iter().enumerate() {
                    bm[(r, coord(a, b, z))] = f.get(x, y, w);
                }
            }
        }
    }
    let v = nalgebra::DVector::from_fn(dim, |k, _| {
        let z = k % m;
        let b = (k / m) % n;
        let a = k / (m * n);
        t11.get(a, n + b, z)
    });
    // Orthogonal projection onto the row space of B = complement of ker B.
    let svd = bm.clone().svd(false, true);
    let vt = svd.v_t.ok_or(Error::DegenerateFit("SVD failed".into()))?;
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut proj = nalgebra::DVector::<C64>::zeros(dim);
    for (r, s) in svd.singular_values.iter().enumerate() {
        if *s > 1e-10 * smax {
            let row = vt.row(r);
            let coef: C64 = (0..dim).map(|k| row[k] * v[k]).sum();
            for k in 0..dim {
                proj[k] += row[k].conj() * coef;
            }
        }
    }
    let mut t11c = TangentTwoForm::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for z in 0..m {
                let val = proj[coord(a, b, z)];
                t11c.set(a, n + b, z, val);
                t11c.set(n + b, a, z, -val);
            }
        }
    }
    let t11b = t11.sub(&t11c);
    let frame = jet.metric()?.unitary_frame()?;
    let dc = dc_omega(jet).to_frame(&frame);
    let bc = bianchi_projector(&t11c);
    let residual_c = bc.sub(&dc.scale(C64::new((t - 1.0) / 3.0, 0.0))).max_abs();
    let b20 = bianchi_projector(&t20.sub(&t11c));
    let residual_20 = b20.sub(&dc.scale(C64::new(1.0 / 3.0, 0.0))).max_abs();
    Ok(TorsionDecomposition {
        t,
        t11_b_norm: t11b.norm2().sqrt(),
        t11_c_norm: t11c.norm2().sqrt(),
        t20_norm: t20.norm2().sqrt(),
        t02_norm: t02.norm2().sqrt(),
        residual_c,
        residual_20,
    })
}

/// Squared norm of the torsion of `tnabla`, summed over ordered pairs of
/// frame vectors of the complexified tangent space.
pub fn torsion_norm2(t: f64, jet: &MetricJet) -> Result<f64> {
    Ok(full_torsion(t, jet)?.norm2())
}

#[derive(Debug, Clone, Serialize)]
pub struct TorsionProfile {
    pub ts: Vec<f64>,
    pub norms: Vec<f64>,
    /// Least-squares quadratic `a t^2 + b t + c`.
    pub coeffs: [f64; 3],
    pub vertex: f64,
}

/// Torsion norm along the line and the vertex of its fitted parabola.
pub fn torsion_norm_profile(jet: &MetricJet, ts: &[f64]) -> Result<TorsionProfile> {
    if ts.len() < 3 {
        return Err(Error::DegenerateFit("need at least three values of t".into()));
    }
    let norms: Vec<f64> = ts.iter().map(|&t| torsion_norm2(t, jet)).collect::<Result<_>>()?;
    let a = nalgebra::DMatrix::from_fn(ts.len(), 3, |r, c| ts[r].powi(2 - c as i32));
    let y = nalgebra::DVector::from_vec(norms.clone());
    let sol = a
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let scale = norms.iter().cloned().fold(0.0, f64::max);
    if scale < 1e-24 {
        return Err(Error::DegenerateFit("torsion vanishes along the whole line".into()));
    }
    if sol[0] <= 1e-12 * scale {
        return Err(Error::DegenerateFit(format!(
            "torsion norm is not strictly convex in t (leading coefficient {:.3e})",
            sol[0]
        )));
    }
    let vertex = -sol[1] / (2.0 * sol[0]);
    Ok(TorsionProfile { ts: ts.to_vec(), norms, coeffs: [sol[0], sol[1], sol[2]], vertex })
}

/// Connection-matrix curvature of `tnabla` straight from its coordinate
/// coefficients, `R(X,Y) = X(w_Y) - Y(w_X) + [w_X, w_Y]`; returns the
/// unitary-frame `(R11, R20)`. Independent of both curvature formulas.
pub fn curvature_from_connection_matrices(t: f64, jet: &MetricJet) -> Result<(LabeledTensor, LabeledTensor)> {
    check_t(t)?;
    let n = jet.n;
    let cj = connection_jets(t, jet)?;
    let s = jet.space().clone();
    // w_i[(k, j)] and wb_i[(k, j)] as jets.
    let w: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|i| (0..n).map(|k| (0..n).map(|j| &cj.gamma[k][i][j] - &cj.astar[i][k][j]).collect()).collect())
        .collect();
    let wb: Vec<Vec<Vec<Jet>>> =
        (0..n).map(|i| (0..n).map(|k| (0..n).map(|j| cj.a[k][i][j].clone()).collect()).collect()).collect();
    let _ = s;
    let g = CMat::from_fn(n, n, |i, j| cj.g[i][j].value());
    let val = |m: &Vec<Vec<Jet>>| CMat::from_fn(n, n, |k, j| m[k][j].value());
    let dval = |m: &Vec<Vec<Jet>>, var: usize| CMat::from_fn(n, n, |k, j| m[k][j].partial(&[var]));
    let lower = |th: &CMat, k: usize, l: usize| -> C64 { (0..n).map(|p| th[(p, k)] * g[(p, l)]).sum() };
    let mut r11c = LabeledTensor::zeros(n, &R11_LABELS, Frame::Coordinate);
    let mut r20c = LabeledTensor::zeros(n, &R20_LABELS, Frame::Coordinate);
    for i in 0..n {
        for j in 0..n {
            let (wi, wj, wbj) = (val(&w[i]), val(&w[j]), val(&wb[j]));
            // X = d_i, Y = dbar_j.
            let th11 = dval(&wb[j], zv(i)) - dval(&w[i], zbv(n, j)) + (&wi * &wbj - &wbj * &wi);
            // X = d_i, Y = d_j.
            let th20 = dval(&w[j], zv(i)) - dval(&w[i], zv(j)) + (&wi * &wj - &wj * &wi);
            for k in 0..n {
                for l in 0..n {
                    r11c.set(&[i, j, k, l], lower(&th11, k, l));
                    r20c.set(&[i, j, k, l], lower(&th20, k, l));
                }
            }
        }
    }
    let frame = jet.metric()?.unitary_frame()?;
    Ok((to_unitary_frame(&r11c, &frame)?, to_unitary_frame(&r20c, &frame)?))
}
