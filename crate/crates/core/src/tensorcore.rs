//! Labeled tensors over the holomorphic/antiholomorphic index alphabet,
//! Hermitian matrices and unitary frames.
//!
//! Components are stored dense and row-major in label order. A metric is
//! stored as `g[i][j] = g_{i jbar}`; its inverse is exposed through
//! [`HermitianMatrix::inv_upper`], which returns `g^{k lbar}` normalised so
//! that `sum_l g^{k lbar} g_{j lbar} = delta_kj`.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexLabel {
    HolUp,
    HolDown,
    AntiholUp,
    AntiholDown,
}

impl IndexLabel {
    pub fn dual(self) -> IndexLabel {
        match self {
            IndexLabel::HolUp => IndexLabel::HolDown,
            IndexLabel::HolDown => IndexLabel::HolUp,
            IndexLabel::AntiholUp => IndexLabel::AntiholDown,
            IndexLabel::AntiholDown => IndexLabel::AntiholUp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    Coordinate,
    Unitary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTensor {
    pub labels: Vec<IndexLabel>,
    pub frame: Frame,
    pub n: usize,
    pub data: Vec<C64>,
}

impl LabeledTensor {
    pub fn zeros(n: usize, labels: &[IndexLabel], frame: Frame) -> Self {
        let len = n.pow(labels.len() as u32);
        LabeledTensor { labels: labels.to_vec(), frame, n, data: vec![ZERO; len] }
    }

    pub fn from_fn(
        n: usize,
        labels: &[IndexLabel],
        frame: Frame,
        mut f: impl FnMut(&[usize]) -> C64,
    ) -> Self {
        let mut t = Self::zeros(n, labels, frame);
        let mut idx = vec![0usize; labels.len()];
        for k in 0..t.data.len() {
            t.data[k] = f(&idx);
            increment(&mut idx, n);
        }
        t
    }

    pub fn from_matrix(m: &CMat, labels: [IndexLabel; 2], frame: Frame) -> Self {
        let n = m.nrows();
        Self::from_fn(n, &labels, frame, |ix| m[(ix[0], ix[1])])
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: C64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    /// Rank-2 tensors only.
    pub fn to_matrix(&self) -> CMat {
        assert_eq!(self.rank(), 2);
        CMat::from_fn(self.n, self.n, |i, j| self.get(&[i, j]))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.labels != other.labels || self.n != other.n || self.frame != other.frame {
            return Err(Error::IncompatibleIndices(format!(
                "{:?}/{:?} vs {:?}/{:?}",
                self.labels, self.frame, other.labels, other.frame
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    /// Largest componentwise difference; errors on a label mismatch.
    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Multiply every component by a matrix along one axis:
    /// `out[.. a ..] = sum_i self[.. i ..] m[(i, a)]`.
    pub fn apply_along(&self, axis: usize, m: &CMat) -> Self {
        let n = self.n;
        let stride = n.pow((self.rank() - axis - 1) as u32);
        let mut out = self.clone();
        out.data.iter_mut().for_each(|z| *z = ZERO);
        for (off, v) in self.data.iter().enumerate() {
            if *v == ZERO {
                continue;
            }
            let i = (off / stride) % n;
            let base = off - i * stride;
            for a in 0..n {
                out.data[base + a * stride] += v * m[(i, a)];
            }
        }
        out
    }
}

pub(crate) fn increment(idx: &mut [usize], n: usize) {
    for d in (0..idx.len()).rev() {
        idx[d] += 1;
        if idx[d] < n {
            return;
        }
        idx[d] = 0;
    }
}

/// Contract index `ia` of `a` against index `ib` of `b`. The two labels must
/// be dual (an upper holomorphic index against a lower one, and likewise for
/// antiholomorphic indices).
pub fn contract(a: &LabeledTensor, ia: usize, b: &LabeledTensor, ib: usize) -> Result<LabeledTensor> {
    if a.n != b.n || a.frame != b.frame {
        return Err(Error::IncompatibleIndices("dimension or frame differs".into()));
    }
    if ia >= a.rank() || ib >= b.rank() || a.labels[ia].dual() != b.labels[ib] {
        return Err(Error::IncompatibleIndices(format!(
            "cannot contract {:?} with {:?}",
            a.labels.get(ia),
            b.labels.get(ib)
        )));
    }
    let mut labels: Vec<IndexLabel> = a.labels.clone();
    labels.remove(ia);
    let mut lb = b.labels.clone();
    lb.remove(ib);
    labels.extend(lb);
    let n = a.n;
    let ra = a.rank() - 1;
    let mut ia_full = vec![0; a.rank()];
    let mut ib_full = vec![0; b.rank()];
    Ok(LabeledTensor::from_fn(n, &labels, a.frame, |ix| {
        let (xa, xb) = ix.split_at(ra);
        let mut s = ZERO;
        for k in 0..n {
            fill_with(&mut ia_full, xa, ia, k);
            fill_with(&mut ib_full, xb, ib, k);
            s += a.get(&ia_full) * b.get(&ib_full);
        }
        s
    }))
}

fn fill_with(full: &mut [usize], rest: &[usize], at: usize, k: usize) {
    let mut r = 0;
    for (d, slot) in full.iter_mut().enumerate() {
        if d == at {
            *slot = k;
        } else {
            *slot = rest[r];
            r += 1;
        }
    }
}

/// Trace a holomorphic index against an antiholomorphic one of the same
/// tensor with the metric: `g^{i jbar}` for two lower indices, `g_{i jbar}`
/// for two upper ones. `i1` must be the holomorphic slot.
pub fn contract_with_metric(
    t: &LabeledTensor,
    i1: usize,
    i2: usize,
    g: &HermitianMatrix,
) -> Result<LabeledTensor> {
    if i1 == i2 || i1 >= t.rank() || i2 >= t.rank() || t.n != g.n() {
        return Err(Error::IncompatibleIndices("bad metric contraction slots".into()));
    }
    let w: CMat = match (t.labels[i1], t.labels[i2]) {
        (IndexLabel::HolDown, IndexLabel::AntiholDown) => g.inv_upper()?,
        (IndexLabel::HolUp, IndexLabel::AntiholUp) => g.matrix().clone(),
        (a, b) => {
            return Err(Error::IncompatibleIndices(format!("metric cannot pair {a:?} with {b:?}")))
        }
    };
    let labels: Vec<IndexLabel> = t
        .labels
        .iter()
        .enumerate()
        .filter(|(d, _)| *d != i1 && *d != i2)
        .map(|(_, l)| *l)
        .collect();
    let n = t.n;
    let mut full = vec![0; t.rank()];
    Ok(LabeledTensor::from_fn(n, &labels, t.frame, |ix| {
        let mut s = ZERO;
        for p in 0..n {
            for q in 0..n {
                let mut r = 0;
                for (d, slot) in full.iter_mut().enumerate() {
                    if d == i1 {
                        *slot = p;
                    } else if d == i2 {
                        *slot = q;
                    } else {
                        *slot = ix[r];
                        r += 1;
                    }
                }
                s += w[(p, q)] * t.get(&full);
            }
        }
        s
    }))
}

/// A Hermitian positive definite matrix `g_{i jbar}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMat,
}

impl HermitianMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > 1e-12 * scale {
                    return Err(Error::IncompatibleIndices(format!(
                        "matrix is not Hermitian at ({i},{j})"
                    )));
                }
            }
        }
        Ok(HermitianMatrix { m })
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    /// Matrix inverse `g^{-1}`, via the triangular factor. A non-positive
    /// pivot is reported as [`Error::SingularMetric`].
    pub fn hermitian_inverse(&self) -> Result<CMat> {
        let f = self.unitary_frame()?;
        // E^T g conj(E) = 1  =>  g^{-1} = conj(E) E^T.
        Ok(f.e.map(|z| z.conj()) * f.e.transpose())
    }

    /// `g^{k lbar}` as a matrix indexed `[k][l]`.
    pub fn inv_upper(&self) -> Result<CMat> {
        Ok(self.hermitian_inverse()?.transpose())
    }

    /// Lower-triangular frame `E` with positive real diagonal such that the
    /// vectors `e_a = sum_i E[i][a] d/dz_i` are unitary:
    /// `sum_ij E[i][a] g_{i jbar} conj(E[j][b]) = delta_ab`.
    pub fn unitary_frame(&self) -> Result<UnitaryFrame> {
        let n = self.n();
        // g^T = U U^dagger with U upper triangular, obtained by a Cholesky
        // factorisation of the index-reversed matrix.
        let gt = self.m.transpose();
        let rev = CMat::from_fn(n, n, |i, j| gt[(n - 1 - i, n - 1 - j)]);
        let l = cholesky(&rev)?;
        let u = CMat::from_fn(n, n, |i, j| l[(n - 1 - i, n - 1 - j)]);
        // E = (U^dagger)^{-1} gives E^dagger g^T E = 1, the conjugate of the
        // component condition above.
        let e = lower_inverse(&u.adjoint());
        let einv = lower_inverse(&e);
        Ok(UnitaryFrame { e, einv })
    }

    pub fn frame_residual(&self, f: &UnitaryFrame) -> f64 {
        let r = f.e.transpose() * &self.m * f.e.map(|z| z.conj()) - CMat::identity(self.n(), self.n());
        r.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn cholesky(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let scale = (0..n).map(|i| a[(i, i)].re.abs()).fold(0.0, f64::max).max(1e-300);
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 1e-14 * scale) {
            return Err(Error::SingularMetric { row: j, pivot: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

fn lower_inverse(l: &CMat) -> CMat {
    let n = l.nrows();
    let mut inv = CMat::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { ONE } else { ZERO };
            for k in c..i {
                s -= l[(i, k)] * inv[(k, c)];
            }
            inv[(i, c)] = s / l[(i, i)];
        }
    }
    inv
}

/// A unitary frame `e_a = sum_i e[(i, a)] d/dz_i` together with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFrame {
    pub e: CMat,
    pub einv: CMat,
}

impl UnitaryFrame {
    pub fn n(&self) -> usize {
        self.e.nrows()
    }

    /// Matrix used to move one index of the given type into the frame.
    fn frame_map(&self, l: IndexLabel) -> CMat {
        match l {
            IndexLabel::HolDown => self.e.clone(),
            IndexLabel::HolUp => self.einv.transpose(),
            IndexLabel::AntiholDown => self.e.map(|z| z.conj()),
            IndexLabel::AntiholUp => self.einv.transpose().map(|z| z.conj()),
        }
    }

    fn out_of_frame(&self, l: IndexLabel) -> CMat {
        match l {
            IndexLabel::HolDown => self.einv.clone(),
            IndexLabel::HolUp => self.e.transpose(),
            IndexLabel::AntiholDown => self.einv.map(|z| z.conj()),
            IndexLabel::AntiholUp => self.e.transpose().map(|z| z.conj()),
        }
    }

    /// Components of a vector given in coordinates, expressed in the frame.
    pub fn vector_to_frame(&self, v: &[C64]) -> Vec<C64> {
        let n = self.n();
        (0..n).map(|a| (0..n).map(|i| self.einv[(a, i)] * v[i]).sum()).collect()
    }

    pub fn vector_from_frame(&self, w: &[C64]) -> Vec<C64> {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|a| self.e[(i, a)] * w[a]).sum()).collect()
    }
}

pub fn to_unitary_frame(t: &LabeledTensor, f: &UnitaryFrame) -> Result<LabeledTensor> {
    if t.frame != Frame::Coordinate {
        return Err(Error::IncompatibleIndices("tensor is already in a unitary frame".into()));
    }
    if t.n != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: t.n });
    }
    let mut out = t.clone();
    for (axis, l) in t.labels.iter().enumerate() {
        out = out.apply_along(axis, &f.frame_map(*l));
    }
    out.frame = Frame::Unitary;
    Ok(out)
}

pub fn from_unitary_frame(t: &LabeledTensor, f: &UnitaryFrame) -> Result<LabeledTensor> {
    if t.frame != Frame::Unitary {
        return Err(Error::IncompatibleIndices("tensor is not in a unitary frame".into()));
    }
    if t.n != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: t.n });
    }
    let mut out = t.clone();
    for (axis, l) in t.labels.iter().enumerate() {
        out = out.apply_along(axis, &f.out_of_frame(*l));
    }
    out.frame = Frame::Coordinate;
    Ok(out)
}

/// Relative deviation of `m` from the identity.
pub fn identity_residual(m: &CMat) -> f64 {
    let n = m.nrows();
    (m - CMat::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use IndexLabel::*;

    fn sample_metric() -> HermitianMatrix {
        let a = CMat::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.2));
        HermitianMatrix::new(a.adjoint() * &a + CMat::identity(3, 3)).unwrap()
    }

    #[test]
    fn inverse_and_frame() {
        let g = sample_metric();
        let inv = g.hermitian_inverse().unwrap();
        assert!(identity_residual(&(g.matrix() * &inv)) < 1e-12);
        let f = g.unitary_frame().unwrap();
        assert!(g.frame_residual(&f) < 1e-12);
        for i in 0..3 {
            assert!(f.e[(i, i)].re > 0.0 && f.e[(i, i)].im == 0.0);
            for j in i + 1..3 {
                assert_eq!(f.e[(i, j)], ZERO);
            }
        }
        let gi = g.inv_upper().unwrap();
        for k in 0..3 {
            for j in 0..3 {
                let s: C64 = (0..3).map(|l| gi[(k, l)] * g.matrix()[(j, l)]).sum();
                let want = if k == j { ONE } else { ZERO };
                assert!((s - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_metric_rejected() {
        let m = CMat::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        let g = HermitianMatrix::new(m).unwrap();
        assert!(matches!(g.hermitian_inverse(), Err(Error::SingularMetric { .. })));
    }

    #[test]
    fn metric_becomes_identity_in_frame() {
        let g = sample_metric();
        let f = g.unitary_frame().unwrap();
        let t = LabeledTensor::from_matrix(g.matrix(), [HolDown, AntiholDown], Frame::Coordinate);
        let u = to_unitary_frame(&t, &f).unwrap();
        assert!(identity_residual(&u.to_matrix()) < 1e-12);
        let back = from_unitary_frame(&u, &f).unwrap();
        assert!(back.max_diff(&t).unwrap() < 1e-12);
    }

    #[test]
    fn contraction_matches_loops() {
        let n = 3;
        let a = LabeledTensor::from_fn(n, &[HolUp, HolDown, HolDown], Frame::Coordinate, |ix| {
            C64::new(ix[0] as f64 + 0.5 * ix[1] as f64, ix[2] as f64 - 1.0)
        });
        let b = LabeledTensor::from_fn(n, &[HolUp, AntiholDown], Frame::Coordinate, |ix| {
            C64::new(1.0 + ix[0] as f64, 0.3 * ix[1] as f64)
        });
        let c = contract(&a, 1, &b, 0).unwrap();
        assert_eq!(c.labels, vec![HolUp, HolDown, AntiholDown]);
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    let s: C64 = (0..n).map(|p| a.get(&[i, p, k]) * b.get(&[p, j])).sum();
                    assert!((c.get(&[i, k, j]) - s).norm() < 1e-14);
                }
            }
        }
        assert!(matches!(contract(&a, 0, &b, 0), Err(Error::IncompatibleIndices(_))));
    }

    #[test]
    fn metric_trace_matches_loops() {
        let g = sample_metric();
        let gi = g.inv_upper().unwrap();
        let t = LabeledTensor::from_fn(3, &[HolDown, AntiholDown, HolDown], Frame::Coordinate, |ix| {
            C64::new((ix[0] * 3 + ix[1]) as f64, ix[2] as f64)
        });
        let r = contract_with_metric(&t, 0, 1, &g).unwrap();
        for k in 0..3 {
            let s: C64 = (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .map(|(i, j)| gi[(i, j)] * t.get(&[i, j, k]))
                .sum();
            assert!((r.get(&[k]) - s).norm() < 1e-12);
        }
        assert!(contract_with_metric(&t, 0, 2, &g).is_err());
    }
}
