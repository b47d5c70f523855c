//! Truncated multivariate Taylor polynomials with complex coefficients.
//!
//! A [`Jet`] is `sum_alpha c_alpha t^alpha` over monomials of total degree at
//! most the space order. Derivatives read off as `alpha! * c_alpha`.
//! Differentiating a jet lowers its `valid` degree by one; products only
//! fill degrees that both factors determine.

use crate::tensorcore::{C64, ONE, ZERO};
use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

pub const MAX_ORDER: usize = 3;

#[derive(Debug)]
pub struct JetSpace {
    pub nvars: usize,
    pub order: usize,
    exps: Vec<Vec<u8>>,
    deg: Vec<u8>,
    index: HashMap<Vec<u8>, usize>,
    /// (a, b, a*b) sorted by the degree of the product.
    mul: Vec<(u32, u32, u32)>,
    /// `mul_upto[d]` = number of leading entries of `mul` with product degree <= d.
    mul_upto: Vec<usize>,
    /// `deriv[v][c] = Some((c - e_v, exponent of v in c))`.
    deriv: Vec<Vec<Option<(usize, f64)>>>,
    /// Monomial obtained by swapping variable `v` with `v +- nvars/2`.
    swap: Vec<usize>,
    factorial: Vec<f64>,
    /// `start[d]` = first monomial of degree d.
    start: Vec<usize>,
}

type SpaceCache = HashMap<(usize, usize), Arc<JetSpace>>;

impl JetSpace {
    fn build(nvars: usize, order: usize) -> JetSpace {
        let mut exps: Vec<Vec<u8>> = vec![vec![0; nvars]];
        let mut start = vec![0, 1];
        let mut frontier = vec![vec![0u8; nvars]];
        for _ in 1..=order {
            let mut next: Vec<Vec<u8>> = Vec::new();
            for e in &frontier {
                // Graded order: only raise variables at or after the last used.
                let last = e.iter().rposition(|&x| x > 0).unwrap_or(0);
                for v in last..nvars {
                    let mut f = e.clone();
                    f[v] += 1;
                    next.push(f);
                }
            }
            exps.extend(next.iter().cloned());
            start.push(exps.len());
            frontier = next;
        }
        let index: HashMap<Vec<u8>, usize> = exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let deg: Vec<u8> = exps.iter().map(|e| e.iter().sum()).collect();
        let mut mul = Vec::new();
        for a in 0..exps.len() {
            for b in 0..exps.len() {
                if (deg[a] + deg[b]) as usize <= order {
                    let prod: Vec<u8> = exps[a].iter().zip(&exps[b]).map(|(x, y)| x + y).collect();
                    mul.push((a as u32, b as u32, index[&prod] as u32));
                }
            }
        }
        mul.sort_by_key(|&(_, _, c)| deg[c as usize]);
        let mul_upto = (0..=order)
            .map(|d| mul.iter().take_while(|&&(_, _, c)| deg[c as usize] as usize <= d).count())
            .collect();
        let deriv = (0..nvars)
            .map(|v| {
                exps.iter()
                    .map(|e| {
                        if e[v] == 0 {
                            None
                        } else {
                            let mut f = e.clone();
                            f[v] -= 1;
                            Some((index[&f], e[v] as f64))
                        }
                    })
                    .collect()
            })
            .collect();
        let half = nvars / 2;
        let swap = exps
            .iter()
            .map(|e| {
                let mut f = e.clone();
                if nvars.is_multiple_of(2) {
                    for v in 0..half {
                        f.swap(v, v + half);
                    }
                }
                index[&f]
            })
            .collect();
        let factorial = exps
            .iter()
            .map(|e| e.iter().map(|&k| (1..=k as u32).product::<u32>() as f64).product())
            .collect();
        JetSpace { nvars, order, exps, deg, index, mul, mul_upto, deriv, swap, factorial, start }
    }

    /// Shared space for `nvars` variables truncated at `order`.
    pub fn get(nvars: usize, order: usize) -> Arc<JetSpace> {
        static CACHE: OnceLock<Mutex<SpaceCache>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(JetSpace::build(nvars, order)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self, m: usize) -> &[u8] {
        &self.exps[m]
    }

    pub fn degree(&self, m: usize) -> usize {
        self.deg[m] as usize
    }

    /// Monomials of exactly degree `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        self.start[d]..self.start[d + 1]
    }

    /// Monomial index of the product of the listed variables.
    pub fn monomial(&self, vars: &[usize]) -> Option<usize> {
        let mut e = vec![0u8; self.nvars];
        for &v in vars {
            if v >= self.nvars {
                return None;
            }
            e[v] += 1;
        }
        self.index.get(&e).copied()
    }

    pub fn factorial(&self, m: usize) -> f64 {
        self.factorial[m]
    }

    pub fn swapped(&self, m: usize) -> usize {
        self.swap[m]
    }
}

#[derive(Debug, Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    c: Vec<C64>,
    valid: usize,
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, v: C64) -> Jet {
        let mut c = vec![ZERO; space.len()];
        c[0] = v;
        Jet { space: space.clone(), c, valid: space.order }
    }

    /// The coordinate function `x0 + t_var`.
    pub fn variable(space: &Arc<JetSpace>, var: usize, x0: C64) -> Jet {
        let mut j = Jet::constant(space, x0);
        j.c[1 + var] = ONE;
        j
    }

    /// Jet with the given coefficients, truncated above degree `valid`.
    pub fn from_coeffs(space: &Arc<JetSpace>, c: Vec<C64>, valid: usize) -> Jet {
        assert_eq!(c.len(), space.len());
        let mut j = Jet { space: space.clone(), c, valid: valid.min(space.order) };
        j.zero_above();
        j
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn valid(&self) -> usize {
        self.valid
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    pub fn coeff(&self, m: usize) -> C64 {
        self.c[m]
    }

    /// Mixed partial derivative in the listed variables at the base point.
    pub fn partial(&self, vars: &[usize]) -> C64 {
        assert!(vars.len() <= self.valid, "derivative order exceeds jet validity");
        let m = self.space.monomial(vars).expect("variable out of range");
        self.c[m] * self.space.factorial[m]
    }

    /// Derivative with respect to one variable, as a jet of one lower order.
    pub fn diff(&self, var: usize) -> Jet {
        assert!(self.valid >= 1, "cannot differentiate a constant-order jet");
        let mut c = vec![ZERO; self.c.len()];
        for (m, d) in self.space.deriv[var].iter().enumerate() {
            if let Some((lower, k)) = d {
                if self.space.deg[m] as usize <= self.valid {
                    c[*lower] += self.c[m] * *k;
                }
            }
        }
        Jet { space: self.space.clone(), c, valid: self.valid - 1 }
    }

    /// The jet of `conj(f)` when the first half of the variables are the
    /// holomorphic coordinates and the second half their conjugates.
    pub fn conj_swap(&self) -> Jet {
        let mut c = vec![ZERO; self.c.len()];
        for (m, v) in self.c.iter().enumerate() {
            c[self.space.swap[m]] = v.conj();
        }
        Jet { space: self.space.clone(), c, valid: self.valid }
    }

    pub fn scale(&self, s: C64) -> Jet {
        Jet { space: self.space.clone(), c: self.c.iter().map(|z| z * s).collect(), valid: self.valid }
    }

    fn zero_above(&mut self) {
        let end = self.space.start[self.valid + 1];
        self.c[end..].iter_mut().for_each(|z| *z = ZERO);
    }

    fn mul_ref(&self, o: &Jet) -> Jet {
        debug_assert!(Arc::ptr_eq(&self.space, &o.space));
        let valid = self.valid.min(o.valid);
        let mut c = vec![ZERO; self.c.len()];
        let n = self.space.mul_upto[valid];
        for &(a, b, p) in &self.space.mul[..n] {
            let x = self.c[a as usize];
            if x != ZERO {
                c[p as usize] += x * o.c[b as usize];
            }
        }
        Jet { space: self.space.clone(), c, valid }
    }

    /// `sum_k a[k] (f - f(0))^k`.
    fn compose(&self, a: &[C64]) -> Jet {
        let mut h = self.clone();
        h.c[0] = ZERO;
        let k = self.valid.min(a.len() - 1);
        let mut r = Jet::constant(&self.space, a[k]);
        r.valid = self.valid;
        for i in (0..k).rev() {
            r = r.mul_ref(&h);
            r.c[0] += a[i];
        }
        r.zero_above();
        r
    }

    pub fn recip(&self) -> Jet {
        let x = self.c[0];
        let mut a = Vec::with_capacity(MAX_ORDER + 1);
        let mut p = ONE / x;
        for _ in 0..=self.valid {
            a.push(p);
            p = -p / x;
        }
        self.compose(&a)
    }

    pub fn exp(&self) -> Jet {
        let e = self.c[0].exp();
        let mut a = Vec::new();
        let mut f = 1.0;
        for k in 0..=self.valid {
            if k > 0 {
                f *= k as f64;
            }
            a.push(e / f);
        }
        self.compose(&a)
    }

    pub fn ln(&self) -> Jet {
        let x = self.c[0];
        let mut a = vec![x.ln()];
        for k in 1..=self.valid {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            a.push(C64::new(sign / k as f64, 0.0) / x.powi(k as i32));
        }
        self.compose(&a)
    }

    pub fn sqrt(&self) -> Jet {
        let x = self.c[0];
        let mut a = Vec::new();
        let mut binom = 1.0;
        for k in 0..=self.valid {
            if k > 0 {
                binom *= (0.5 - (k as f64 - 1.0)) / k as f64;
            }
            a.push(x.sqrt() * binom / x.powi(k as i32));
        }
        self.compose(&a)
    }

    pub fn powi(&self, k: i32) -> Jet {
        if k < 0 {
            return self.recip().powi(-k);
        }
        let mut r = Jet::constant(&self.space, ONE);
        r.valid = self.valid;
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        r
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let valid = self.valid.min(o.valid);
        let mut r = Jet {
            space: self.space.clone(),
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
            valid,
        };
        r.zero_above();
        r
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let valid = self.valid.min(o.valid);
        let mut r = Jet {
            space: self.space.clone(),
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
            valid,
        };
        r.zero_above();
        r
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        self.mul_ref(o)
    }
}

impl<'a> Div<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn div(self, o: &Jet) -> Jet {
        self.mul_ref(&o.recip())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Jet {
            type Output = Jet;
            fn $f(self, o: Jet) -> Jet { (&self).$f(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-ONE)
    }
}

/// Field-like operations shared by plain complex numbers and jets, so a
/// metric written once can be evaluated either way.
pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    /// A constant living in the same space as `self`.
    fn lift(&self, c: C64) -> Self;
    fn value(&self) -> C64;
    fn recip(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powi(&self, k: i32) -> Self;
    /// Complex conjugate as a function of `(z, zbar)`.
    fn conj_swap(&self) -> Self;
    fn scale(&self, s: C64) -> Self;
}

impl Scalar for C64 {
    fn lift(&self, c: C64) -> Self {
        c
    }
    fn value(&self) -> C64 {
        *self
    }
    fn recip(&self) -> Self {
        ONE / self
    }
    fn exp(&self) -> Self {
        C64::exp(*self)
    }
    fn ln(&self) -> Self {
        C64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        C64::sqrt(*self)
    }
    fn powi(&self, k: i32) -> Self {
        C64::powi(self, k)
    }
    fn conj_swap(&self) -> Self {
        self.conj()
    }
    fn scale(&self, s: C64) -> Self {
        self * s
    }
}

impl Scalar for Jet {
    fn lift(&self, c: C64) -> Self {
        let mut j = Jet::constant(&self.space, c);
        j.valid = self.valid;
        j
    }
    fn value(&self) -> C64 {
        self.c[0]
    }
    fn recip(&self) -> Self {
        Jet::recip(self)
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn ln(&self) -> Self {
        Jet::ln(self)
    }
    fn sqrt(&self) -> Self {
        Jet::sqrt(self)
    }
    fn powi(&self, k: i32) -> Self {
        Jet::powi(self, k)
    }
    fn conj_swap(&self) -> Self {
        Jet::conj_swap(self)
    }
    fn scale(&self, s: C64) -> Self {
        Jet::scale(self, s)
    }
}

/// Solve `a x = b` for square jet matrices by Gauss-Jordan elimination with
/// partial pivoting on the base values. Returns `None` for a singular base.
pub fn jet_solve(a: &[Vec<Jet>], b: &[Vec<Jet>]) -> Option<Vec<Vec<Jet>>> {
    let n = a.len();
    let mut a: Vec<Vec<Jet>> = a.to_vec();
    let mut b: Vec<Vec<Jet>> = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].value().norm().total_cmp(&a[j][col].value().norm()))?;
        if a[piv][col].value().norm() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &inv;
        }
        for j in 0..b[col].len() {
            b[col][j] = &b[col][j] * &inv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] = &a[r][j] - &t;
            }
            for j in 0..b[r].len() {
                let t = &f * &b[col][j];
                b[r][j] = &b[r][j] - &t;
            }
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn monomial_count() {
        let s = JetSpace::get(6, 3);
        assert_eq!(s.len(), 84);
        assert_eq!(s.degree_range(2).len(), 21);
    }

    #[test]
    fn univariate_derivatives() {
        let s = JetSpace::get(1, 3);
        let x0 = C64::new(0.7, 0.2);
        let x = Jet::variable(&s, 0, x0);
        let f = x.exp();
        for k in 0..=3 {
            assert!(close(f.partial(&vec![0; k]), x0.exp(), 1e-14));
        }
        let g = x.ln();
        assert!(close(g.partial(&[0]), ONE / x0, 1e-14));
        assert!(close(g.partial(&[0, 0]), -ONE / (x0 * x0), 1e-14));
        assert!(close(g.partial(&[0, 0, 0]), 2.0 * ONE / x0.powi(3), 1e-14));
        let r = x.sqrt();
        assert!(close(r.partial(&[0, 0]), -0.25 * x0.powf(-1.5), 1e-13));
        let p = x.powi(-2);
        assert!(close(p.partial(&[0, 0, 0]), -24.0 * x0.powi(-5), 1e-13));
    }

    #[test]
    fn product_rule_and_swap() {
        let s = JetSpace::get(2, 3);
        let z0 = C64::new(0.3, -0.4);
        let z = Jet::variable(&s, 0, z0);
        let zb = Jet::variable(&s, 1, z0.conj());
        // f = z^2 zb, conj(f) = zb^2 z.
        let f = &(&z * &z) * &zb;
        assert!(close(f.partial(&[0, 0, 1]), C64::new(2.0, 0.0), 1e-14));
        assert!(close(f.partial(&[0, 1]), 2.0 * z0, 1e-14));
        let g = f.conj_swap();
        let want = &(&zb * &zb) * &z;
        for m in 0..s.len() {
            assert!(close(g.coeff(m), want.coeff(m), 1e-14));
        }
    }

    #[test]
    fn diff_lowers_validity() {
        let s = JetSpace::get(2, 2);
        let z = Jet::variable(&s, 0, ONE);
        let f = &z * &z;
        let d = f.diff(0);
        assert_eq!(d.valid(), 1);
        assert!(close(d.value(), 2.0 * ONE, 1e-15));
        assert!(close(d.partial(&[0]), 2.0 * ONE, 1e-15));
    }

    #[test]
    fn matrix_solve_inverts() {
        let s = JetSpace::get(2, 2);
        let z = Jet::variable(&s, 0, C64::new(0.5, 0.1));
        let w = Jet::variable(&s, 1, C64::new(-0.2, 0.3));
        let one = Jet::constant(&s, ONE);
        let zero = Jet::constant(&s, ZERO);
        let a = vec![vec![&one + &(&z * &w), z.clone()], vec![w.clone(), &one + &one]];
        let id = vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]];
        let inv = jet_solve(&a, &id).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s_ij = &a[i][0] * &inv[0][j];
                s_ij = &s_ij + &(&a[i][1] * &inv[1][j]);
                for m in 0..s.len() {
                    let want = if m == 0 && i == j { ONE } else { ZERO };
                    assert!((s_ij.coeff(m) - want).norm() < 1e-13);
                }
            }
        }
    }
}
