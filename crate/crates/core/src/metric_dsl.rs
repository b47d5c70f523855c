//! Text format for metric fields.
//!
//! ```text
//! # Fubini-Study line
//! dim 1
//! g[1,1] = 1/(1 + z_1*zb_1)^2
//! ```
//!
//! The header `dim n` comes first. Entries `g[i,j] = expr` are given for
//! `i <= j` (1-based); missing entries default to the identity and
//! `g[j,i]` is the conjugate of `g[i,j]`. Expressions use `z_k`, `zb_k`,
//! real or imaginary literals (`2.5`, `0.5i`, `i`), `+ - * /`, integer powers
//! `^k`, and the functions `exp`, `log`, `sqrt`, `conj` and `abs2`; `abs2` also
//! takes several arguments and sums their squared moduli.

use crate::error::{Error, Result};
use crate::jets::{upper_index, GenericMetric, MetricField, Scalar};
use crate::tensorcore::{C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Exp,
    Log,
    Sqrt,
    Conj,
    Abs2,
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Const(C64),
    Z(usize),
    Zb(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, (usize, usize)),
    Pow(Box<Expr>, i32, (usize, usize)),
    Call(Func, Box<Expr>, (usize, usize)),
}

impl Expr {
    fn eval<S: Scalar>(&self, z: &[S], zb: &[S]) -> Result<S> {
        Ok(match self {
            Expr::Const(c) => z[0].lift(*c),
            Expr::Z(k) => z[*k].clone(),
            Expr::Zb(k) => zb[*k].clone(),
            Expr::Neg(a) => -a.eval(z, zb)?,
            Expr::Add(a, b) => a.eval(z, zb)? + b.eval(z, zb)?,
            Expr::Sub(a, b) => a.eval(z, zb)? - b.eval(z, zb)?,
            Expr::Mul(a, b) => a.eval(z, zb)? * b.eval(z, zb)?,
            Expr::Div(a, b, pos) => {
                let d = b.eval(z, zb)?;
                if d.value().norm() < 1e-300 {
                    return Err(eval_err(*pos, "division by zero"));
                }
                a.eval(z, zb)? * d.recip()
            }
            Expr::Pow(a, k, pos) => {
                let v = a.eval(z, zb)?;
                if *k < 0 && v.value().norm() < 1e-300 {
                    return Err(eval_err(*pos, "negative power of zero"));
                }
                v.powi(*k)
            }
            Expr::Call(f, a, pos) => {
                let v = a.eval(z, zb)?;
                match f {
                    Func::Exp => v.exp(),
                    Func::Log => {
                        if v.value().norm() < 1e-300 {
                            return Err(eval_err(*pos, "log of zero"));
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if v.value().norm() < 1e-300 {
                            return Err(eval_err(*pos, "sqrt is not differentiable at zero"));
                        }
                        v.sqrt()
                    }
                    Func::Conj => v.conj_swap(),
                    Func::Abs2 => {
                        let c = v.conj_swap();
                        v * c
                    }
                }
            }
        })
    }

    fn render(&self) -> String {
        match self {
            Expr::Const(c) => fmt_complex(*c),
            Expr::Z(k) => format!("z_{}", k + 1),
            Expr::Zb(k) => format!("zb_{}", k + 1),
            Expr::Neg(a) => format!("(-{})", a.render()),
            Expr::Add(a, b) => format!("({} + {})", a.render(), b.render()),
            Expr::Sub(a, b) => format!("({} - {})", a.render(), b.render()),
            Expr::Mul(a, b) => format!("{}*{}", a.render(), b.render()),
            Expr::Div(a, b, _) => format!("{}/{}", a.render(), b.render()),
            Expr::Pow(a, k, _) => format!("({})^{}", a.render(), k),
            Expr::Call(f, a, _) => {
                let name = match f {
                    Func::Exp => "exp",
                    Func::Log => "log",
                    Func::Sqrt => "sqrt",
                    Func::Conj => "conj",
                    Func::Abs2 => "abs2",
                };
                format!("{name}({})", a.render())
            }
        }
    }
}

/// Literal that parses back to exactly the same value.
pub fn fmt_complex(c: C64) -> String {
    match (c.re == 0.0, c.im == 0.0) {
        (_, true) => format!("{:?}", c.re),
        (true, false) => format!("{:?}i", c.im),
        (false, false) => format!("({:?} + {:?}i)", c.re, c.im),
    }
}

fn eval_err(pos: (usize, usize), msg: &str) -> Error {
    Error::EvaluationError { line: pos.0, col: pos.1, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, bool),
    Ident(String),
    Sym(char),
}

struct Lexer<'a> {
    chars: Vec<char>,
    i: usize,
    line: usize,
    _src: &'a str,
}

fn lex_line(src: &str, line: usize) -> Result<Vec<(Tok, usize)>> {
    let mut lx = Lexer { chars: src.chars().collect(), i: 0, line, _src: src };
    let mut out = Vec::new();
    while lx.i < lx.chars.len() {
        let c = lx.chars[lx.i];
        let col = lx.i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            lx.i += 1;
        } else if c.is_ascii_digit() || (c == '.' && lx.peek_digit(1)) {
            let start = lx.i;
            while lx.i < lx.chars.len() && (lx.chars[lx.i].is_ascii_digit() || lx.chars[lx.i] == '.') {
                lx.i += 1;
            }
            if lx.i < lx.chars.len() && (lx.chars[lx.i] == 'e' || lx.chars[lx.i] == 'E') {
                let save = lx.i;
                lx.i += 1;
                if lx.i < lx.chars.len() && (lx.chars[lx.i] == '+' || lx.chars[lx.i] == '-') {
                    lx.i += 1;
                }
                if lx.peek_digit(0) {
                    while lx.peek_digit(0) {
                        lx.i += 1;
                    }
                } else {
                    lx.i = save;
                }
            }
            let text: String = lx.chars[start..lx.i].iter().collect();
            let v: f64 = text.parse().map_err(|_| Error::SyntaxError {
                line: lx.line,
                col,
                msg: format!("bad number '{text}'"),
            })?;
            let imag = lx.i < lx.chars.len()
                && lx.chars[lx.i] == 'i'
                && !lx.chars.get(lx.i + 1).is_some_and(|c| c.is_alphanumeric() || *c == '_');
            if imag {
                lx.i += 1;
            }
            out.push((Tok::Num(v, imag), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = lx.i;
            while lx.i < lx.chars.len() && (lx.chars[lx.i].is_ascii_alphanumeric() || lx.chars[lx.i] == '_') {
                lx.i += 1;
            }
            out.push((Tok::Ident(lx.chars[start..lx.i].iter().collect()), col));
        } else if "+-*/^()[],=".contains(c) {
            out.push((Tok::Sym(c), col));
            lx.i += 1;
        } else {
            return Err(Error::SyntaxError { line, col, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

impl Lexer<'_> {
    fn peek_digit(&self, off: usize) -> bool {
        self.chars.get(self.i + off).is_some_and(|c| c.is_ascii_digit())
    }
}

struct Parser<'t> {
    toks: &'t [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
    n: usize,
}

impl<'t> Parser<'t> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::SyntaxError { line: self.line, col: self.col(), msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expect_int(&mut self) -> Result<usize> {
        match self.peek() {
            Some(Tok::Num(v, false)) if v.fract() == 0.0 && *v >= 0.0 => {
                let v = *v as usize;
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected a non-negative integer"),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_sym('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_sym('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let pos = (self.line, self.col());
                self.pos += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), pos);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_sym('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Sym('^')) {
            let pos = (self.line, self.col());
            self.pos += 1;
            let neg = self.eat_sym('-');
            let k = self.expect_int()? as i32;
            return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }, pos));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(v, imag)) => {
                self.pos += 1;
                Ok(Expr::Const(if imag { C64::new(0.0, v) } else { C64::new(v, 0.0) }))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "i" {
                    return Ok(Expr::Const(C64::new(0.0, 1.0)));
                }
                let func = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "log" => Some(Func::Log),
                    "sqrt" => Some(Func::Sqrt),
                    "conj" => Some(Func::Conj),
                    "abs2" => Some(Func::Abs2),
                    _ => None,
                };
                if let Some(f) = func {
                    self.expect_sym('(')?;
                    let pos = (self.line, col);
                    let mut e = Expr::Call(f, Box::new(self.expr()?), pos);
                    // abs2(a, b, ...) is |a|^2 + |b|^2 + ...
                    while f == Func::Abs2 && self.eat_sym(',') {
                        e = Expr::Add(Box::new(e), Box::new(Expr::Call(f, Box::new(self.expr()?), pos)));
                    }
                    self.expect_sym(')')?;
                    return Ok(e);
                }
                let (conj, rest) = if let Some(r) = name.strip_prefix("zb_") {
                    (true, r)
                } else if let Some(r) = name.strip_prefix("z_") {
                    (false, r)
                } else {
                    return Err(Error::SyntaxError { line: self.line, col, msg: format!("unknown name '{name}'") });
                };
                let k: usize = rest.parse().map_err(|_| Error::SyntaxError {
                    line: self.line,
                    col,
                    msg: format!("bad variable '{name}'"),
                })?;
                if k == 0 || k > self.n {
                    return Err(Error::DimensionError(format!(
                        "variable '{name}' at line {} exceeds dimension {}",
                        self.line, self.n
                    )));
                }
                Ok(if conj { Expr::Zb(k - 1) } else { Expr::Z(k - 1) })
            }
            _ => Err(Error::SyntaxError { line: self.line, col, msg: "expected an expression".into() }),
        }
    }
}

/// A metric parsed from text.
#[derive(Debug, Clone)]
pub struct DslMetric {
    n: usize,
    name: String,
    entries: Vec<Option<Expr>>,
    source: String,
}

impl DslMetric {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Canonical text of the parsed metric.
    pub fn render(&self) -> String {
        let mut s = format!("dim {}\n", self.n);
        for i in 0..self.n {
            for j in i..self.n {
                if let Some(e) = &self.entries[upper_index(self.n, i, j)] {
                    s.push_str(&format!("g[{},{}] = {}\n", i + 1, j + 1, e.render()));
                }
            }
        }
        s
    }
}

impl GenericMetric for DslMetric {
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        self.name.clone()
    }
    fn upper<S: Scalar>(&self, z: &[S], zb: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                out.push(match &self.entries[upper_index(n, i, j)] {
                    Some(e) => e.eval(z, zb)?,
                    None => z[0].lift(if i == j { ONE } else { ZERO }),
                });
            }
        }
        Ok(out)
    }
    fn dsl_source(&self) -> Option<String> {
        Some(self.source.clone())
    }
}

pub fn parse_metric_dsl(source: &str) -> Result<DslMetric> {
    let mut n: Option<usize> = None;
    let mut entries: Vec<Option<Expr>> = Vec::new();
    for (ln, text) in source.lines().enumerate() {
        let line = ln + 1;
        let toks = lex_line(text, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut p = Parser { toks: &toks, pos: 0, line, end_col: text.chars().count() + 1, n: n.unwrap_or(0) };
        match (&toks[0].0, n) {
            (Tok::Ident(h), None) if h == "dim" => {
                p.pos = 1;
                let d = p.expect_int()?;
                if d == 0 {
                    return Err(Error::DimensionError("dim must be at least 1".into()));
                }
                if p.pos != toks.len() {
                    return p.err("unexpected text after dimension");
                }
                n = Some(d);
                entries = vec![None; d * (d + 1) / 2];
            }
            (_, None) => return p.err("expected header 'dim n'"),
            (Tok::Ident(h), Some(_)) if h == "dim" => return p.err("duplicate 'dim' header"),
            (Tok::Ident(h), Some(d)) if h == "g" => {
                p.pos = 1;
                p.expect_sym('[')?;
                let i = p.expect_int()?;
                p.expect_sym(',')?;
                let j = p.expect_int()?;
                p.expect_sym(']')?;
                if i == 0 || j == 0 || i > d || j > d {
                    return Err(Error::DimensionError(format!("entry g[{i},{j}] at line {line} outside dimension {d}")));
                }
                if i > j {
                    return Err(Error::SyntaxError {
                        line,
                        col: toks[0].1,
                        msg: format!("give g[{j},{i}] instead of g[{i},{j}]"),
                    });
                }
                p.expect_sym('=')?;
                let e = p.expr()?;
                if p.pos != toks.len() {
                    return p.err("unexpected token");
                }
                let slot = &mut entries[upper_index(d, i - 1, j - 1)];
                if slot.is_some() {
                    return Err(Error::SyntaxError { line, col: toks[0].1, msg: format!("g[{i},{j}] defined twice") });
                }
                *slot = Some(e);
            }
            _ => return p.err("expected 'g[i,j] = expr'"),
        }
    }
    let n = n.ok_or(Error::SyntaxError { line: 1, col: 1, msg: "missing header 'dim n'".into() })?;
    let m = DslMetric { n, name: "dsl".into(), entries, source: source.to_string() };
    check_real_diagonal(&m)?;
    Ok(m)
}

/// Diagonal entries must be real functions: `conj(g_ii) = g_ii` as
/// expressions in `(z, zbar)`, probed at a few fixed points.
fn check_real_diagonal(m: &DslMetric) -> Result<()> {
    let n = m.n;
    let probes = [(0.31, -0.17), (-0.52, 0.44), (0.13, 0.71)];
    for i in 0..n {
        let Some(e) = &m.entries[upper_index(n, i, i)] else { continue };
        for (k, (a, b)) in probes.iter().enumerate() {
            let z: Vec<C64> = (0..n).map(|q| C64::new(a + 0.1 * q as f64, b - 0.07 * (q + k) as f64)).collect();
            let zb: Vec<C64> = z.iter().map(|w| w.conj()).collect();
            if let Ok(v) = e.eval(&z, &zb) {
                if v.im.abs() > 1e-10 * (1.0 + v.re.abs()) {
                    return Err(Error::NonHermitianEntry(i + 1));
                }
            }
        }
    }
    Ok(())
}

pub fn compile(m: DslMetric) -> MetricField {
    MetricField::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{evaluate_jet, ChartPoint};

    #[test]
    fn fubini_study_line() {
        let m = parse_metric_dsl("# FS\ndim 1\ng[1,1] = 1/(1 + z_1*zb_1)^2\n").unwrap();
        let f = compile(m);
        let p = ChartPoint::new(vec![C64::new(0.5, 0.0)]);
        let j = evaluate_jet(&f, &p, 2).unwrap();
        assert!((j.value()[(0, 0)].re - 0.64).abs() < 1e-15);
        // d/dz (1 + z zb)^-2 = -2 zb (1 + z zb)^-3
        let want = -2.0 * 0.5 / 1.25f64.powi(3);
        assert!((j.dz(0, 0, 0).re - want).abs() < 1e-14);
    }

    #[test]
    fn literals_and_functions() {
        let m = parse_metric_dsl("dim 2\ng[1,2] = 0.5i*z_1 + (1e-1 - 2i)\ng[2,2] = exp(abs2(z_2))").unwrap();
        let f = compile(m);
        let g = f.matrix_raw(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        assert!((g[(0, 1)] - C64::new(0.1, -1.5)).norm() < 1e-15);
        assert!((g[(1, 0)] - C64::new(0.1, 1.5)).norm() < 1e-15);
        assert!((g[(1, 1)].re - 1f64.exp()).abs() < 1e-14);
        assert_eq!(g[(0, 0)], ONE);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse_metric_dsl("dim 1\ng[1,1] = 1 + * z_1").unwrap_err();
        assert_eq!(e, Error::SyntaxError { line: 2, col: 14, msg: "expected an expression".into() });
        let e = parse_metric_dsl("g[1,1] = 1").unwrap_err();
        assert!(matches!(e, Error::SyntaxError { line: 1, col: 1, .. }));
        let e = parse_metric_dsl("dim 1\ng[1,1] = 1 $").unwrap_err();
        assert!(matches!(e, Error::SyntaxError { line: 2, col: 12, .. }));
    }

    #[test]
    fn dimension_and_hermitian_errors() {
        assert!(matches!(parse_metric_dsl("dim 1\ng[1,1] = z_2*zb_2"), Err(Error::DimensionError(_))));
        assert!(matches!(parse_metric_dsl("dim 1\ng[1,2] = 1"), Err(Error::DimensionError(_))));
        assert!(matches!(parse_metric_dsl("dim 1\ng[1,1] = 1 + z_1"), Err(Error::NonHermitianEntry(1))));
        assert!(matches!(parse_metric_dsl("dim 2\ng[2,1] = 1"), Err(Error::SyntaxError { .. })));
    }

    #[test]
    fn evaluation_error_on_pole() {
        let f = compile(parse_metric_dsl("dim 1\ng[1,1] = 1/(z_1*zb_1)").unwrap());
        let e = f.matrix_raw(&[ZERO]).unwrap_err();
        assert!(matches!(e, Error::EvaluationError { line: 2, col: 11, .. }));
    }

    #[test]
    fn render_round_trip() {
        let m = parse_metric_dsl("dim 2\ng[1,1] = 2 + abs2(z_2)\ng[1,2] = -0.25i*zb_1*z_2^2").unwrap();
        let again = parse_metric_dsl(&m.render()).unwrap();
        let z = [C64::new(0.3, 0.2), C64::new(-0.1, 0.4)];
        let a = compile(m).matrix_raw(&z).unwrap();
        let b = compile(again).matrix_raw(&z).unwrap();
        assert_eq!(a, b);
    }
}
