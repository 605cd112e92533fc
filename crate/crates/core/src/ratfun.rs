//! Truncations of rational functions `F = c A/B` and the classification
//! of the values they take on `F_p`.
//!
//! With `F_p(x) = sum_{n <= p-k} f_n x^n` and `A' = cA`, the difference
//! `B F_p - A'` is divisible by `x^{p-k+1}`, say `x^{p-k+1} Q*`. Every
//! solution of `F_p(x) = m` in `F_p` is then a root of
//! `R_m = m x^{k-1} B - (x^{k-1} A' + x Q*)`, and `R_m` vanishes identically
//! for at most one `m`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::ff::Fp;
use crate::hyptrunc::{reduce_rational, truncate, HypSpec, RationalParam};
use crate::poly::Poly;
use crate::{Error, Result};

/// A polynomial with exact integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    pub fn new(mut c: Vec<BigInt>) -> IntPoly {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        IntPoly(c)
    }

    pub fn from_i64(c: &[i64]) -> IntPoly {
        IntPoly::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.0.len().max(o.0.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    fn neg(&self) -> IntPoly {
        IntPoly(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    fn pow(&self, e: u32) -> IntPoly {
        (0..e).fold(IntPoly::from_i64(&[1]), |acc, _| acc.mul(self))
    }

    pub fn reduce(&self, f: Fp) -> Poly {
        let p = BigInt::from(f.p());
        Poly::new(
            f,
            self.0.iter().map(|c| c.mod_floor(&p).to_u64().expect("residue below p")).collect(),
        )
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return fm.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            match (first, neg) {
                (true, true) => fm.write_str("-")?,
                (false, true) => fm.write_str(" - ")?,
                (false, false) => fm.write_str(" + ")?,
                _ => {}
            }
            first = false;
            let unit = a.is_one() && i > 0;
            if !unit {
                write!(fm, "{a}")?;
            }
            match i {
                0 => {}
                1 => fm.write_str("x")?,
                _ => write!(fm, "x^{i}")?,
            }
        }
        Ok(())
    }
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let t = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(t.parse().expect("digits"))
    }

    fn expr(&mut self) -> Result<IntPoly> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc.add(&t) } else { acc.add(&t.neg()) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<IntPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(b'x' | b'(' | b'0'..=b'9') => acc = acc.mul(&self.power()?),
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<IntPoly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<IntPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.number()?;
            let e = e.to_u32().filter(|&e| e <= 10_000);
            match e {
                Some(e) => Ok(base.pow(e)),
                None => self.err("exponent too large"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<IntPoly> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(IntPoly::from_i64(&[0, 1]))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'0'..=b'9') => Ok(IntPoly::new(vec![self.number()?])),
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse an integer polynomial in `x` such as `"1 - 3x + x^3"` or `"(1-x)^2"`.
pub fn parse_int_poly(s: &str) -> Result<IntPoly> {
    let mut p = ExprParser { s: s.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// `F = c A / B` with `B(0) != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFun {
    pub a: IntPoly,
    pub b: IntPoly,
    pub c: BigRational,
}

impl RationalFun {
    pub fn new(a: IntPoly, b: IntPoly, c: BigRational) -> Result<RationalFun> {
        if b.coeff(0).is_zero() {
            return Err(Error::InvalidSpec("denominator must not vanish at 0".into()));
        }
        if c.is_zero() {
            return Err(Error::InvalidSpec("scalar must be nonzero".into()));
        }
        Ok(RationalFun { a, b, c })
    }

    pub fn parse(num: &str, den: &str) -> Result<RationalFun> {
        RationalFun::new(parse_int_poly(num)?, parse_int_poly(den)?, BigRational::one())
    }

    pub fn with_scalar(mut self, num: i64, den: i64) -> Result<RationalFun> {
        if den == 0 || num == 0 {
            return Err(Error::InvalidSpec("scalar must be a nonzero fraction".into()));
        }
        self.c = BigRational::new(num.into(), den.into());
        Ok(self)
    }
}

impl fmt::Display for RationalFun {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.c.is_one() {
            write!(fm, "{} * ", self.c)?;
        }
        write!(fm, "({}) / ({})", self.a, self.b)
    }
}

#[derive(Clone, Debug)]
pub struct RationalTruncation {
    pub p: u64,
    pub k: usize,
    /// `F_p`, degree at most `p - k` with `f_{p-k} != 0`.
    pub poly: Poly,
    /// `cA mod p`.
    pub a: Poly,
    /// `B mod p`.
    pub b: Poly,
}

/// Maclaurin coefficients `f_0 ..= f_{p-k}` of `F` from `B F = cA`.
pub fn truncate_rational(fun: &RationalFun, p: u64, k: usize) -> Result<RationalTruncation> {
    let f = Fp::new(p)?;
    if k == 0 || k as u64 > p {
        return Err(Error::InvalidSpec(format!("need 1 <= k <= p, got k = {k}")));
    }
    let pb = BigInt::from(p);
    if fun.b.coeff(0).mod_floor(&pb).is_zero() {
        return Err(Error::BadPrime { p, param: format!("B(0) = {}", fun.b.coeff(0)) });
    }
    let c = reduce_rational(&fun.c, f)
        .ok_or_else(|| Error::BadPrime { p, param: format!("c = {}", fun.c) })?;
    let a = fun.a.reduce(f).scale(c);
    let b = fun.b.reduce(f);
    let b0inv = f.inv(b.coeff(0))?;
    let n = p as usize - k;
    let mut fs = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut acc = a.coeff(i);
        for j in 1..=i.min(b.coeffs().len().saturating_sub(1)) {
            acc = f.sub(acc, f.mul(b.coeff(j), fs[i - j]));
        }
        fs.push(f.mul(acc, b0inv));
    }
    if fs[n] == 0 {
        return Err(Error::BadK { p, k });
    }
    Ok(RationalTruncation { p, k, poly: Poly::new(f, fs), a, b })
}

/// The first `k` in `1..=k_max` with `f_{p-k} != 0`.
pub fn truncate_rational_auto(fun: &RationalFun, p: u64, k_max: usize) -> Result<RationalTruncation> {
    let mut last = Error::BadK { p, k: 1 };
    for k in 1..=k_max.min(p as usize) {
        match truncate_rational(fun, p, k) {
            Err(e @ Error::BadK { .. }) => last = e,
            r => return r,
        }
    }
    Err(last)
}

#[derive(Clone, Debug, Serialize)]
pub struct ValueClassification {
    pub p: u64,
    pub k: usize,
    /// The unique `m` with `R_m == 0`, if any.
    pub exceptional_m0: Option<u64>,
    /// `max(deg P1, deg P0)`, bounding the roots of every other `R_m`.
    pub bound: usize,
    #[serde(skip)]
    pub p1: Poly,
    #[serde(skip)]
    pub p0: Poly,
}

impl ValueClassification {
    /// `R_m = m P1 - P0`.
    pub fn r(&self, m: u64) -> Poly {
        self.p1.scale(m).sub(&self.p0)
    }
}

pub fn classify(t: &RationalTruncation) -> Result<ValueClassification> {
    let f = t.poly.field();
    let q = t.b.mul(&t.poly).sub(&t.a);
    let v = t.p as usize - t.k + 1;
    let q_star = q
        .unshift(v)
        .ok_or_else(|| Error::Degenerate(format!("B F_p - cA not divisible by x^{v}")))?;
    let p1 = t.b.shift(t.k - 1);
    let p0 = t.a.shift(t.k - 1).add(&q_star.shift(1));
    let d1 = p1.degree().expect("B(0) != 0");
    let m0 = f.div(p0.coeff(d1), p1.lead())?;
    let exceptional_m0 = (p1.scale(m0) == p0).then_some(m0);
    let bound = d1.max(p0.degree().unwrap_or(0));
    Ok(ValueClassification { p: t.p, k: t.k, exceptional_m0, bound, p1, p0 })
}

pub fn classify_values(fun: &RationalFun, p: u64, k: usize) -> Result<ValueClassification> {
    classify(&truncate_rational(fun, p, k)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationCheck {
    pub p: u64,
    pub k: usize,
    pub exceptional_m0: Option<u64>,
    /// `#{x : F_p(x) = m0}`.
    pub exceptional_count: Option<u32>,
    pub counts: Vec<u32>,
    /// Residues `m` whose count exceeds `deg R_m`.
    pub over_bound: Vec<u64>,
    pub violations: Vec<String>,
}

impl ClassificationCheck {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive evaluation over `F_p` against the classification.
pub fn verify_classification(fun: &RationalFun, p: u64, k: usize) -> Result<ClassificationCheck> {
    let t = truncate_rational(fun, p, k)?;
    let cl = classify(&t)?;
    let f = t.poly.field();
    let mut counts = vec![0u32; p as usize];
    let mut violations = Vec::new();
    for x in 0..p {
        let m = t.poly.eval(x);
        counts[m as usize] += 1;
        if f.sub(f.mul(m, cl.p1.eval(x)), cl.p0.eval(x)) != 0 {
            violations.push(format!("x = {x}: R_m(x) != 0 for m = {m}"));
        }
    }
    if let Some(m0) = cl.exceptional_m0 {
        for x in 0..p {
            let outside = t.b.eval(x) != 0 && (k == 1 || x != 0);
            if outside && t.poly.eval(x) != m0 {
                violations.push(format!("x = {x} lies off the exceptional class {m0}"));
            }
        }
    }
    let mut over_bound = Vec::new();
    for (m, &c) in counts.iter().enumerate() {
        let m = m as u64;
        if c == 0 || Some(m) == cl.exceptional_m0 {
            continue;
        }
        let deg = cl.r(m).degree().unwrap_or(0);
        if c as usize > deg {
            over_bound.push(m);
            violations.push(format!("m = {m}: {c} solutions exceed deg R_m = {deg}"));
        }
    }
    Ok(ClassificationCheck {
        p,
        k,
        exceptional_m0: cl.exceptional_m0,
        exceptional_count: cl.exceptional_m0.map(|m| counts[m as usize]),
        counts,
        over_bound,
        violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicExampleReport {
    pub u: u64,
    pub v: u64,
    pub p: u64,
    pub e: u64,
    pub spec: String,
    /// `F(x^2) == ((1-x)^{2E} + (1+x)^{2E}) / 2` as polynomials.
    pub identity_holds: bool,
    /// Values of `F(x^2)` over `x` in `F_p`, ascending.
    pub attained: Vec<u64>,
    /// For `(u, v) = (2, 3)`: attained values that are not roots of
    /// `(4m^3 - 1)^3 - 27m^3`, with a witness `x`.
    pub non_roots: Vec<(u64, u64)>,
    /// For `(u, v) = (2, 3)`: every value at `x` outside `{1, -1}` is a root.
    pub generic_values_are_roots: Option<bool>,
    /// For `(u, v) = (2, 3)`: the value `m` at `x = 1, -1` satisfies `8m^3 = 1`.
    pub boundary_cubic: Option<bool>,
}

impl AlgebraicExampleReport {
    /// `(4m^3 - 1)^3 - 27m^3` has at most 7 distinct roots, so at most 7
    /// values are attained when every attained value is a root.
    pub fn attained_count(&self) -> usize {
        self.attained.len()
    }
}

fn g_23(f: Fp, m: u64) -> u64 {
    let m3 = f.pow(m, 3);
    f.sub(f.pow(f.sub(f.mul(4, m3), 1), 3), f.mul(27, m3))
}

/// Check the `2F1(u/2v, (u+v)/2v; 1/2)` identity at `x^2` and, for
/// `(u, v) = (2, 3)`, the value set against `(4m^3 - 1)^3 = 27m^3`.
pub fn algebraic_example_check(u: u64, v: u64, p: u64) -> Result<AlgebraicExampleReport> {
    let f = Fp::new(p)?;
    if u == 0 || u > v || u.gcd(&v) != 1 {
        return Err(Error::InvalidSpec(format!("need coprime 0 < u <= v, got {u}/{v}")));
    }
    if p % (2 * v) != 1 {
        return Err(Error::Unsupported(format!("need p = 1 mod {}, got p = {p}", 2 * v)));
    }
    let e = (p - 1) / (2 * v) * u;
    let spec = HypSpec::new(
        vec![RationalParam::reduced(u, 2 * v)?, RationalParam::reduced(u + v, 2 * v)?],
        vec![RationalParam::new(1, 2)?],
    )?;
    let t = truncate(&spec, p)?;
    let lhs = t.poly.inflate(2);
    let half = f.inv(2)?;
    let rhs = Poly::from_signed(f, &[1, -1])
        .pow(2 * e)
        .add(&Poly::from_signed(f, &[1, 1]).pow(2 * e))
        .scale(half);
    let values: Vec<u64> = (0..p).map(|x| t.poly.eval(f.mul(x, x))).collect();
    let attained: BTreeSet<u64> = values.iter().copied().collect();
    let (mut non_roots, mut generic, mut boundary) = (Vec::new(), None, None);
    if (u, v) == (2, 3) {
        let mut seen = BTreeSet::new();
        let mut gen_ok = true;
        for (x, &m) in values.iter().enumerate() {
            let root = g_23(f, m) == 0;
            let edge = x == 1 || x as u64 == p - 1;
            if !edge {
                gen_ok &= root;
            }
            if !root && seen.insert(m) {
                non_roots.push((m, x as u64));
            }
        }
        let mb = values[1];
        generic = Some(gen_ok);
        boundary = Some(f.mul(8, f.pow(mb, 3)) == 1);
    }
    Ok(AlgebraicExampleReport {
        u,
        v,
        p,
        e,
        spec: spec.to_string(),
        identity_holds: lhs == rhs,
        attained: attained.into_iter().collect(),
        non_roots,
        generic_values_are_roots: generic,
        boundary_cubic: boundary,
    })
}
