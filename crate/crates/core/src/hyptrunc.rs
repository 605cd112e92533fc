//! Natural truncations `F^(p)` of hypergeometric series with rational
//! parameters.
//!
//! For a parameter `a/b` the Pochhammer symbol `(a/b)_n` first vanishes
//! mod `p` at `n = n_i + 1`, where `n_i = (u p - a) / b` and `u` is the
//! least positive residue of `a / p` mod `b` (`n_i = p - a` when `b = 1`).
//! The truncation keeps the terms `0..=N` with `N` the least of these
//! indices over numerator and denominator parameters and the `n!` bound
//! `p - 1`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::ff::Fp;
use crate::poly::Poly;
use crate::{Error, Result};

/// A rational parameter `a/b` with `gcd(a, b) = 1` and `1 <= a <= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RationalParam {
    a: u64,
    b: u64,
}

impl RationalParam {
    pub fn new(a: u64, b: u64) -> Result<RationalParam> {
        if a == 0 || b == 0 || a > b {
            return Err(Error::OutOfRange { num: a, den: b });
        }
        if a.gcd(&b) != 1 {
            return Err(Error::NonReduced { num: a, den: b });
        }
        Ok(RationalParam { a, b })
    }

    /// `num/den` brought to lowest terms first.
    pub fn reduced(num: u64, den: u64) -> Result<RationalParam> {
        if den == 0 {
            return Err(Error::OutOfRange { num, den });
        }
        let g = num.gcd(&den).max(1);
        RationalParam::new(num / g, den / g)
    }

    pub fn one() -> RationalParam {
        RationalParam { a: 1, b: 1 }
    }

    pub fn num(self) -> u64 {
        self.a
    }

    pub fn den(self) -> u64 {
        self.b
    }

    /// `1 - a/b`, for `a < b`.
    pub fn complement(self) -> Result<RationalParam> {
        RationalParam::reduced(self.b - self.a, self.b)
    }

    /// The parameter as a residue mod `p`.
    pub fn residue(self, f: Fp) -> Result<u64> {
        let p = f.p();
        if self.b % p == 0 {
            return Err(Error::BadPrime {
                p,
                param: self.to_string(),
            });
        }
        f.div(f.reduce(self.a), f.reduce(self.b))
    }

    /// `(omega, n)` with `n = (omega p - a) / b` the largest index for
    /// which `(a/b)_n` is nonzero mod `p`.
    pub fn natural_index(self, p: u64) -> Result<(u64, u64)> {
        if self.b % p == 0 {
            return Err(Error::BadPrime {
                p,
                param: self.to_string(),
            });
        }
        if self.b == 1 {
            return Ok((1, p - self.a));
        }
        let b = self.b as u128;
        let pbar = mod_inverse(p as u128 % b, b);
        let mut u = (self.a as u128 % b) * pbar % b;
        if u == 0 {
            u = b;
        }
        let n = (u * p as u128 - self.a as u128) / b;
        Ok((u as u64, n as u64))
    }

    pub fn to_big(self) -> BigRational {
        BigRational::new(BigInt::from(self.a), BigInt::from(self.b))
    }
}

fn mod_inverse(x: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let (mut r0, mut r1) = (m as i128, x as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(m as i128) as u128
}

impl fmt::Display for RationalParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 1 {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}/{}", self.a, self.b)
        }
    }
}

/// `(a)_n` mod `p` for a rational parameter.
pub fn pochhammer(a: RationalParam, n: u64, f: Fp) -> Result<u64> {
    let x = a.residue(f)?;
    Ok(pochhammer_residue(x, n, f))
}

/// `(x)_n = x (x+1) ... (x+n-1)` for a residue `x`.
pub fn pochhammer_residue(x: u64, n: u64, f: Fp) -> u64 {
    let mut acc = 1u64;
    let mut t = x;
    for _ in 0..n {
        acc = f.mul(acc, t);
        if acc == 0 {
            return 0;
        }
        t = f.add(t, 1);
    }
    acc
}

/// A `dF(d-1)` series: `d` numerator parameters and `d - 1` denominator
/// parameters besides the implicit `n!`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HypSpec {
    num: Vec<RationalParam>,
    den: Vec<RationalParam>,
}

impl HypSpec {
    pub fn new(num: Vec<RationalParam>, den: Vec<RationalParam>) -> Result<HypSpec> {
        if num.is_empty() {
            return Err(Error::InvalidSpec("need at least one numerator parameter".into()));
        }
        if den.len() + 1 != num.len() {
            return Err(Error::InvalidSpec(format!(
                "{} numerator parameters need {} denominator parameters, got {}",
                num.len(),
                num.len() - 1,
                den.len()
            )));
        }
        Ok(HypSpec { num, den })
    }

    /// `2F1(a, b; 1)`.
    pub fn f21(a: RationalParam, b: RationalParam) -> HypSpec {
        HypSpec {
            num: vec![a, b],
            den: vec![RationalParam::one()],
        }
    }

    /// `2F1(a, b; c)` from fractions given as `(num, den)` pairs, reduced.
    pub fn f21_ratios(a: (u64, u64), b: (u64, u64), c: (u64, u64)) -> Result<HypSpec> {
        HypSpec::new(
            vec![RationalParam::reduced(a.0, a.1)?, RationalParam::reduced(b.0, b.1)?],
            vec![RationalParam::reduced(c.0, c.1)?],
        )
    }

    pub fn numerators(&self) -> &[RationalParam] {
        &self.num
    }

    pub fn denominators(&self) -> &[RationalParam] {
        &self.den
    }

    /// Number of numerator parameters.
    pub fn order(&self) -> usize {
        self.num.len()
    }
}

impl fmt::Display for HypSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[RationalParam]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "{}F{}({};{})",
            self.num.len(),
            self.den.len(),
            join(&self.num),
            join(&self.den)
        )
    }
}

/// Grammar: `dFe(a1/b1,...,ad/bd; c1/d1,...,ce/de)` with `e = d - 1`;
/// an integer `k` stands for `k/1`. Whitespace is ignored.
impl FromStr for HypSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<HypSpec> {
        Parser { s: s.as_bytes(), pos: 0 }.spec()
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        text.parse().or_else(|_| {
            self.pos = start;
            self.err("number too large")
        })
    }

    fn param(&mut self) -> Result<RationalParam> {
        self.skip_ws();
        let start = self.pos;
        let a = self.number()?;
        let b = if self.peek() == Some(b'/') {
            self.pos += 1;
            self.number()?
        } else {
            1
        };
        RationalParam::new(a, b).map_err(|e| match e {
            Error::NonReduced { .. } | Error::OutOfRange { .. } => {
                self.pos = start;
                Error::Parse {
                    pos: start,
                    msg: e.to_string(),
                }
            }
            other => other,
        })
    }

    fn list(&mut self, close: u8) -> Result<Vec<RationalParam>> {
        let mut out = Vec::new();
        if self.peek() == Some(close) {
            return Ok(out);
        }
        loop {
            out.push(self.param()?);
            if self.peek() == Some(b',') {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }

    fn spec(mut self) -> Result<HypSpec> {
        let d = self.number()?;
        self.expect(b'F')?;
        let e = self.number()?;
        self.expect(b'(')?;
        let num = self.list(b';')?;
        self.expect(b';')?;
        let den = self.list(b')')?;
        self.expect(b')')?;
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        if num.len() as u64 != d || den.len() as u64 != e {
            return Err(Error::Parse {
                pos: 0,
                msg: format!(
                    "{d}F{e} declares {d} and {e} parameters, found {} and {}",
                    num.len(),
                    den.len()
                ),
            });
        }
        if e + 1 != d {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("{d}F{e}: need e = d - 1"),
            });
        }
        HypSpec::new(num, den)
    }
}

/// Which factor of the term ratio fixes the truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Bound {
    Numerator(usize),
    Denominator(usize),
    Factorial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ParamIndex {
    pub param: RationalParam,
    pub omega: u64,
    pub n: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncationReport {
    /// Truncation degree.
    pub n: u64,
    pub numerators: Vec<ParamIndex>,
    pub denominators: Vec<ParamIndex>,
    /// First factor attaining the minimum, in the order numerators,
    /// denominators, `n!`.
    pub minimizer: Bound,
    /// Whether the `n!` bound `p - 1` is attained.
    pub factorial_bound: bool,
}

impl TruncationReport {
    /// `(omega, a, b)` of the minimizing factor; `(1, 1, 1)` for `n!`.
    pub fn triple(&self) -> (u64, u64, u64) {
        let pick = |x: &ParamIndex| (x.omega, x.param.num(), x.param.den());
        match self.minimizer {
            Bound::Numerator(i) => pick(&self.numerators[i]),
            Bound::Denominator(i) => pick(&self.denominators[i]),
            Bound::Factorial => (1, 1, 1),
        }
    }
}

pub fn truncation_degree(spec: &HypSpec, p: u64) -> Result<TruncationReport> {
    Fp::new(p)?;
    let index = |v: &[RationalParam]| -> Result<Vec<ParamIndex>> {
        v.iter()
            .map(|&param| {
                let (omega, n) = param.natural_index(p)?;
                Ok(ParamIndex { param, omega, n })
            })
            .collect()
    };
    let numerators = index(&spec.num)?;
    let denominators = index(&spec.den)?;
    let mut n = p - 1;
    let mut minimizer = Bound::Factorial;
    for (i, x) in numerators.iter().enumerate() {
        if x.n < n || (x.n == n && minimizer == Bound::Factorial) {
            n = x.n;
            minimizer = Bound::Numerator(i);
        }
    }
    for (i, x) in denominators.iter().enumerate() {
        if x.n < n || (x.n == n && minimizer == Bound::Factorial) {
            n = x.n;
            minimizer = Bound::Denominator(i);
        }
    }
    Ok(TruncationReport {
        n,
        numerators,
        denominators,
        minimizer,
        factorial_bound: n == p - 1,
    })
}

/// `F^(p)` together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedPoly {
    pub poly: Poly,
    pub report: TruncationReport,
    pub spec: HypSpec,
    pub p: u64,
}

impl TruncatedPoly {
    pub fn degree(&self) -> usize {
        self.poly.degree().expect("c_0 = 1")
    }

    pub fn field(&self) -> Fp {
        self.poly.field()
    }
}

const INV_BLOCK: usize = 64;

/// Coefficients `c_0..=c_N` from the term ratio
/// `c_{n+1} / c_n = prod(alpha_i + n) / ((n + 1) prod(beta_j + n))`,
/// with one field inversion per block of steps.
pub fn truncate(spec: &HypSpec, p: u64) -> Result<TruncatedPoly> {
    let f = Fp::new(p)?;
    let report = truncation_degree(spec, p)?;
    let n_max = report.n as usize;
    // alpha + n = (a + n b) / b; collect the 1/b factors into one constant
    let mut k = 1u64;
    for x in &spec.den {
        k = f.mul(k, f.reduce(x.den()));
    }
    let mut kd = 1u64;
    for x in &spec.num {
        kd = f.mul(kd, f.reduce(x.den()));
    }
    k = f.div(k, kd)?;
    let lin = |x: &RationalParam, n: u64| f.add(f.reduce(x.num()), f.mul(f.reduce(n), f.reduce(x.den())));

    let mut c = Vec::with_capacity(n_max + 1);
    c.push(1u64);
    let mut inv = Vec::with_capacity(INV_BLOCK);
    let mut start = 0;
    while start < n_max {
        let end = (start + INV_BLOCK).min(n_max);
        inv.clear();
        for n in start as u64..end as u64 {
            let mut d = f.reduce(n + 1);
            for x in &spec.den {
                d = f.mul(d, lin(x, n));
            }
            inv.push(d);
        }
        f.batch_inv(&mut inv)?;
        for (j, n) in (start as u64..end as u64).enumerate() {
            let mut num = k;
            for x in &spec.num {
                num = f.mul(num, lin(x, n));
            }
            let last = *c.last().expect("nonempty");
            c.push(f.mul(last, f.mul(num, inv[j])));
        }
        start = end;
    }
    let poly = Poly::new(f, c);
    debug_assert_eq!(poly.degree(), Some(n_max));
    Ok(TruncatedPoly {
        poly,
        report,
        spec: spec.clone(),
        p,
    })
}

/// The exact rational coefficient `prod (alpha_i)_n / (n! prod (beta_j)_n)`.
pub fn exact_coefficient(spec: &HypSpec, n: u64) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..n {
        let jj = BigRational::from_integer(BigInt::from(j));
        for x in &spec.num {
            acc *= x.to_big() + &jj;
        }
        for x in &spec.den {
            acc /= x.to_big() + &jj;
        }
        acc /= BigRational::from_integer(BigInt::from(j + 1));
    }
    acc
}

/// Reduce an exact rational mod `p`; `None` if `p` divides the denominator.
pub fn reduce_rational(x: &BigRational, f: Fp) -> Option<u64> {
    let p = BigInt::from(f.p());
    let num = x.numer().mod_floor(&p);
    let den = x.denom().mod_floor(&p);
    if den.is_zero() {
        return None;
    }
    let to_u64 = |v: BigInt| -> u64 { v.try_into().expect("reduced below p") };
    f.div(to_u64(num), to_u64(den)).ok()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralityCheck {
    pub integral: bool,
    pub value: BigRational,
}

/// `b^n / gcd(a,b)^{2n} * prod_{j<n} (a + b j) / n!` in exact arithmetic.
pub fn binomial_integrality_check(a: u64, b: u64, n: u64) -> IntegralityCheck {
    let g = BigInt::from(a.gcd(&b));
    let bb = BigInt::from(b);
    let mut num = num_traits::pow(bb.clone(), n as usize);
    let mut den = num_traits::pow(g, 2 * n as usize);
    for j in 0..n {
        num *= BigInt::from(a) + &bb * BigInt::from(j);
        den *= BigInt::from(j + 1);
    }
    let value = BigRational::new(num, den);
    IntegralityCheck {
        integral: value.is_integer(),
        value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rp(a: u64, b: u64) -> RationalParam {
        RationalParam::new(a, b).unwrap()
    }

    #[test]
    fn param_validation() {
        assert_eq!(RationalParam::new(2, 4), Err(Error::NonReduced { num: 2, den: 4 }));
        assert!(matches!(RationalParam::new(3, 2), Err(Error::OutOfRange { .. })));
        assert!(matches!(RationalParam::new(0, 2), Err(Error::OutOfRange { .. })));
        assert_eq!(RationalParam::reduced(2, 4).unwrap(), rp(1, 2));
        assert_eq!(RationalParam::reduced(6, 6).unwrap(), RationalParam::one());
    }

    #[test]
    fn pochhammer_examples() {
        let f7 = Fp::new(7).unwrap();
        assert_eq!(pochhammer(rp(1, 2), 0, f7).unwrap(), 1);
        assert_eq!(pochhammer(rp(1, 2), 3, f7).unwrap(), 1);
        for p in [5u64, 7, 11, 101] {
            let f = Fp::new(p).unwrap();
            let d = (p - 1) / 2;
            assert_ne!(pochhammer(rp(1, 2), d, f).unwrap(), 0);
            assert_eq!(pochhammer(rp(1, 2), d + 1, f).unwrap(), 0);
        }
        assert!(matches!(
            pochhammer(rp(1, 7), 2, f7),
            Err(Error::BadPrime { p: 7, .. })
        ));
    }

    #[test]
    fn degree_examples() {
        let hasse: HypSpec = "2F1(1/2,1/2;1)".parse().unwrap();
        assert_eq!(truncation_degree(&hasse, 7).unwrap().n, 3);
        let alg: HypSpec = "2F1(1/3,5/6;1/2)".parse().unwrap();
        let r7 = truncation_degree(&alg, 7).unwrap();
        assert_eq!(r7.n, 2);
        assert_eq!(r7.minimizer, Bound::Numerator(0));
        let r11 = truncation_degree(&alg, 11).unwrap();
        assert_eq!(r11.n, 1);
        assert_eq!(r11.minimizer, Bound::Numerator(1));
        assert_eq!(r11.triple(), (1, 5, 6));
        let one: HypSpec = "1F0(1;)".parse().unwrap();
        let r = truncation_degree(&one, 13).unwrap();
        assert_eq!(r.n, 12);
        assert!(r.factorial_bound);
    }

    #[test]
    fn hasse_coefficients() {
        let hasse: HypSpec = "2F1(1/2,1/2;1)".parse().unwrap();
        let t = truncate(&hasse, 7).unwrap();
        assert_eq!(t.poly.coeffs(), &[1, 2, 2, 1]);
        assert_eq!(t.degree(), 3);
    }

    #[test]
    fn coefficients_match_exact_rationals() {
        let specs = [
            "2F1(1/3,2/3;1)",
            "2F1(1/3,5/6;1/2)",
            "3F2(1/2,1/2,1/2;1,1)",
            "3F2(1/6,5/6,1/2;1,1)",
            "2F1(1/12,5/12;1)",
            "2F1(3/4,3/4;1)",
        ];
        for s in specs {
            let spec: HypSpec = s.parse().unwrap();
            for p in [7u64, 11, 13, 29, 101, 199] {
                let t = match truncate(&spec, p) {
                    Ok(t) => t,
                    Err(Error::BadPrime { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let f = t.field();
                for n in 0..=t.degree() as u64 {
                    let exact = reduce_rational(&exact_coefficient(&spec, n), f).unwrap();
                    assert_eq!(t.poly.coeff(n as usize), exact, "{s} p={p} n={n}");
                }
            }
        }
        let t = truncate(&"2F1(1/3,2/3;1)".parse().unwrap(), 7).unwrap();
        assert_eq!(t.degree(), 2);
    }

    #[test]
    fn parser_roundtrip_and_errors() {
        for s in ["2F1(1/2,1/2;1)", "3F2(1/6,5/6,1/2;1,1)", "1F0(1/3;)"] {
            let spec: HypSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        let spaced: HypSpec = " 2F1( 1/2 , 1/2 ; 1 ) ".parse().unwrap();
        assert_eq!(spaced.to_string(), "2F1(1/2,1/2;1)");
        match "2F1(2/4,1/2;1)".parse::<HypSpec>() {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 4);
                assert!(msg.contains("lowest terms"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!("2F1(1/2,1/2)".parse::<HypSpec>(), Err(Error::Parse { .. })));
        assert!(matches!("2F1(1/2;1)".parse::<HypSpec>(), Err(Error::Parse { .. })));
        assert!(matches!("2F2(1/2,1/2;1,1)".parse::<HypSpec>(), Err(Error::Parse { .. })));
        assert!(matches!("2F1(5/2,1/2;1)".parse::<HypSpec>(), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!("2F1(1/2,1/2;1)x".parse::<HypSpec>(), Err(Error::Parse { pos: 14, .. })));
    }

    #[test]
    fn integrality_examples() {
        let c = binomial_integrality_check(1, 2, 3);
        assert!(c.integral);
        assert_eq!(c.value, BigRational::from_integer(20.into()));
        assert!(binomial_integrality_check(1, 1, 9).integral);
        assert_eq!(binomial_integrality_check(1, 1, 9).value, BigRational::one());
        let c = binomial_integrality_check(2, 6, 2);
        assert_eq!(c.value, BigRational::from_integer(18.into()));
        // without the b^n factor the quotient is not integral in general
        let plain = BigRational::new(BigInt::from(1 * 3 * 5), BigInt::from(6));
        assert!(!plain.is_integer());
    }

    #[test]
    fn integrality_grid() {
        for a in 1..=12 {
            for b in 1..=12 {
                for n in 1..=40 {
                    assert!(binomial_integrality_check(a, b, n).integral, "{a} {b} {n}");
                }
            }
        }
    }

    fn arb_param() -> impl Strategy<Value = RationalParam> {
        (1u64..13, 1u64..13)
            .prop_filter_map("reduced", |(a, b)| RationalParam::new(a.min(b), a.max(b)).ok())
    }

    proptest! {
        #[test]
        fn truncation_is_maximal(
            num in prop::collection::vec(arb_param(), 1..4),
            pi in 0usize..25,
        ) {
            let p = crate::ff::primes_between(13, 500)[pi * 3];
            let den = vec![RationalParam::one(); num.len() - 1];
            let spec = HypSpec::new(num, den).unwrap();
            let t = truncate(&spec, p).unwrap();
            let f = t.field();
            prop_assert_eq!(t.degree() as u64, t.report.n);
            prop_assert_eq!(t.poly.coeff(0), 1);
            // the minimizing Pochhammer vanishes one step later
            let next = match t.report.minimizer {
                Bound::Numerator(i) => pochhammer(spec.numerators()[i], t.report.n + 1, f).unwrap(),
                Bound::Denominator(i) => pochhammer(spec.denominators()[i], t.report.n + 1, f).unwrap(),
                Bound::Factorial => pochhammer(RationalParam::one(), t.report.n + 1, f).unwrap(),
            };
            prop_assert_eq!(next, 0);
            let (omega, a, b) = t.report.triple();
            prop_assert_eq!((omega * p - a) % b, 0);
            prop_assert_eq!((omega * p - a) / b, t.report.n);
            // n / p is within 1/p of omega / b
            prop_assert!(omega * p - t.report.n * b <= b);
        }
    }
}
