//! Character sums, elliptic curve families, K3 counting functions and the
//! K3 surface criterion.
//!
//! Traces follow the convention `a_p = n_p - p - 1 = sum_x chi(f(x))`
//! where `n_p` counts projective points, so `char_sum == a_p mod p`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::ff::Fp;
use crate::hyptrunc::{truncate, HypSpec, RationalParam};
use crate::poly::Poly;
use crate::{Error, Result};

/// `S(a, b) = sum_x x^a (1 + x)^b` by direct summation, with `0^0 = 1`.
pub fn char_sum_s_direct(a: u64, b: u64, f: Fp) -> u64 {
    (0..f.p()).fold(0, |acc, x| {
        let t = f.mul(f.pow(x, a as u128), f.pow(f.add(x, 1), b as u128));
        f.add(acc, t)
    })
}

/// `S(a, b)` through the binomial expansion
/// `-sum {binom(b, j) : a + j >= 1, (p - 1) | a + j}`, valid for all `a, b`.
pub fn char_sum_s_binomial(a: u64, b: u64, f: Fp) -> u64 {
    let q = f.p() - 1;
    let mut acc = 0;
    for j in 0..=b {
        let e = a + j;
        if e >= 1 && e % q == 0 {
            acc = f.add(acc, binomial_lucas(b, j, f));
        }
    }
    f.neg(acc)
}

/// The one-term shortcut `S(a, b) = -binom(b, 2D - a)` for `a > 0`,
/// `a + b < 4D`; `None` outside those hypotheses.
pub fn char_sum_s_shortcut(a: u64, b: u64, f: Fp) -> Option<u64> {
    let q = f.p() - 1;
    if a == 0 || a + b >= 2 * q {
        return None;
    }
    if a > q {
        return Some(0);
    }
    Some(f.neg(binomial_lucas(b, q - a, f)))
}

/// `binom(n, k) mod p` by Lucas' theorem.
pub fn binomial_lucas(mut n: u64, mut k: u64, f: Fp) -> u64 {
    let p = f.p();
    let mut acc = 1;
    while k > 0 || n > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        let mut c = 1;
        for i in 0..ki {
            c = f.mul(c, ni - i);
            c = f.div(c, i + 1).expect("i + 1 < p");
        }
        acc = f.mul(acc, c);
        n /= p;
        k /= p;
    }
    acc
}

/// Factorials and inverse factorials up to `p - 1` for binomials with
/// arguments below `p`.
pub struct Binomials {
    f: Fp,
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

impl Binomials {
    pub fn new(f: Fp) -> Binomials {
        let n = f.p() as usize;
        let mut fact = vec![1u64; n];
        for i in 1..n {
            fact[i] = f.mul(fact[i - 1], i as u64);
        }
        let mut inv_fact = fact.clone();
        f.batch_inv(&mut inv_fact).expect("factorials below p are units");
        Binomials { f, fact, inv_fact }
    }

    /// `binom(n, k)` for `n < p`; zero when `k > n` or `k < 0`.
    pub fn c(&self, n: i64, k: i64) -> u64 {
        if k < 0 || n < 0 || k > n {
            return 0;
        }
        let (n, k) = (n as usize, k as usize);
        self.f.mul(self.fact[n], self.f.mul(self.inv_fact[k], self.inv_fact[n - k]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EllipticFamily {
    /// `z^2 = x(x+1)(x+l)`
    Legendre2,
    /// `z^2 = x^3 + (x+l)^2`
    B3,
    /// `z^2 = x(x(x+1)+l)`
    B4,
    /// `z^2 = x^2(x+1)+l`
    B6,
    /// `y^2 = (x-1)(x^2 - 1/(l+1))`
    ELambda,
}

impl EllipticFamily {
    pub const ALL: [EllipticFamily; 5] = [
        EllipticFamily::Legendre2,
        EllipticFamily::B3,
        EllipticFamily::B4,
        EllipticFamily::B6,
        EllipticFamily::ELambda,
    ];

    pub fn for_b(b: u64) -> Result<EllipticFamily> {
        match b {
            2 => Ok(EllipticFamily::Legendre2),
            3 => Ok(EllipticFamily::B3),
            4 => Ok(EllipticFamily::B4),
            6 => Ok(EllipticFamily::B6),
            _ => Err(Error::Unsupported(format!("no curve family for b = {b}"))),
        }
    }

    /// The `b` of the attached `F(1/b, 1 - 1/b; 1)`; `E_lambda` uses `b = 4`.
    pub fn b(self) -> u64 {
        match self {
            EllipticFamily::Legendre2 => 2,
            EllipticFamily::B3 => 3,
            EllipticFamily::B4 | EllipticFamily::ELambda => 4,
            EllipticFamily::B6 => 6,
        }
    }

    pub fn spec(self) -> HypSpec {
        let b = self.b();
        let a = RationalParam::new(1, b).expect("b >= 2");
        HypSpec::f21(a, a.complement().expect("a < 1"))
    }

    /// Upper bound on the size of an `F_p`-isomorphism class inside the family.
    pub fn class_bound(self) -> usize {
        match self {
            EllipticFamily::Legendre2 => 6,
            EllipticFamily::B3 => 13,
            EllipticFamily::B4 => 3,
            EllipticFamily::B6 => 2,
            EllipticFamily::ELambda => 3,
        }
    }

    /// `lambda` values excluded from the family outright.
    pub fn excluded(self, f: Fp, lambda: u64) -> bool {
        self == EllipticFamily::ELambda && (lambda == 0 || lambda == f.neg(1))
    }

    /// `(a2, a4, a6)` with `f_l(x) = x^3 + a2 x^2 + a4 x + a6`.
    pub fn coefficients(self, f: Fp, lambda: u64) -> Result<(u64, u64, u64)> {
        let l = f.reduce(lambda);
        Ok(match self {
            EllipticFamily::Legendre2 => (f.add(l, 1), l, 0),
            EllipticFamily::B3 => (1, f.add(l, l), f.mul(l, l)),
            EllipticFamily::B4 => (1, l, 0),
            EllipticFamily::B6 => (1, 0, l),
            EllipticFamily::ELambda => {
                if self.excluded(f, l) {
                    return Err(Error::ExcludedLambda(l));
                }
                let c = f.inv(f.add(l, 1))?;
                (f.neg(1), f.neg(c), c)
            }
        })
    }

    pub fn cubic(self, f: Fp, lambda: u64) -> Result<Poly> {
        let (a2, a4, a6) = self.coefficients(f, lambda)?;
        Ok(Poly::new(f, vec![a6, a4, a2, 1]))
    }

    /// `s` with `F(1/b, 1 - 1/b; 1; s l) == -sum_x [f_l(x)]^D`.
    pub fn scaling(self, f: Fp) -> u64 {
        let q = |n: i64, d: u64| f.mul(f.from_i64(n), f.inv(d).expect("p > 3"));
        match self {
            EllipticFamily::Legendre2 => 1,
            EllipticFamily::B3 => q(27, 4),
            EllipticFamily::B4 => 4,
            EllipticFamily::B6 => q(-27, 4),
            EllipticFamily::ELambda => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EllipticFamily::Legendre2 => "legendre",
            EllipticFamily::B3 => "b3",
            EllipticFamily::B4 => "b4",
            EllipticFamily::B6 => "b6",
            EllipticFamily::ELambda => "e-lambda",
        }
    }
}

impl fmt::Display for EllipticFamily {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.write_str(self.name())
    }
}

impl FromStr for EllipticFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<EllipticFamily> {
        match s.to_ascii_lowercase().as_str() {
            "legendre" | "legendre2" | "b2" | "2" => Ok(EllipticFamily::Legendre2),
            "b3" | "3" => Ok(EllipticFamily::B3),
            "b4" | "4" => Ok(EllipticFamily::B4),
            "b6" | "6" => Ok(EllipticFamily::B6),
            "e" | "e-lambda" | "elambda" | "e_lambda" => Ok(EllipticFamily::ELambda),
            _ => Err(Error::InvalidSpec(format!("unknown family {s:?}"))),
        }
    }
}

/// Short Weierstrass `(A, B)` of `x^3 + a2 x^2 + a4 x + a6`.
pub fn short_form(f: Fp, a2: u64, a4: u64, a6: u64) -> (u64, u64) {
    let i3 = f.inv(3).expect("p > 3");
    let i27 = f.inv(27).expect("p > 3");
    let a2sq = f.mul(a2, a2);
    let a = f.sub(a4, f.mul(a2sq, i3));
    let b = f.add(
        f.sub(a6, f.mul(f.mul(a2, a4), i3)),
        f.mul(f.mul(2, f.mul(a2sq, a2)), i27),
    );
    (a, b)
}

/// `4A^3 + 27B^2 == 0`.
pub fn is_singular(f: Fp, a: u64, b: u64) -> bool {
    let t = f.add(f.mul(4, f.pow(a, 3)), f.mul(27, f.mul(b, b)));
    t == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveCount {
    pub family: EllipticFamily,
    pub lambda: u64,
    /// `sum_x [f(x)]^D mod p`.
    pub char_sum: u64,
    /// `n_p - p - 1`; `None` for singular members.
    pub trace: Option<i64>,
    pub singular: bool,
}

/// Point data for one member of a family, with the character sum done by
/// a Legendre table.
pub fn count_curve_with(family: EllipticFamily, f: Fp, lambda: u64, chi: &[i8]) -> Result<CurveCount> {
    let (a2, a4, a6) = family.coefficients(f, lambda)?;
    let cubic = Poly::new(f, vec![a6, a4, a2, 1]);
    let s: i64 = (0..f.p()).map(|x| chi[cubic.eval(x) as usize] as i64).sum();
    let (a, b) = short_form(f, a2, a4, a6);
    let singular = is_singular(f, a, b);
    if !singular {
        assert!(
            (s * s) as u64 <= 4 * f.p(),
            "trace {s} outside the Hasse window for {family} at lambda = {lambda}, p = {}",
            f.p()
        );
    }
    Ok(CurveCount {
        family,
        lambda: f.reduce(lambda),
        char_sum: f.from_i64(s),
        trace: (!singular).then_some(s),
        singular,
    })
}

pub fn count_curve(family: EllipticFamily, f: Fp, lambda: u64) -> Result<CurveCount> {
    count_curve_with(family, f, lambda, &f.legendre_table())
}

/// `sum_x [f(x)]^D` by literal powering; the slow path.
pub fn char_sum_power(cubic: &Poly) -> u64 {
    let f = cubic.field();
    (0..f.p()).fold(0, |acc, x| f.add(acc, f.pow(cubic.eval(x), f.half() as u128)))
}

/// Affine solutions of `y^2 = cubic(x)` by enumerating every pair.
pub fn brute_affine_points(cubic: &Poly) -> u64 {
    let f = cubic.field();
    let p = f.p();
    let mut n = 0;
    for x in 0..p {
        let v = cubic.eval(x);
        n += (0..p).filter(|&y| f.mul(y, y) == v).count() as u64;
    }
    n
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceReport {
    pub family: EllipticFamily,
    pub p: u64,
    pub spec: String,
    pub scaling: u64,
    /// Sign `e` in `F(s l) == e * sum_x [f_l(x)]^D`; found to be `-1` for
    /// every family.
    pub sign: i8,
    pub checked: usize,
    pub mismatches: Vec<u64>,
    /// `lambda` with `a_p == 0` on a nonsingular member.
    pub supersingular: Vec<u64>,
    /// Whether `-sum` fits every checked `lambda` and `+sum` does not.
    pub sign_forced: bool,
}

impl CorrespondenceReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Check `F(1/b, 1-1/b; 1; s l) == -sum_x [f_l(x)]^D` for every `l` in
/// `F_p`, or for `E_lambda` the relation `I_l == -2^D F(1/4, 3/4; 1; l/(1+l))`
/// for `l` outside `{0, -1}`.
pub fn hyp_curve_correspondence(family: EllipticFamily, p: u64) -> Result<CorrespondenceReport> {
    let f = Fp::new(p)?;
    if p <= family.b() || p < 5 {
        return Err(Error::Unsupported(format!("need p > {} and p >= 5", family.b())));
    }
    let spec = family.spec();
    let t = truncate(&spec, p)?;
    let chi = f.legendre_table();
    let s = family.scaling(f);
    let two_d = f.pow(2, f.half() as u128);
    let rows: Vec<Result<(u64, bool, bool, bool)>> = (0..p)
        .into_par_iter()
        .filter(|&l| !family.excluded(f, l))
        .map(|l| {
            let c = count_curve_with(family, f, l, &chi)?;
            let (lhs, rhs) = if family == EllipticFamily::ELambda {
                let z = f.div(l, f.add(l, 1))?;
                (c.char_sum, f.neg(f.mul(two_d, t.poly.eval(z))))
            } else {
                (t.poly.eval(f.mul(s, l)), f.neg(c.char_sum))
            };
            let ss = c.trace == Some(0);
            Ok((l, lhs == rhs, lhs == f.neg(rhs), ss))
        })
        .collect();
    let mut report = CorrespondenceReport {
        family,
        p,
        spec: spec.to_string(),
        scaling: s,
        sign: -1,
        checked: 0,
        mismatches: Vec::new(),
        supersingular: Vec::new(),
        sign_forced: false,
    };
    let mut plus_fits = true;
    for r in rows {
        let (l, ok, flipped, ss) = r?;
        report.checked += 1;
        if !ok {
            report.mismatches.push(l);
        }
        plus_fits &= flipped;
        if ss {
            report.supersingular.push(l);
        }
    }
    report.sign_forced = report.mismatches.is_empty() && !plus_fits;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum K3Mode {
    DoubleSum,
    CoeffPoly,
}

impl FromStr for K3Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<K3Mode> {
        match s {
            "double-sum" | "double_sum" => Ok(K3Mode::DoubleSum),
            "coeff-poly" | "coeff_poly" => Ok(K3Mode::CoeffPoly),
            _ => Err(Error::InvalidSpec(format!("unknown mode {s:?}"))),
        }
    }
}

/// Coefficients `c_n` of the K3 counting polynomial `sum_n c_n l^n`.
pub fn k3_coefficients(b: u64, f: Fp) -> Result<Vec<u64>> {
    let bin = Binomials::new(f);
    let d = f.half() as i64;
    let coeff = |n: i64| -> u64 {
        let c = |a, b| bin.c(a, b);
        match b {
            2 => f.pow(c(d, n), 3),
            3 => f.mul(f.pow(c(d, n), 2), c(2 * d - 2 * n, n)),
            4 => f.mul(f.pow(c(d, n), 2), c(d - n, n)),
            _ => f.mul(c(d, n), f.mul(c(d - n, n), c(d - 2 * n, n))),
        }
    };
    if !matches!(b, 2 | 3 | 4 | 6) {
        return Err(Error::Unsupported(format!("K3 family b = {b}")));
    }
    Ok((0..=d).map(coeff).collect())
}

/// The surface right-hand side whose double character sum is `J_{l,b}`
/// (for `b = 3` up to the constant `1`, see [`count_k3`]).
pub fn k3_surface_value(b: u64, f: Fp, lambda: u64, x: u64, y: u64) -> u64 {
    let m = |a, b| f.mul(a, b);
    let l = lambda;
    match b {
        2 => m(m(m(x, f.add(x, 1)), m(y, f.add(y, 1))), f.add(x, m(l, y))),
        3 => {
            let y1 = f.add(y, 1);
            let inner = f.add(m(m(x, y), m(y1, y1)), l);
            m(m(x, f.add(x, 1)), m(y, inner))
        }
        4 => {
            let inner = f.add(m(x, f.add(y, 1)), l);
            m(m(x, f.add(x, y)), m(y, inner))
        }
        _ => {
            let inner = f.add(m(x, f.add(f.add(x, y), 1)), m(l, f.pow(y, 3)));
            m(m(x, y), inner)
        }
    }
}

/// `J_{l,b}` either as a double character sum over `F_p^2` or from the
/// closed-form coefficient polynomial; the two agree mod `p`.
pub fn count_k3(b: u64, f: Fp, lambda: u64, mode: K3Mode) -> Result<u64> {
    if !matches!(b, 2 | 3 | 4 | 6) {
        return Err(Error::Unsupported(format!("K3 family b = {b}")));
    }
    let l = f.reduce(lambda);
    if l == 0 {
        return Err(Error::ExcludedLambda(0));
    }
    match mode {
        K3Mode::CoeffPoly => Ok(Poly::new(f, k3_coefficients(b, f)?).eval(l)),
        K3Mode::DoubleSum => {
            let chi = f.legendre_table();
            let p = f.p();
            let s: i64 = (0..p)
                .into_par_iter()
                .map(|x| {
                    (0..p)
                        .map(|y| chi[k3_surface_value(b, f, l, x, y) as usize] as i64)
                        .sum::<i64>()
                })
                .sum();
            let s = f.from_i64(s);
            // this surface form for b = 3 sums to J + 1
            Ok(if b == 3 { f.sub(s, 1) } else { s })
        }
    }
}

/// `I_l = sum_x chi((x-1)(x^2 - 1/(l+1)))`.
pub fn i_lambda(f: Fp, lambda: u64, chi: &[i8]) -> Result<u64> {
    Ok(count_curve_with(EllipticFamily::ELambda, f, lambda, chi)?.char_sum)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClausenCurveReport {
    pub p: u64,
    pub checked: usize,
    pub failures: Vec<u64>,
}

/// `J_{l,2} == (1+l)^D I_l^2` for all `l` outside `{0, -1}`.
pub fn clausen_curve_check(p: u64) -> Result<ClausenCurveReport> {
    let f = Fp::new(p)?;
    if p < 5 {
        return Err(Error::Unsupported("need p >= 5".into()));
    }
    let chi = f.legendre_table();
    let j = Poly::new(f, k3_coefficients(2, f)?);
    let mut report = ClausenCurveReport { p, checked: 0, failures: Vec::new() };
    for l in 1..p - 1 {
        let i = i_lambda(f, l, &chi)?;
        let rhs = f.mul(f.pow(f.add(l, 1), f.half() as u128), f.mul(i, i));
        report.checked += 1;
        if j.eval(l) != rhs {
            report.failures.push(l);
        }
    }
    Ok(report)
}

/// `z^2 = x^3 + a2(y) x^2 + a4(y) x + a6(y)` over `F_p(y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassSurface {
    pub b: u64,
    pub lambda: u64,
    pub a2: Poly,
    pub a4: Poly,
    pub a6: Poly,
}

/// The elliptic surface attached to `J_{l,b}` for `b` in `{3, 4, 6}`.
pub fn k3_surface(b: u64, f: Fp, lambda: u64) -> Result<WeierstrassSurface> {
    let l = f.reduce(lambda);
    let y = |c: &[i64]| Poly::from_signed(f, c);
    let y1 = y(&[1, 1]);
    let lam = Poly::constant(f, l);
    let (a2, a4) = match b {
        3 => {
            let y1sq = y1.square();
            let a2 = y(&[0, 0, 1]).add(&lam.mul(&y(&[0, 1])).mul(&y1sq));
            let a4 = lam.mul(&y(&[0, 0, 0, 1])).mul(&y1sq);
            (a2, a4)
        }
        4 => {
            let a2 = y(&[0, 0, 1]).mul(&y1).add(&lam.mul(&y(&[0, 1])));
            let a4 = lam.mul(&y(&[0, 0, 0, 1])).mul(&y1);
            (a2, a4)
        }
        6 => (y(&[0, 0, 1]).mul(&y1), lam.mul(&y(&[0, 0, 0, 1]))),
        _ => return Err(Error::Unsupported(format!("K3 surface for b = {b}"))),
    };
    Ok(WeierstrassSurface { b, lambda: l, a2, a4, a6: Poly::zero(f) })
}

/// The factored discriminant the surface should have.
pub fn expected_discriminant(b: u64, f: Fp, lambda: u64) -> Result<Poly> {
    let l = f.reduce(lambda);
    let y = |c: &[i64]| Poly::from_signed(f, c);
    let lead = Poly::constant(f, f.mul(16, f.mul(l, l)));
    let y1 = y(&[1, 1]);
    let lp = |c: &[u64]| Poly::new(f, c.to_vec());
    Ok(match b {
        3 => {
            let q = lp(&[l, f.sub(f.add(l, l), 1), l]);
            lead.mul(&Poly::monomial(f, 1, 8)).mul(&y1.pow(4)).mul(&q.square())
        }
        4 => {
            let q = lp(&[f.neg(l), 1, 1]);
            lead.mul(&Poly::monomial(f, 1, 8)).mul(&y1.square()).mul(&q.square())
        }
        6 => {
            let q = lp(&[f.neg(f.mul(4, l)), 1, 2, 1]);
            lead.mul(&Poly::monomial(f, 1, 9)).mul(&q)
        }
        _ => return Err(Error::Unsupported(format!("K3 surface for b = {b}"))),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K3Verdict {
    pub g2: Poly,
    pub g3: Poly,
    pub delta: Poly,
    pub expected_delta: Poly,
    /// Discriminant is not constant.
    pub cond1: bool,
    /// `deg a_i <= 2i` for all `i`, and not `deg a_i <= i` for all `i`.
    pub cond2: bool,
    /// No 12th power divides `gcd(g2^3, g3^2)` or its reversed counterpart.
    pub cond3: bool,
}

impl K3Verdict {
    pub fn delta_matches(&self) -> bool {
        self.delta == self.expected_delta
    }

    pub fn is_k3(&self) -> bool {
        self.cond1 && self.cond2 && self.cond3
    }
}

fn deg_le(p: &Poly, n: usize) -> bool {
    p.degree().map_or(true, |d| d <= n)
}

fn has_twelfth_power(g: &Poly) -> bool {
    g.is_zero() || g.squarefree_multiplicities().iter().any(|(m, _)| *m >= 12)
}

/// Evaluate the three conditions on an arbitrary surface, including the
/// degenerate `lambda = 0` members.
pub fn k3_evaluate(s: &WeierstrassSurface) -> Result<K3Verdict> {
    let f = s.a2.field();
    let i3 = f.inv(3)?;
    let i27 = f.inv(27)?;
    let c = |n: i64, d: u64| f.mul(f.from_i64(n), if d == 3 { i3 } else { i27 });
    let a2sq = s.a2.square();
    let g2 = a2sq.scale(c(4, 3)).sub(&s.a4.scale(4));
    let g3 = a2sq
        .mul(&s.a2)
        .scale(c(-8, 27))
        .add(&s.a2.mul(&s.a4).scale(c(4, 3)))
        .sub(&s.a6.scale(4));
    let delta = g2.pow(3).sub(&g3.square().scale(27));
    let cond1 = delta.degree().map_or(false, |d| d > 0);
    let cond2 = deg_le(&s.a2, 4)
        && deg_le(&s.a4, 8)
        && deg_le(&s.a6, 12)
        && !(deg_le(&s.a2, 2) && deg_le(&s.a4, 4) && deg_le(&s.a6, 6));
    let cond3 = if deg_le(&g2, 8) && deg_le(&g3, 12) {
        let at_zero = g2.pow(3).gcd(&g3.square());
        let at_inf = g2.reverse(8).pow(3).gcd(&g3.reverse(12).square());
        !has_twelfth_power(&at_zero) && !has_twelfth_power(&at_inf)
    } else {
        false
    };
    Ok(K3Verdict {
        expected_delta: expected_discriminant(s.b, f, s.lambda)?,
        g2,
        g3,
        delta,
        cond1,
        cond2,
        cond3,
    })
}

/// The K3 criterion for `b` in `{3, 4, 6}`; `lambda = 0` is rejected.
pub fn k3_criterion(b: u64, lambda: u64, p: u64) -> Result<K3Verdict> {
    let f = Fp::new(p)?;
    if p <= 3 {
        return Err(Error::Unsupported("need p > 3".into()));
    }
    let l = f.reduce(lambda);
    if l == 0 {
        return Err(Error::ExcludedLambda(0));
    }
    k3_evaluate(&k3_surface(b, f, l)?)
}

/// Complete `F_p`-isomorphism invariant of `y^2 = x^3 + Ax + B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum IsoKey {
    /// `j = 0`: class of `B` modulo sixth powers.
    J0(u64),
    /// `j = 1728`: class of `A` modulo fourth powers.
    J1728(u64),
    /// Other `j`: the twist is fixed by `chi(AB)`.
    Generic { j: u64, twist: i8 },
}

pub fn iso_key(f: Fp, a: u64, b: u64) -> IsoKey {
    let q = f.p() - 1;
    if a == 0 {
        IsoKey::J0(f.pow(b, (q / q.gcd(&6)) as u128))
    } else if b == 0 {
        IsoKey::J1728(f.pow(a, (q / q.gcd(&4)) as u128))
    } else {
        let a3 = f.mul(4, f.pow(a, 3));
        let j = f.div(f.mul(1728, a3), f.add(a3, f.mul(27, f.mul(b, b)))).expect("nonsingular");
        IsoKey::Generic { j, twist: f.legendre(f.mul(a, b)) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub family: EllipticFamily,
    pub p: u64,
    pub admissible: usize,
    pub classes: usize,
    pub max_size: usize,
    pub bound: usize,
    /// The largest classes, as sorted `lambda` lists.
    pub witnesses: Vec<Vec<u64>>,
    /// Every class has a single trace.
    pub traces_agree: bool,
}

impl IsoReport {
    pub fn within_bound(&self) -> bool {
        self.max_size <= self.bound
    }
}

/// Group the nonsingular members of a family by `F_p`-isomorphism class.
pub fn iso_class_multiplicity(family: EllipticFamily, p: u64) -> Result<IsoReport> {
    if p > 100_000 {
        return Err(Error::Unsupported(format!("exhaustive sweep limited to p <= 100000, got {p}")));
    }
    let f = Fp::new(p)?;
    if p < 5 {
        return Err(Error::Unsupported("need p >= 5".into()));
    }
    let chi = f.legendre_table();
    let mut groups: HashMap<IsoKey, Vec<(u64, i64)>> = HashMap::new();
    let mut admissible = 0;
    for l in 0..p {
        if family.excluded(f, l) {
            continue;
        }
        let (a2, a4, a6) = family.coefficients(f, l)?;
        let (a, b) = short_form(f, a2, a4, a6);
        if is_singular(f, a, b) {
            continue;
        }
        admissible += 1;
        let t = count_curve_with(family, f, l, &chi)?.trace.expect("nonsingular");
        groups.entry(iso_key(f, a, b)).or_default().push((l, t));
    }
    let max_size = groups.values().map(Vec::len).max().unwrap_or(0);
    let traces_agree = groups.values().all(|g| g.iter().all(|&(_, t)| t == g[0].1));
    let mut witnesses: Vec<Vec<u64>> = groups
        .values()
        .filter(|g| g.len() == max_size)
        .map(|g| g.iter().map(|&(l, _)| l).collect())
        .collect();
    witnesses.sort();
    Ok(IsoReport {
        family,
        p,
        admissible,
        classes: groups.len(),
        max_size,
        bound: family.class_bound(),
        witnesses,
        traces_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn s_examples() {
        let f = Fp::new(7).unwrap();
        assert_eq!(char_sum_s_direct(6, 3, f), 6);
        assert_eq!(char_sum_s_direct(4, 3, f), 4);
        assert_eq!(char_sum_s_shortcut(4, 3, f), Some(4));
        assert_eq!(char_sum_s_direct(1, 1, f), 0);
        assert_eq!(char_sum_s_shortcut(1, 1, f), Some(0));
        assert_eq!(char_sum_s_shortcut(0, 3, f), None);
    }

    #[test]
    fn s_agrees_everywhere() {
        for p in [5u64, 7, 11, 13] {
            let f = Fp::new(p).unwrap();
            for a in 0..3 * p {
                for b in 0..3 * p {
                    let d = char_sum_s_direct(a, b, f);
                    assert_eq!(char_sum_s_binomial(a, b, f), d, "S({a},{b}) p={p}");
                    if let Some(s) = char_sum_s_shortcut(a, b, f) {
                        assert_eq!(s, d, "shortcut S({a},{b}) p={p}");
                    }
                }
            }
        }
    }

    #[test]
    fn lucas() {
        let f = Fp::new(5).unwrap();
        assert_eq!(binomial_lucas(10, 5, f), 252 % 5);
        assert_eq!(binomial_lucas(27, 13, f), (20058300u64) % 5);
        assert_eq!(binomial_lucas(3, 4, f), 0);
    }

    #[test]
    fn legendre_family_p7() {
        let f = Fp::new(7).unwrap();
        let c = count_curve(EllipticFamily::Legendre2, f, 1).unwrap();
        assert!(c.singular);
        assert_eq!(c.trace, None);
        for l in 2..6 {
            let c = count_curve(EllipticFamily::Legendre2, f, l).unwrap();
            let cubic = EllipticFamily::Legendre2.cubic(f, l).unwrap();
            let affine = brute_affine_points(&cubic) as i64;
            assert_eq!(c.trace, Some(affine - 7));
            assert_eq!(c.char_sum, char_sum_power(&cubic));
            assert!(c.trace.unwrap().abs() <= 5);
        }
    }

    #[test]
    fn supersingular_p7() {
        let r = hyp_curve_correspondence(EllipticFamily::Legendre2, 7).unwrap();
        assert!(r.holds());
        assert!(r.sign_forced);
        assert_eq!(r.supersingular.len(), 3);
        let h = truncate(&EllipticFamily::Legendre2.spec(), 7).unwrap().poly;
        for l in r.supersingular {
            assert_eq!(h.eval(l), 0);
        }
    }

    #[test]
    fn correspondences_small() {
        for p in [5u64, 7, 11, 13, 17, 19, 23] {
            for fam in EllipticFamily::ALL {
                if p <= fam.b() {
                    continue;
                }
                let r = hyp_curve_correspondence(fam, p).unwrap();
                assert!(r.holds(), "{fam} p={p}: {:?}", r.mismatches);
            }
        }
    }

    #[test]
    fn k3_modes_agree() {
        for p in [5u64, 7, 11, 13] {
            let f = Fp::new(p).unwrap();
            for b in [2u64, 3, 4, 6] {
                for l in 1..p {
                    let a = count_k3(b, f, l, K3Mode::DoubleSum).unwrap();
                    let c = count_k3(b, f, l, K3Mode::CoeffPoly).unwrap();
                    assert_eq!(a, c, "b={b} p={p} l={l}");
                }
            }
        }
        let f = Fp::new(7).unwrap();
        assert_eq!(count_k3(2, f, 0, K3Mode::CoeffPoly), Err(Error::ExcludedLambda(0)));
    }

    #[test]
    fn clausen_curve_small() {
        for p in [5u64, 7, 11, 13] {
            let r = clausen_curve_check(p).unwrap();
            assert_eq!(r.checked as u64, p - 2);
            assert!(r.failures.is_empty());
        }
    }

    #[test]
    fn k3_criterion_examples() {
        let v = k3_criterion(4, 5, 101).unwrap();
        assert!(v.delta_matches() && v.is_k3());
        let v = k3_criterion(6, 7, 101).unwrap();
        assert!(v.delta_matches() && v.is_k3());
        let v = k3_criterion(3, 1, 101).unwrap();
        assert!(v.delta_matches() && v.is_k3());
        assert_eq!(k3_criterion(3, 0, 101), Err(Error::ExcludedLambda(0)));
        let f = Fp::new(101).unwrap();
        for b in [3, 4, 6] {
            let v = k3_evaluate(&k3_surface(b, f, 0).unwrap()).unwrap();
            assert!(!v.is_k3());
        }
    }

    #[test]
    fn iso_examples() {
        let r = iso_class_multiplicity(EllipticFamily::B6, 13).unwrap();
        assert!(r.max_size <= 2 && r.traces_agree);
        let f = Fp::new(13).unwrap();
        let c = f.neg(f.div(4, 27).unwrap());
        for w in &r.witnesses {
            if w.len() == 2 {
                assert_eq!(f.add(w[0], w[1]), c);
            }
        }
        assert!(iso_class_multiplicity(EllipticFamily::B4, 13).unwrap().max_size <= 3);
        assert!(iso_class_multiplicity(EllipticFamily::Legendre2, 13).unwrap().max_size <= 6);
    }

    #[test]
    fn iso_key_matches_brute_isomorphism() {
        let f = Fp::new(13).unwrap();
        let pairs: Vec<(u64, u64)> = (0..13)
            .flat_map(|a| (0..13).map(move |b| (a, b)))
            .filter(|&(a, b)| !is_singular(f, a, b))
            .collect();
        for &(a, b) in &pairs {
            for &(c, d) in &pairs {
                let iso = (1..13).any(|u| {
                    let u2 = f.mul(u, u);
                    let u4 = f.mul(u2, u2);
                    f.mul(u4, a) == c && f.mul(f.mul(u4, u2), b) == d
                });
                assert_eq!(iso, iso_key(f, a, b) == iso_key(f, c, d), "({a},{b}) ({c},{d})");
            }
        }
    }

    proptest! {
        #[test]
        fn hasse_window(l in 0u64..1000, pi in 0usize..20) {
            let p = crate::ff::primes_between(5, 400)[pi * 3];
            let f = Fp::new(p).unwrap();
            for fam in [EllipticFamily::Legendre2, EllipticFamily::B3, EllipticFamily::B4, EllipticFamily::B6] {
                let c = count_curve(fam, f, l % p).unwrap();
                if let Some(t) = c.trace {
                    prop_assert!((t * t) as u64 <= 4 * p);
                    prop_assert_eq!(f.from_i64(t), c.char_sum);
                }
            }
        }
    }
}
