//! Truncated confluent series `1F1(alpha; beta; x)` with `alpha` in
//! `F_q \ F_p`, their `x -> x^k` substitution, the differential equation
//! they satisfy modulo a power of `x`, and root counts over `F_p`.

use rayon::prelude::*;
use serde::Serialize;

use crate::ff::{is_prime, prime_factors, ExtElem, ExtField, Fp};
use crate::hyptrunc::RationalParam;
use crate::poly::Poly;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KummerParam {
    Rational(RationalParam),
    Ext(ExtElem),
}

#[derive(Clone, Debug)]
pub struct KummerSpec {
    pub field: ExtField,
    pub alpha: ExtElem,
    pub beta: KummerParam,
}

impl KummerSpec {
    /// `alpha` must lie outside `F_p`; when `beta` does too, so must
    /// `alpha - beta`.
    pub fn new(field: ExtField, alpha: ExtElem, beta: KummerParam) -> Result<KummerSpec> {
        if field.in_prime_subfield(&alpha) {
            return Err(Error::Degenerate("alpha lies in F_p".into()));
        }
        if let KummerParam::Ext(b) = &beta {
            match field.as_base(b) {
                Some(0) => return Err(Error::Degenerate("beta is zero".into())),
                Some(_) => {}
                None => {
                    if field.in_prime_subfield(&field.sub(&alpha, b)) {
                        return Err(Error::Degenerate("alpha - beta lies in F_p".into()));
                    }
                }
            }
        }
        Ok(KummerSpec { field, alpha, beta })
    }

    pub fn p(&self) -> u64 {
        self.field.base().p()
    }

    /// `beta` as an element of `F_q`.
    pub fn beta_value(&self) -> Result<ExtElem> {
        match &self.beta {
            KummerParam::Rational(r) => Ok(self.field.from_base(r.residue(self.field.base())?)),
            KummerParam::Ext(b) => Ok(b.clone()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KummerBound {
    Beta,
    Factorial,
}

#[derive(Clone, Debug)]
pub struct KummerTruncation {
    pub spec: KummerSpec,
    /// Coefficients `(alpha)_n / ((beta)_n n!)` for `n <= n_star`.
    pub coeffs: Vec<ExtElem>,
    pub n_star: u64,
    pub k: u64,
    pub omega: u64,
    pub a: u64,
    pub b: u64,
    pub minimizer: KummerBound,
}

impl KummerTruncation {
    /// Degree of `eta(x) = K(x^k)`; equals `omega p - a`.
    pub fn eta_degree(&self) -> u64 {
        self.n_star * self.k
    }

    /// Dense coefficients of `eta`.
    pub fn eta_coeffs(&self) -> Vec<ExtElem> {
        let fq = &self.spec.field;
        let k = self.k as usize;
        let mut out = vec![fq.zero(); self.coeffs.len().saturating_sub(1) * k + 1];
        for (n, c) in self.coeffs.iter().enumerate() {
            out[n * k] = c.clone();
        }
        out
    }
}

pub fn kummer_truncate(spec: &KummerSpec) -> Result<KummerTruncation> {
    let fp = spec.field.base();
    let fq = &spec.field;
    let p = fp.p();
    // (omega, a, b) and index of the first vanishing denominator factor
    let beta_bound = match &spec.beta {
        KummerParam::Rational(r) => {
            let (omega, n) = r.natural_index(p)?;
            Some((omega, r.num(), r.den(), n))
        }
        KummerParam::Ext(b) => fq.as_base(b).map(|g| (1, g, 1, p - g)),
    };
    let (mut omega, mut a, mut b, mut n_star, mut minimizer) = (1, 1, 1, p - 1, KummerBound::Factorial);
    if let Some((w, aa, bb, n)) = beta_bound {
        if n <= n_star {
            (omega, a, b, n_star, minimizer) = (w, aa, bb, n, KummerBound::Beta);
        }
    }
    let beta = spec.beta_value()?;
    let mut coeffs = Vec::with_capacity(n_star as usize + 1);
    coeffs.push(fq.one());
    for n in 0..n_star {
        let den = fq.scale(fp.reduce(n + 1), &fq.add_base(&beta, n));
        let step = fq.mul(&fq.add_base(&spec.alpha, n), &fq.inv(&den)?);
        let next = fq.mul(coeffs.last().expect("nonempty"), &step);
        coeffs.push(next);
    }
    Ok(KummerTruncation {
        spec: spec.clone(),
        coeffs,
        n_star,
        k: b,
        omega,
        a,
        b,
        minimizer,
    })
}

/// Coefficients of `x/b y'' + (lambda - x^b - (b-1)/b) y' - b nu x^{b-1} y`
/// below `x^bound`.
pub fn de_residual_raw(
    fq: &ExtField,
    y: &[ExtElem],
    b: u64,
    nu: &ExtElem,
    lambda: &ExtElem,
    bound: usize,
) -> Result<Vec<ExtElem>> {
    let fp = fq.base();
    let inv_b = fp.inv(fp.reduce(b))?;
    let shift = fq.sub(lambda, &fq.from_base(fp.mul(fp.reduce(b - 1), inv_b)));
    let b_nu = fq.scale(fp.reduce(b), nu);
    let bu = b as usize;
    let coef = |i: usize| y.get(i).cloned().unwrap_or_else(|| fq.zero());
    let mut out = Vec::with_capacity(bound);
    for j in 0..bound {
        let j1 = fp.reduce(j as u64 + 1);
        let yj1 = coef(j + 1);
        let mut r = fq.scale(fp.mul(fp.mul(j1, fp.reduce(j as u64)), inv_b), &yj1);
        r = fq.add(&r, &fq.mul(&shift, &fq.scale(j1, &yj1)));
        if j + 1 >= bu {
            let i = j + 1 - bu;
            let yi = coef(i);
            r = fq.sub(&r, &fq.scale(fp.reduce(i as u64), &yi));
            r = fq.sub(&r, &fq.mul(&b_nu, &yi));
        }
        out.push(r);
    }
    Ok(out)
}

/// The residual of `eta` in its differential equation, reduced modulo
/// `x^{p - a - 1}`; all entries vanish.
pub fn de_residual(t: &KummerTruncation) -> Result<Vec<ExtElem>> {
    let bound = (t.spec.p() - t.a).saturating_sub(1) as usize;
    de_residual_raw(
        &t.spec.field,
        &t.eta_coeffs(),
        t.k,
        &t.spec.alpha,
        &t.spec.beta_value()?,
        bound,
    )
}

pub fn residual_vanishes(t: &KummerTruncation) -> Result<bool> {
    let fq = &t.spec.field;
    Ok(de_residual(t)?.iter().all(|c| fq.is_zero(c)))
}

#[derive(Clone, Debug, Serialize)]
pub struct RootCountReport {
    pub p: u64,
    pub k: u64,
    pub degree: u64,
    pub count: u64,
    /// `p^{6/7}`.
    pub p_six_sevenths: f64,
    /// `count / p^{6/7}`.
    pub ratio: f64,
}

fn primitive_root(f: Fp) -> u64 {
    let n = f.p() - 1;
    let factors = prime_factors(n as u128);
    (2..f.p())
        .find(|&g| factors.iter().all(|&l| f.pow(g, n as u128 / l) != 1))
        .expect("F_p^* is cyclic")
}

/// Count `x` in `F_p` with `eta(x) = 0` in `F_q`.
///
/// `eta(x) = K(x^k)` vanishes iff every coordinate polynomial of `K`
/// vanishes at `z = x^k`, so each value of `x^k` is tested once and
/// weighted by the number of its `k`-th roots.
pub fn root_count(t: &KummerTruncation) -> Result<RootCountReport> {
    let fq = &t.spec.field;
    let f = fq.base();
    let p = f.p();
    if p > 1_000_000 {
        return Err(Error::Unsupported(format!("root count limited to p <= 10^6, got {p}")));
    }
    let m = fq.degree();
    let coords: Vec<Poly> = (0..m)
        .map(|i| Poly::new(f, t.coeffs.iter().map(|c| c.coeffs()[i]).collect()))
        .collect();
    let g = num_integer::gcd(t.k, p - 1);
    let r = primitive_root(f);
    let step = f.pow(r, g as u128);
    let size = ((p - 1) / g) as usize;
    let mut zs = Vec::with_capacity(size);
    let mut z = 1;
    for _ in 0..size {
        zs.push(z);
        z = f.mul(z, step);
    }
    let all_vanish = |z: u64| coords[1..].iter().all(|c| c.eval(z) == 0);
    let nonzero: u64 = zs
        .par_chunks(256)
        .map(|chunk| {
            let mut hits = 0u64;
            let mut i = 0;
            while i + 4 <= chunk.len() {
                let xs = [chunk[i], chunk[i + 1], chunk[i + 2], chunk[i + 3]];
                let v = coords[0].eval4(xs);
                for j in 0..4 {
                    if v[j] == 0 && all_vanish(xs[j]) {
                        hits += 1;
                    }
                }
                i += 4;
            }
            for &z in &chunk[i..] {
                if coords[0].eval(z) == 0 && all_vanish(z) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let at_zero = u64::from(t.coeffs.first().is_some_and(|c| fq.is_zero(c)));
    let count = nonzero * g + at_zero;
    let p67 = (p as f64).powf(6.0 / 7.0);
    Ok(RootCountReport {
        p,
        k: t.k,
        degree: t.eta_degree(),
        count,
        p_six_sevenths: p67,
        ratio: count as f64 / p67,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepanovParams {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    /// `(A + (p - 1) B + p C) / D`.
    pub bound: f64,
}

/// Auxiliary-polynomial parameter choice `A = d p^{2/7}`, `B = C = d p^{1/7}`,
/// `D = d^3 p^{2/7}` (floors inside) and the root bound it yields.
pub fn stepanov_bound(p: u64, delta: u64) -> StepanovParams {
    let pf = p as f64;
    let p27 = floor_root7(p, 2);
    let p17 = floor_root7(p, 1);
    let (a, b, c, d) = (delta * p27, delta * p17, delta * p17, delta.pow(3) * p27);
    let bound = (a as f64 + (pf - 1.0) * b as f64 + pf * c as f64) / d as f64;
    StepanovParams { a, b, c, d, bound }
}

/// `floor(p^{e/7})`, exact.
fn floor_root7(p: u64, e: u32) -> u64 {
    let target = (p as u128).pow(e);
    let mut r = (p as f64).powf(e as f64 / 7.0).round() as u128 + 1;
    while r.pow(7) > target {
        r -= 1;
    }
    r as u64
}

/// `n` primes spread geometrically over `[lo, hi]`: the first prime at or
/// above each grid point, without repeats.
pub fn geometric_primes(lo: u64, hi: u64, n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(n);
    let ratio = (hi as f64 / lo as f64).powf(1.0 / (n.max(2) - 1) as f64);
    let mut x = lo as f64;
    for _ in 0..n {
        let mut q = (x.round() as u64).max(out.last().map_or(2, |&l| l + 1));
        while !is_prime(q) {
            q += 1;
        }
        out.push(q);
        x *= ratio;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fq(p: u64) -> ExtField {
        ExtField::new(Fp::new(p).unwrap(), 2).unwrap()
    }

    fn third(p: u64) -> KummerTruncation {
        let field = fq(p);
        let g = field.generator_from(0);
        let spec = KummerSpec::new(field, g, KummerParam::Rational(RationalParam::new(1, 3).unwrap())).unwrap();
        kummer_truncate(&spec).unwrap()
    }

    #[test]
    fn example_third() {
        let t = third(7);
        assert_eq!(t.n_star, 2);
        assert_eq!(t.k, 3);
        assert_eq!(t.eta_degree(), 6);
        assert!(residual_vanishes(&t).unwrap());
        let t = third(11);
        assert_eq!(t.n_star, 7);
        assert_eq!(t.eta_degree(), 2 * 11 - 1);
        assert!(residual_vanishes(&t).unwrap());
    }

    #[test]
    fn example_two_orbits() {
        let field = fq(7);
        let t = field.t();
        let spec = KummerSpec::new(field.clone(), t.clone(), KummerParam::Ext(field.scale(2, &t))).unwrap();
        let tr = kummer_truncate(&spec).unwrap();
        assert_eq!((tr.n_star, tr.k), (6, 1));
        assert!(residual_vanishes(&tr).unwrap());
        assert!(field.is_zero(&field.sub(&tr.coeffs[0], &field.one())));
    }

    #[test]
    fn degenerate_specs() {
        let field = fq(7);
        let one = field.one();
        let r = KummerParam::Rational(RationalParam::new(1, 3).unwrap());
        assert!(KummerSpec::new(field.clone(), one, r).is_err());
        let t = field.t();
        assert!(KummerSpec::new(field.clone(), t.clone(), KummerParam::Ext(field.add_base(&t, 3))).is_err());
    }

    #[test]
    fn zero_input_residual() {
        let field = fq(7);
        let z = vec![field.zero(); 5];
        let r = de_residual_raw(&field, &z, 3, &field.t(), &field.one(), 5).unwrap();
        assert!(r.iter().all(|c| field.is_zero(c)));
    }

    #[test]
    fn coset_shift_keeps_degree() {
        for p in [7u64, 13, 19, 31] {
            let field = fq(p);
            let g = field.generator_from(0);
            let r = KummerParam::Rational(RationalParam::new(1, 3).unwrap());
            let a = kummer_truncate(&KummerSpec::new(field.clone(), g.clone(), r.clone()).unwrap()).unwrap();
            let b = kummer_truncate(&KummerSpec::new(field.clone(), field.add_base(&g, 1), r).unwrap()).unwrap();
            assert_eq!(a.n_star, b.n_star);
        }
    }

    #[test]
    fn root_count_matches_direct() {
        for p in [7u64, 13, 31, 43] {
            let t = third(p);
            let fq = &t.spec.field;
            let eta = t.eta_coeffs();
            let direct = (0..p)
                .filter(|&x| {
                    let v = eta
                        .iter()
                        .rev()
                        .fold(fq.zero(), |acc, c| fq.add(&fq.scale(x, &acc), c));
                    fq.is_zero(&v)
                })
                .count() as u64;
            let r = root_count(&t).unwrap();
            assert_eq!(r.count, direct, "p={p}");
            assert!(r.count <= r.degree);
        }
    }

    #[test]
    fn stepanov() {
        let s = stepanov_bound(10_000_000, 1);
        assert_eq!(s.a, 100);
        assert_eq!(s.b, 10);
        assert!(s.bound > 0.0);
    }

    #[test]
    fn grid() {
        let g = geometric_primes(1000, 100_000, 30);
        assert_eq!(g.len(), 30);
        assert_eq!(g[0], 1009);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(*g.last().unwrap() >= 100_000 && *g.last().unwrap() < 100_100);
    }
}
