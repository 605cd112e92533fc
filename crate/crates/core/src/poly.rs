//! Dense univariate polynomials over `F_p`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::ff::Fp;
use crate::{Error, Result};

/// A polynomial over `F_p`; `coeffs()[i]` is the coefficient of `x^i`.
///
/// The coefficient vector never has a trailing zero, so the zero
/// polynomial is the empty vector and has no degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    f: Fp,
    c: Vec<u64>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "Poly<{}>{:?}", self.f.p(), self.c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(out, "0");
        }
        let mut first = true;
        for (i, &c) in self.c.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(out, "{c}")?,
                (1, 1) => write!(out, "x")?,
                (1, _) => write!(out, "{c}*x")?,
                (_, 1) => write!(out, "x^{i}")?,
                _ => write!(out, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    /// Build from residues (reduced and normalized here).
    pub fn new(f: Fp, mut c: Vec<u64>) -> Poly {
        for x in c.iter_mut() {
            *x = f.reduce(*x);
        }
        let mut out = Poly { f, c };
        out.normalize();
        out
    }

    pub fn from_signed(f: Fp, c: &[i64]) -> Poly {
        Poly::new(f, c.iter().map(|&x| f.from_i64(x)).collect())
    }

    pub fn zero(f: Fp) -> Poly {
        Poly { f, c: Vec::new() }
    }

    pub fn one(f: Fp) -> Poly {
        Poly::constant(f, 1)
    }

    pub fn constant(f: Fp, c: u64) -> Poly {
        Poly::new(f, vec![c])
    }

    pub fn x(f: Fp) -> Poly {
        Poly::monomial(f, 1, 1)
    }

    /// `c * x^n`.
    pub fn monomial(f: Fp, c: u64, n: usize) -> Poly {
        let mut v = vec![0; n + 1];
        v[n] = c;
        Poly::new(f, v)
    }

    /// `a + b x`.
    pub fn linear(f: Fp, a: u64, b: u64) -> Poly {
        Poly::new(f, vec![a, b])
    }

    fn normalize(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
    }

    pub fn field(&self) -> Fp {
        self.f
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.c
    }

    /// Coefficient of `x^i` (zero past the end).
    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn lead(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn scale(&self, s: u64) -> Poly {
        let s = self.f.reduce(s);
        Poly::new(self.f, self.c.iter().map(|&x| self.f.mul(x, s)).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![0; k];
        v.extend_from_slice(&self.c);
        Poly { f: self.f, c: v }
    }

    /// The polynomial mod `x^n`.
    pub fn truncate(&self, n: usize) -> Poly {
        let mut v = self.c.clone();
        v.truncate(n);
        Poly::new(self.f, v)
    }

    /// Largest `k` with `x^k | self` (zero for the zero polynomial).
    pub fn x_valuation(&self) -> usize {
        self.c.iter().take_while(|&&c| c == 0).count()
    }

    /// Divide by `x^k`; the low `k` coefficients must vanish.
    pub fn unshift(&self, k: usize) -> Option<Poly> {
        if self.c.iter().take(k).any(|&c| c != 0) {
            return None;
        }
        Some(Poly::new(self.f, self.c.iter().skip(k).copied().collect()))
    }

    /// `x^n f(1/x)`; requires `n >= deg f`.
    pub fn reverse(&self, n: usize) -> Poly {
        assert!(self.degree().map_or(true, |d| d <= n));
        let mut v = vec![0; n + 1];
        for (i, &c) in self.c.iter().enumerate() {
            v[n - i] = c;
        }
        Poly::new(self.f, v)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.f.inv(self.lead()).expect("nonzero leading coefficient");
        self.scale(inv)
    }

    pub fn derivative(&self) -> Poly {
        let f = self.f;
        Poly::new(
            f,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(f.reduce(i as u64), c))
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, x: u64) -> u64 {
        let f = self.f;
        self.c.iter().rev().fold(0, |acc, &c| f.mul_add(acc, x, c))
    }

    /// Horner evaluation at four points at once; the independent chains
    /// keep the multiplier busy.
    #[inline]
    pub fn eval4(&self, xs: [u64; 4]) -> [u64; 4] {
        let f = self.f;
        let mut a = [0u64; 4];
        for &c in self.c.iter().rev() {
            a[0] = f.mul_add(a[0], xs[0], c);
            a[1] = f.mul_add(a[1], xs[1], c);
            a[2] = f.mul_add(a[2], xs[2], c);
            a[3] = f.mul_add(a[3], xs[3], c);
        }
        a
    }

    pub fn add(&self, g: &Poly) -> Poly {
        let f = self.f;
        let n = self.c.len().max(g.c.len());
        Poly::new(
            f,
            (0..n).map(|i| f.add(self.coeff(i), g.coeff(i))).collect(),
        )
    }

    pub fn sub(&self, g: &Poly) -> Poly {
        let f = self.f;
        let n = self.c.len().max(g.c.len());
        Poly::new(
            f,
            (0..n).map(|i| f.sub(self.coeff(i), g.coeff(i))).collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.f, self.c.iter().map(|&x| self.f.neg(x)).collect())
    }

    /// Schoolbook product with 128-bit accumulation.
    pub fn mul(&self, g: &Poly) -> Poly {
        if self.is_zero() || g.is_zero() {
            return Poly::zero(self.f);
        }
        let p = self.f.p() as u128;
        let (a, b) = (&self.c, &g.c);
        let n = a.len() + b.len() - 1;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let lo = k.saturating_sub(b.len() - 1);
            let hi = k.min(a.len() - 1);
            let mut acc: u128 = 0;
            for i in lo..=hi {
                acc += a[i] as u128 * b[k - i] as u128;
            }
            out.push((acc % p) as u64);
        }
        Poly::new(self.f, out)
    }

    pub fn square(&self) -> Poly {
        self.mul(self)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn divrem(&self, g: &Poly) -> Result<(Poly, Poly)> {
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = self.f;
        let dg = g.c.len() - 1;
        if self.c.len() < g.c.len() {
            return Ok((Poly::zero(f), self.clone()));
        }
        let inv = f.inv(g.lead())?;
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - dg];
        for k in (0..q.len()).rev() {
            let c = f.mul(r[k + dg], inv);
            q[k] = c;
            if c == 0 {
                continue;
            }
            for (i, &gi) in g.c.iter().enumerate() {
                r[k + i] = f.sub(r[k + i], f.mul(c, gi));
            }
        }
        r.truncate(dg);
        Ok((Poly::new(f, q), Poly::new(f, r)))
    }

    pub fn rem(&self, g: &Poly) -> Result<Poly> {
        Ok(self.divrem(g)?.1)
    }

    /// Exact quotient; `None` when `g` does not divide `self`.
    pub fn div_exact(&self, g: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(g).ok()?;
        r.is_zero().then_some(q)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, g: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = g.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m` by square-and-multiply.
    pub fn powmod(&self, mut e: u128, m: &Poly) -> Result<Poly> {
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut base = self.rem(m)?;
        let mut acc = Poly::one(self.f).rem(m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.square().rem(m)?;
            }
        }
        Ok(acc)
    }

    /// `self(g(x))`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(self.f);
        for &c in self.c.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(self.f, c));
        }
        acc
    }

    /// `self(x^k)`.
    pub fn inflate(&self, k: usize) -> Poly {
        if self.is_zero() || k == 1 {
            return self.clone();
        }
        let mut v = vec![0; (self.c.len() - 1) * k + 1];
        for (i, &c) in self.c.iter().enumerate() {
            v[i * k] = c;
        }
        Poly::new(self.f, v)
    }

    /// Irreducibility over `F_p`: no factor of degree `d <= deg/2`, tested
    /// through `gcd(f, x^{p^d} - x)`.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(n) => n,
        };
        if n == 1 {
            return true;
        }
        let f = self.monic();
        let x = Poly::x(self.f);
        let mut h = x.clone();
        for _ in 1..=n / 2 {
            h = h.powmod(self.f.p() as u128, &f).expect("nonzero modulus");
            if !h.sub(&x).gcd(&f).is_one() {
                return false;
            }
        }
        true
    }

    /// Squarefree decomposition `f = lc * prod A_i^i` with `A_i` monic,
    /// squarefree and pairwise coprime. Returns `(i, A_i)` for nonconstant
    /// `A_i`, sorted by multiplicity.
    pub fn squarefree_multiplicities(&self) -> Vec<(usize, Poly)> {
        assert!(!self.is_zero(), "squarefree decomposition of zero");
        let mut out = Vec::new();
        self.monic().sqf_into(1, &mut out);
        out.sort_by_key(|(i, _)| *i);
        out
    }

    fn sqf_into(&self, scale: usize, out: &mut Vec<(usize, Poly)>) {
        if self.degree() == Some(0) {
            return;
        }
        let mut c = self.gcd(&self.derivative());
        let mut w = self.div_exact(&c).expect("gcd divides f");
        let mut i = 1;
        while w.degree() != Some(0) {
            let y = w.gcd(&c);
            let z = w.div_exact(&y).expect("gcd divides w");
            if z.degree().unwrap_or(0) > 0 {
                out.push((i * scale, z));
            }
            i += 1;
            c = c.div_exact(&y).expect("gcd divides c");
            w = y;
        }
        if c.degree().unwrap_or(0) > 0 {
            // c is a p-th power; over F_p the p-th root only respaces exponents
            let p = self.f.p() as usize;
            let root: Vec<u64> = c.c.iter().step_by(p).copied().collect();
            Poly::new(self.f, root).sqf_into(scale * p, out);
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, g: &Poly) -> Poly {
        Poly::add(self, g)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, g: &Poly) -> Poly {
        Poly::sub(self, g)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, g: &Poly) -> Poly {
        Poly::mul(self, g)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let f7 = f(7);
        let a = Poly::from_signed(f7, &[1, 1]);
        let b = Poly::from_signed(f7, &[-1, 1]);
        assert_eq!((&a * &b).coeffs(), &[6, 0, 1]);
        let g = Poly::from_signed(f7, &[-1, 0, 1]).gcd(&b);
        assert_eq!(g, b);
        let x3 = Poly::monomial(f7, 1, 3);
        let x2 = Poly::monomial(f7, 1, 2);
        let (q, r) = x3.divrem(&x2).unwrap();
        assert_eq!(q, Poly::x(f7));
        assert!(r.is_zero());
        assert_eq!(x3.divrem(&Poly::zero(f7)), Err(Error::DivisionByZero));
    }

    #[test]
    fn powmod_examples() {
        let f7 = f(7);
        let m = Poly::from_signed(f7, &[-2, 0, 1]);
        let x = Poly::x(f7);
        // x^7 = x * (x^2)^3 = 2^3 x = x mod x^2 - 2
        assert_eq!(x.powmod(7, &m).unwrap(), x);
        assert_eq!(x.powmod(1, &m).unwrap(), x);
        let hasse = Poly::new(f7, vec![1, 2, 2, 1]);
        let r = x.powmod((49 - 1) / 8, &hasse).unwrap();
        assert!(r.sub(&Poly::one(f7)).is_zero());
    }

    #[test]
    fn eval_examples() {
        let f7 = f(7);
        let h = Poly::new(f7, vec![1, 2, 2, 1]);
        assert_eq!(h.eval(0), 1);
        let zeros = (0..7).filter(|&x| h.eval(x) == 0).count();
        assert_eq!(zeros, 3);
        let c = Poly::constant(f7, 5);
        assert!((0..7).all(|x| c.eval(x) == 5));
        assert_eq!(h.eval4([0, 1, 2, 3]), [h.eval(0), h.eval(1), h.eval(2), h.eval(3)]);
        assert_eq!(Poly::zero(f7).eval(3), 0);
    }

    #[test]
    fn squarefree_examples() {
        let f101 = f(101);
        let g = Poly::from_signed(f101, &[1, 1]).pow(12).mul(&Poly::x(f101));
        let parts = g.squarefree_multiplicities();
        assert_eq!(
            parts,
            vec![(1, Poly::x(f101)), (12, Poly::from_signed(f101, &[1, 1]))]
        );
        let f7 = f(7);
        let sq = Poly::from_signed(f7, &[3, 1, 1]);
        assert!(sq.gcd(&sq.derivative()).is_one());
        assert_eq!(sq.squarefree_multiplicities(), vec![(1, sq.clone())]);
        let xp = Poly::monomial(f7, 1, 7);
        assert_eq!(xp.squarefree_multiplicities(), vec![(7, Poly::x(f7))]);
    }

    #[test]
    fn squarefree_with_mixed_p_powers() {
        let f5 = f(5);
        let a = Poly::from_signed(f5, &[1, 1]);
        let b = Poly::from_signed(f5, &[2, 0, 1]);
        let c = Poly::from_signed(f5, &[3, 1]);
        let g = a.pow(5).mul(&b.pow(7)).mul(&c.pow(2)).scale(3);
        let parts = g.squarefree_multiplicities();
        assert_eq!(
            parts,
            vec![(2, c.clone()), (5, a.clone()), (7, b.clone())]
        );
    }

    #[test]
    fn irreducibility() {
        let f5 = f(5);
        assert!(Poly::from_signed(f5, &[2, 0, 1]).is_irreducible());
        assert!(!Poly::from_signed(f5, &[1, 0, 1]).is_irreducible());
        assert!(!Poly::from_signed(f5, &[1, 0, 0, 0, 1]).is_irreducible());
        // (x^2+2)(x^2+3) has no roots but is reducible
        let q = Poly::from_signed(f5, &[2, 0, 1]).mul(&Poly::from_signed(f5, &[3, 0, 1]));
        assert!(!q.is_irreducible());
        assert!(!Poly::constant(f5, 3).is_irreducible());
    }

    #[test]
    fn compose_reverse_inflate() {
        let f11 = f(11);
        let g = Poly::from_signed(f11, &[1, 2, 3]);
        let s = Poly::from_signed(f11, &[0, 4, -4]);
        let c = g.compose(&s);
        for x in 0..11 {
            assert_eq!(c.eval(x), g.eval(s.eval(x)));
        }
        assert_eq!(g.reverse(4).coeffs(), &[0, 0, 3, 2, 1]);
        let inf = g.inflate(3);
        for x in 0..11 {
            assert_eq!(inf.eval(x), g.eval(f11.pow(x, 3)));
        }
        assert_eq!(Poly::x(f11).shift(2).unshift(3), Some(Poly::one(f11)));
        assert_eq!(Poly::one(f11).unshift(1), None);
    }

    fn arb_poly(p: u64, max_len: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(0..p, 0..max_len).prop_map(move |c| Poly::new(Fp::new(p).unwrap(), c))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(101, 12), b in arb_poly(101, 12), c in arb_poly(101, 12)) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !a.is_zero() && !b.is_zero() {
                prop_assert_eq!((&a * &b).degree().unwrap(), a.degree().unwrap() + b.degree().unwrap());
            }
        }

        #[test]
        fn divrem_reconstructs(a in arb_poly(13, 20), b in arb_poly(13, 8)) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.divrem(&b).unwrap();
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree().map_or(true, |d| d < b.degree().unwrap()));
        }

        #[test]
        fn squarefree_reconstructs(factors in prop::collection::vec((arb_poly(7, 4), 1usize..16), 1..4), lc in 1u64..7) {
            let f7 = Fp::new(7).unwrap();
            let mut g = Poly::constant(f7, lc);
            for (h, e) in &factors {
                if h.is_zero() { continue; }
                g = g.mul(&h.pow(*e as u64));
            }
            let parts = g.squarefree_multiplicities();
            let mut rebuilt = Poly::constant(f7, g.lead());
            for (i, a) in &parts {
                prop_assert!(a.gcd(&a.derivative()).is_one());
                prop_assert_eq!(a.lead(), 1);
                rebuilt = rebuilt.mul(&a.pow(*i as u64));
            }
            prop_assert_eq!(rebuilt, g);
            for (k, (_, a)) in parts.iter().enumerate() {
                for (_, b) in &parts[k + 1..] {
                    prop_assert!(a.gcd(b).is_one());
                }
            }
        }

        #[test]
        fn gcd_is_monic_common_divisor(a in arb_poly(11, 10), b in arb_poly(11, 10), c in arb_poly(11, 4)) {
            let x = &a * &c;
            let y = &b * &c;
            let g = x.gcd(&y);
            if !g.is_zero() {
                prop_assert_eq!(g.lead(), 1);
                prop_assert!(x.div_exact(&g).is_some());
                prop_assert!(y.div_exact(&g).is_some());
                if !c.is_zero() {
                    prop_assert!(g.div_exact(&c.monic()).is_some());
                }
            }
        }
    }
}
