//! Prime fields `F_p` with `p < 2^31` and extensions `F_{p^m}`.
//!
//! Elements of `F_p` are plain `u64` residues in `[0, p)`; the field
//! value [`Fp`] carries the modulus and a Barrett constant and does the
//! arithmetic. Extension elements are coefficient vectors in `t` modulo a
//! fixed irreducible polynomial.

use crate::poly::Poly;
use crate::{Error, Result};

/// Trial-division primality test; adequate for the `u64` sizes used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = 17u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes in the closed interval `[lo, hi]`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let n = hi as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (lo.max(2) as usize..=n)
        .filter(|&k| sieve[k])
        .map(|k| k as u64)
        .collect()
}

/// Distinct prime factors of `n` by trial division.
pub fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
    // floor((2^64 - 1) / p)
    barrett: u64,
}

impl Fp {
    pub fn new(p: u64) -> Result<Fp> {
        if !(3..(1u64 << 31)).contains(&p) {
            return Err(if is_prime(p) || p >= (1u64 << 31) {
                Error::PrimeOutOfRange(p)
            } else {
                Error::NotPrime(p)
            });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Fp {
            p,
            barrett: u64::MAX / p,
        })
    }

    #[inline]
    pub fn p(self) -> u64 {
        self.p
    }

    /// `D = (p - 1) / 2`.
    #[inline]
    pub fn half(self) -> u64 {
        (self.p - 1) / 2
    }

    /// Reduce an arbitrary `u64`.
    #[inline(always)]
    pub fn reduce(self, x: u64) -> u64 {
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let r = x - q * self.p;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    pub fn from_i64(self, x: i64) -> u64 {
        let r = x.rem_euclid(self.p as i64);
        r as u64
    }

    pub fn from_i128(self, x: i128) -> u64 {
        x.rem_euclid(self.p as i128) as u64
    }

    #[inline(always)]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline(always)]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline(always)]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    /// `a * b + c`, one reduction.
    #[inline(always)]
    pub fn mul_add(self, a: u64, b: u64, c: u64) -> u64 {
        self.reduce(a * b + c)
    }

    pub fn inv(self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.from_i64(s0))
    }

    pub fn div(self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(self, a: u64, mut e: u128) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Legendre symbol via Euler's criterion.
    pub fn legendre(self, a: u64) -> i8 {
        match self.pow(a, self.half() as u128) {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    /// Table of `chi(x)` for every residue `x`.
    pub fn legendre_table(self) -> Vec<i8> {
        let mut t = vec![-1i8; self.p as usize];
        t[0] = 0;
        for x in 1..=self.half() {
            t[self.mul(x, x) as usize] = 1;
        }
        t
    }

    /// Representative in `(-p/2, p/2)`.
    pub fn lift(self, a: u64) -> i64 {
        if a > self.half() {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    /// Invert every entry in place with a single field inversion.
    pub fn batch_inv(self, xs: &mut [u64]) -> Result<()> {
        if xs.is_empty() {
            return Ok(());
        }
        let mut prefix = Vec::with_capacity(xs.len());
        let mut acc = 1u64;
        for &x in xs.iter() {
            prefix.push(acc);
            acc = self.mul(acc, x);
        }
        let mut inv = self.inv(acc)?;
        for i in (0..xs.len()).rev() {
            let x = xs[i];
            xs[i] = self.mul(inv, prefix[i]);
            inv = self.mul(inv, x);
        }
        Ok(())
    }
}

/// An element of `F_{p^m}`: coefficients of `1, t, ..., t^{m-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElem(Vec<u64>);

impl ExtElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

/// `F_q = F_p[t] / (g(t))` with `g` monic irreducible of degree `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtField {
    fp: Fp,
    m: usize,
    // monic, length m + 1
    modulus: Vec<u64>,
}

impl ExtField {
    /// Build `F_{p^m}` over the lexicographically least monic irreducible
    /// modulus, comparing the coefficients of `t^{m-1}, ..., t^0` in turn.
    pub fn new(fp: Fp, m: usize) -> Result<ExtField> {
        if m == 0 {
            return Err(Error::Unsupported("extension degree 0".into()));
        }
        let p = fp.p();
        let mut digits = vec![0u64; m];
        loop {
            let mut c = digits.clone();
            c.push(1);
            let g = Poly::new(fp, c.clone());
            if g.is_irreducible() {
                return Ok(ExtField { fp, m, modulus: c });
            }
            // next tuple, t^0 least significant
            let mut i = 0;
            loop {
                if i == m {
                    unreachable!("irreducible polynomials exist in every degree");
                }
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }

    pub fn with_modulus(modulus: &Poly) -> Result<ExtField> {
        let fp = modulus.field();
        let m = modulus
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::Degenerate("modulus must be nonconstant".into()))?;
        if !modulus.is_irreducible() {
            return Err(Error::Degenerate("modulus is reducible".into()));
        }
        let g = modulus.monic();
        Ok(ExtField {
            fp,
            m,
            modulus: g.coeffs().to_vec(),
        })
    }

    pub fn base(&self) -> Fp {
        self.fp
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> Poly {
        Poly::new(self.fp, self.modulus.clone())
    }

    /// `q = p^m`.
    pub fn order(&self) -> u128 {
        (self.fp.p() as u128).pow(self.m as u32)
    }

    pub fn zero(&self) -> ExtElem {
        ExtElem(vec![0; self.m])
    }

    pub fn one(&self) -> ExtElem {
        self.from_base(1)
    }

    pub fn from_base(&self, c: u64) -> ExtElem {
        let mut v = vec![0; self.m];
        v[0] = self.fp.reduce(c);
        ExtElem(v)
    }

    /// The class of `t`.
    pub fn t(&self) -> ExtElem {
        self.from_poly(&Poly::x(self.fp))
    }

    /// Reduce an arbitrary coefficient vector.
    pub fn from_coeffs(&self, c: &[u64]) -> ExtElem {
        self.from_poly(&Poly::new(self.fp, c.to_vec()))
    }

    pub fn from_poly(&self, f: &Poly) -> ExtElem {
        let r = f.rem(&self.modulus()).expect("modulus is nonzero");
        let mut v = r.coeffs().to_vec();
        v.resize(self.m, 0);
        ExtElem(v)
    }

    /// Element with index `k` in the base-`p` enumeration (`t^0` least
    /// significant).
    pub fn element_at(&self, mut k: u128) -> ExtElem {
        let p = self.fp.p() as u128;
        let mut v = vec![0u64; self.m];
        for c in v.iter_mut() {
            *c = (k % p) as u64;
            k /= p;
        }
        ExtElem(v)
    }

    pub fn is_zero(&self, a: &ExtElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| self.fp.add(x, y))
                .collect(),
        )
    }

    pub fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| self.fp.sub(x, y))
                .collect(),
        )
    }

    pub fn neg(&self, a: &ExtElem) -> ExtElem {
        ExtElem(a.0.iter().map(|&x| self.fp.neg(x)).collect())
    }

    /// Multiply by a base-field scalar.
    pub fn scale(&self, c: u64, a: &ExtElem) -> ExtElem {
        ExtElem(a.0.iter().map(|&x| self.fp.mul(c, x)).collect())
    }

    pub fn add_base(&self, a: &ExtElem, c: u64) -> ExtElem {
        let mut v = a.0.clone();
        v[0] = self.fp.add(v[0], self.fp.reduce(c));
        ExtElem(v)
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let m = self.m;
        let fp = self.fp;
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = fp.mul_add(x, y, prod[i + j]);
            }
        }
        for k in (m..2 * m - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for i in 0..m {
                let s = fp.mul(c, self.modulus[i]);
                prod[k - m + i] = fp.sub(prod[k - m + i], s);
            }
        }
        prod.truncate(m);
        ExtElem(prod)
    }

    pub fn pow(&self, a: &ExtElem, mut e: u128) -> ExtElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &ExtElem) -> Result<ExtElem> {
        if self.is_zero(a) {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// `a -> a^p`.
    pub fn frobenius(&self, a: &ExtElem) -> ExtElem {
        self.pow(a, self.fp.p() as u128)
    }

    pub fn in_prime_subfield(&self, a: &ExtElem) -> bool {
        a.0[1..].iter().all(|&c| c == 0)
    }

    pub fn as_base(&self, a: &ExtElem) -> Option<u64> {
        self.in_prime_subfield(a).then(|| a.0[0])
    }

    /// Whether `a` generates the cyclic group `F_q^*`.
    pub fn is_generator(&self, a: &ExtElem) -> bool {
        if self.is_zero(a) {
            return false;
        }
        let n = self.order() - 1;
        prime_factors(n)
            .into_iter()
            .all(|l| self.pow(a, n / l) != self.one())
    }

    /// First generator of `F_q^*` at or after enumeration index `start`
    /// (wrapping around).
    pub fn generator_from(&self, start: u128) -> ExtElem {
        let q = self.order();
        let n = q - 1;
        let factors = prime_factors(n);
        for off in 0..q {
            let a = self.element_at((start + off) % q);
            if self.is_zero(&a) {
                continue;
            }
            if factors.iter().all(|&l| self.pow(&a, n / l) != self.one()) {
                return a;
            }
        }
        unreachable!("F_q^* is cyclic")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_examples() {
        let f7 = Fp::new(7).unwrap();
        assert_eq!(f7.inv(3).unwrap(), 5);
        assert_eq!(f7.pow(3, 6), 1);
        assert_eq!(Fp::new(13).unwrap().mul(7, 8), 4);
        assert_eq!(f7.inv(0), Err(Error::ZeroInverse));
    }

    #[test]
    fn legendre_examples() {
        let f7 = Fp::new(7).unwrap();
        assert_eq!(f7.legendre(2), 1);
        assert_eq!(f7.legendre(3), -1);
        assert_eq!(f7.legendre(0), 0);
        let table = f7.legendre_table();
        for a in 0..7 {
            assert_eq!(table[a as usize], f7.legendre(a));
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        assert_eq!(Fp::new(9), Err(Error::NotPrime(9)));
        assert_eq!(Fp::new(2), Err(Error::PrimeOutOfRange(2)));
        assert!(Fp::new(2147483659).is_err());
        assert!(Fp::new(2147483647).is_ok());
    }

    #[test]
    fn barrett_matches_remainder_near_the_top() {
        let f = Fp::new(2147483647).unwrap();
        for x in [u64::MAX, u64::MAX - 1, (1 << 62) + 12345, f.p() * f.p() - 1] {
            assert_eq!(f.reduce(x), x % f.p());
        }
    }

    #[test]
    fn sieve_agrees_with_trial_division() {
        let ps = primes_between(1, 500);
        let expected: Vec<u64> = (1..=500).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, expected);
        assert!(primes_between(24, 28).is_empty());
    }

    #[test]
    fn batch_inversion() {
        let f = Fp::new(101).unwrap();
        let mut xs: Vec<u64> = (1..101).collect();
        f.batch_inv(&mut xs).unwrap();
        for (i, &y) in xs.iter().enumerate() {
            assert_eq!(f.mul(i as u64 + 1, y), 1);
        }
    }

    #[test]
    fn extension_basics() {
        let f5 = Fp::new(5).unwrap();
        let k = ExtField::new(f5, 2).unwrap();
        // x^2 + 2 is the first irreducible in the enumeration order
        assert_eq!(k.modulus().coeffs(), &[2, 0, 1]);
        let t = k.t();
        assert!(!k.in_prime_subfield(&t));
        assert!(k.in_prime_subfield(&k.from_base(3)));
        let t2 = k.mul(&t, &t);
        assert_eq!(t2.coeffs().len(), 2);
        assert_eq!(t2, k.from_base(3));
    }

    #[test]
    fn frobenius_fixes_exactly_the_prime_field() {
        for p in [3u64, 5, 7] {
            let k = ExtField::new(Fp::new(p).unwrap(), 2).unwrap();
            let mut fixed = 0;
            for i in 0..k.order() {
                let a = k.element_at(i);
                let fa = k.frobenius(&a);
                if fa == a {
                    fixed += 1;
                    assert!(k.in_prime_subfield(&a));
                }
                for j in [1u128, 7, 11] {
                    let b = k.element_at(j % k.order());
                    let s = k.add(&a, &b);
                    assert_eq!(k.frobenius(&s), k.add(&fa, &k.frobenius(&b)));
                }
                let c = 2 % p;
                assert_eq!(k.frobenius(&k.scale(c, &a)), k.scale(c, &fa));
            }
            assert_eq!(fixed, p);
        }
    }

    #[test]
    fn generators_and_inverses() {
        let k = ExtField::new(Fp::new(7).unwrap(), 2).unwrap();
        let g = k.generator_from(0);
        assert!(k.is_generator(&g));
        let mut seen = std::collections::HashSet::new();
        let mut x = k.one();
        for _ in 0..48 {
            seen.insert(x.clone());
            x = k.mul(&x, &g);
        }
        assert_eq!(seen.len(), 48);
        for i in 1..k.order() {
            let a = k.element_at(i);
            assert_eq!(k.mul(&a, &k.inv(&a).unwrap()), k.one());
        }
        assert!(k.inv(&k.zero()).is_err());
    }

    #[test]
    fn cubic_extension_modulus_is_irreducible() {
        for p in [3u64, 5, 7, 11] {
            let k = ExtField::new(Fp::new(p).unwrap(), 3).unwrap();
            assert!(k.modulus().is_irreducible());
            assert_eq!(k.modulus().degree(), Some(3));
        }
    }

    proptest! {
        #[test]
        fn inverse_and_euler(a in 1u64..1_000_003, pi in 0usize..4) {
            let p = [1_000_003u64, 65_537, 2_147_483_647, 104_729][pi];
            let f = Fp::new(p).unwrap();
            let a = f.reduce(a);
            prop_assume!(a != 0);
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            let e = f.pow(a, f.half() as u128);
            prop_assert_eq!(f.mul(e, e), 1);
        }

        #[test]
        fn legendre_is_multiplicative(a in 0u64..104_729, b in 0u64..104_729) {
            let f = Fp::new(104_729).unwrap();
            prop_assert_eq!(f.legendre(f.mul(a, b)), f.legendre(a) * f.legendre(b));
        }

        #[test]
        fn mul_matches_u128(a in 0u64..2_147_483_647, b in 0u64..2_147_483_647) {
            let f = Fp::new(2_147_483_647).unwrap();
            prop_assert_eq!(f.mul(a, b) as u128, (a as u128 * b as u128) % 2_147_483_647);
        }
    }
}
