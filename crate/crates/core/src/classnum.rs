//! Hurwitz class numbers, class numbers of `Q(sqrt(-p))`, and the
//! comparison of maximal root counts with `max_m H(4p - m^2)`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_rational::Ratio;
use serde::Serialize;

use crate::curves::{is_singular, EllipticFamily};
use crate::dist::{distribution, summarize, Substitution};
use crate::ff::Fp;
use crate::hyptrunc::truncate;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HurwitzValue {
    pub n: u64,
    /// `12 H(n)`, always an integer.
    pub twelve_h: u64,
}

impl HurwitzValue {
    pub fn value(&self) -> Ratio<u64> {
        Ratio::new(self.twelve_h, 12)
    }
}

/// Reduced positive definite forms `(a, b, c)` with `b^2 - 4ac = -n`.
pub fn reduced_forms(n: u64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    if n == 0 || n % 4 == 1 || n % 4 == 2 {
        return out;
    }
    let n = n as i64;
    let mut a = 1i64;
    while 3 * a * a <= n {
        // b has the parity of n
        let mut b = if (a + n) % 2 == 0 { -a } else { -a + 1 };
        while b <= a {
            let num = b * b + n;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a && !(b < 0 && (-b == a || a == c)) {
                    out.push((a, b, c));
                }
            }
            b += 2;
        }
        a += 1;
    }
    out
}

fn cache() -> &'static RwLock<HashMap<u64, u64>> {
    static C: OnceLock<RwLock<HashMap<u64, u64>>> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `12 H(n)`: reduced forms weighted 4 for `a(x^2+xy+y^2)`, 6 for
/// `a(x^2+y^2)`, 12 otherwise.
pub fn hurwitz(n: u64) -> Result<HurwitzValue> {
    if n == 0 {
        return Err(Error::Degenerate("H(0) is not defined here".into()));
    }
    if let Some(&t) = cache().read().expect("cache lock").get(&n) {
        return Ok(HurwitzValue { n, twelve_h: t });
    }
    let twelve_h = reduced_forms(n)
        .into_iter()
        .map(|(a, b, c)| match () {
            _ if a == b && b == c => 4,
            _ if b == 0 && a == c => 6,
            _ => 12,
        })
        .sum();
    cache().write().expect("cache lock").insert(n, twelve_h);
    Ok(HurwitzValue { n, twelve_h })
}

/// Class number of discriminant `-p` for `p = 3 mod 4`, `p > 3`.
pub fn h_fundamental(p: u64) -> Result<u64> {
    if p % 4 != 3 || p <= 3 {
        return Err(Error::Unsupported(format!("h(-p) needs p = 3 mod 4 and p > 3, got {p}")));
    }
    if !crate::ff::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(reduced_forms(p).len() as u64)
}

/// `sqrt(p) log p (log log p)^2`.
pub fn x_p(p: u64) -> f64 {
    let p = p as f64;
    let l = p.ln();
    p.sqrt() * l * l.ln().powi(2)
}

#[derive(Clone, Debug, Serialize)]
pub struct DeuringRow {
    pub m: i64,
    pub count: u32,
    /// `12 H(4p - m^2)`.
    pub twelve_h: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeuringReport {
    pub p: u64,
    pub family: EllipticFamily,
    pub spec: String,
    /// Rows for `|m| <= 2 sqrt(p)`.
    pub rows: Vec<DeuringRow>,
    pub m_p: u32,
    pub argmax: Vec<i64>,
    /// `12 H_p` with `H_p = max_m H(4p - m^2)`.
    pub twelve_h_p: u64,
    /// `M_p / H_p`.
    pub ratio: f64,
    pub x_p: f64,
    pub bound_constant: usize,
    /// `M_p <= C H_p` with `C` the family's class bound.
    pub within_bound: bool,
    /// Roots found outside `|m| <= 2 sqrt(p)`.
    pub mass_outside_window: u64,
}

pub fn deuring_report(p: u64, family: EllipticFamily) -> Result<DeuringReport> {
    if p > 100_000 {
        return Err(Error::Unsupported(format!("exhaustive sweep limited to p <= 100000, got {p}")));
    }
    let f = Fp::new(p)?;
    if p <= family.b() {
        return Err(Error::Unsupported(format!("need p > {}", family.b())));
    }
    let spec = family.spec();
    let t = truncate(&spec, p)?;
    let d = distribution(&t, Substitution::Identity);
    let s = summarize(&d);
    let mut rows = Vec::new();
    let mut twelve_h_p = 0;
    for m in crate::dist::signed_order(p) {
        let sq = (m * m) as u64;
        if sq > 4 * p {
            continue;
        }
        // m^2 = 4p is impossible for prime p
        let h = hurwitz(4 * p - sq)?.twelve_h;
        twelve_h_p = twelve_h_p.max(h);
        rows.push(DeuringRow { m, count: d.count(f.from_i64(m)), twelve_h: h });
    }
    let bound_constant = family.class_bound();
    Ok(DeuringReport {
        p,
        family,
        spec: spec.to_string(),
        rows,
        m_p: s.max_count,
        argmax: s.argmax,
        twelve_h_p,
        ratio: 12.0 * s.max_count as f64 / twelve_h_p as f64,
        x_p: x_p(p),
        bound_constant,
        within_bound: 12 * s.max_count as u64 <= bound_constant as u64 * twelve_h_p,
        mass_outside_window: s.mass_outside_window,
    })
}

/// CSV `m,count,hurwitz` with `H(4p - m^2)` as a reduced fraction.
pub fn write_deuring_csv<W: std::io::Write>(r: &DeuringReport, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["m", "count", "hurwitz"]).map_err(crate::dist::csv_err)?;
    for row in &r.rows {
        let h = Ratio::new(row.twelve_h, 12);
        wr.write_record([row.m.to_string(), row.count.to_string(), h.to_string()])
            .map_err(crate::dist::csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceMass {
    pub t: i64,
    /// `12 H(4p - t^2)`.
    pub twelve_h: u64,
    /// Nonsingular `(A, B)` with trace `t`.
    pub pairs: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EichlerDeuringReport {
    pub p: u64,
    pub rows: Vec<TraceMass>,
    /// `sum_t H(4p - t^2)` as a fraction.
    pub hurwitz_total: (u64, u64),
    /// `#pairs / (p - 1)`, the brute-force weighted curve count.
    pub brute_total: (u64, u64),
    /// `H(4p - t^2) / (pairs_t / (p - 1))` when this is the same for every `t`.
    pub uniform_factor: Option<(u64, u64)>,
}

/// Compare `H(4p - t^2)` with the number of curves `y^2 = x^3 + Ax + B` of
/// trace `t`, each weighted by `1/(p - 1)`. Any constant factor between the
/// two sides is reported as observed.
pub fn eichler_deuring_check(p: u64) -> Result<EichlerDeuringReport> {
    let f = Fp::new(p)?;
    if p < 5 || p > 2000 {
        return Err(Error::Unsupported(format!("brute-force census needs 5 <= p <= 2000, got {p}")));
    }
    let chi = f.legendre_table();
    let mut pairs: HashMap<i64, u64> = HashMap::new();
    let cubes: Vec<u64> = (0..p).map(|x| f.pow(x, 3)).collect();
    for a in 0..p {
        for b in 0..p {
            if is_singular(f, a, b) {
                continue;
            }
            let s: i64 = (0..p)
                .map(|x| chi[f.add(f.add(cubes[x as usize], f.mul(a, x)), b) as usize] as i64)
                .sum();
            *pairs.entry(-s).or_default() += 1;
        }
    }
    let mut rows = Vec::new();
    let mut h_total = Ratio::new(0u64, 1);
    let mut brute = Ratio::new(0u64, 1);
    let mut factor: Option<Ratio<u64>> = None;
    let mut uniform = true;
    let tmax = (2.0 * (p as f64).sqrt()).floor() as i64;
    for t in -tmax..=tmax {
        if (t * t) as u64 >= 4 * p {
            continue;
        }
        let h = hurwitz(4 * p - (t * t) as u64)?.twelve_h;
        let n = pairs.get(&t).copied().unwrap_or(0);
        h_total += Ratio::new(h, 12);
        brute += Ratio::new(n, p - 1);
        if n == 0 {
            uniform = false;
        } else {
            let r = Ratio::new(h * (p - 1), 12 * n);
            match factor {
                None => factor = Some(r),
                Some(g) if g != r => uniform = false,
                _ => {}
            }
        }
        rows.push(TraceMass { t, twelve_h: h, pairs: n });
    }
    debug_assert_eq!(pairs.keys().filter(|t| t.abs() > tmax).count(), 0);
    let frac = |r: Ratio<u64>| (*r.numer(), *r.denom());
    Ok(EichlerDeuringReport {
        p,
        rows,
        hurwitz_total: frac(h_total),
        brute_total: frac(brute),
        uniform_factor: if uniform { factor.map(frac) } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(hurwitz(3).unwrap().twelve_h, 4);
        assert_eq!(hurwitz(4).unwrap().twelve_h, 6);
        assert_eq!(hurwitz(23).unwrap().twelve_h, 36);
        assert_eq!(hurwitz(12).unwrap().twelve_h, 16);
        assert_eq!(hurwitz(5).unwrap().twelve_h, 0);
        assert_eq!(hurwitz(6).unwrap().twelve_h, 0);
        assert!(hurwitz(0).is_err());
    }

    #[test]
    fn fundamental() {
        assert_eq!(h_fundamental(7).unwrap(), 1);
        assert_eq!(h_fundamental(23).unwrap(), 3);
        assert_eq!(h_fundamental(11).unwrap(), 1);
        assert_eq!(h_fundamental(47).unwrap(), 5);
        assert!(h_fundamental(13).is_err());
        assert!(h_fundamental(3).is_err());
    }

    #[test]
    fn hurwitz_sum_identity() {
        // sum over |t| < 2 sqrt(p) of H(4p - t^2) is 2p
        for p in crate::ff::primes_between(5, 300) {
            let tmax = (2.0 * (p as f64).sqrt()) as i64;
            let s: u64 = (-tmax..=tmax)
                .filter(|t| ((t * t) as u64) < 4 * p)
                .map(|t| hurwitz(4 * p - (t * t) as u64).unwrap().twelve_h)
                .sum();
            assert_eq!(s, 24 * p, "p={p}");
        }
    }

    #[test]
    fn deuring_p7_p13() {
        let r = deuring_report(7, EllipticFamily::Legendre2).unwrap();
        let zero = r.rows.iter().find(|row| row.m == 0).unwrap();
        assert_eq!(zero.count, 3);
        assert_eq!(r.mass_outside_window, 0);
        assert!(r.within_bound);
        let r = deuring_report(13, EllipticFamily::Legendre2).unwrap();
        assert_eq!(r.rows.iter().find(|row| row.m == 0).unwrap().count, 0);
    }

    #[test]
    fn eichler_deuring_factor() {
        for p in [5u64, 7, 11, 13] {
            let r = eichler_deuring_check(p).unwrap();
            assert_eq!(r.hurwitz_total, (2 * p, 1));
            assert_eq!(r.brute_total, (p, 1));
            assert_eq!(r.uniform_factor, Some((2, 1)));
        }
    }
}
