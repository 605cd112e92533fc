//! Value distributions `m -> N_p(m)` of a polynomial over every point of
//! `F_p`, optionally after a substitution `x -> sigma(x)`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ff::Fp;
use crate::hyptrunc::TruncatedPoly;
use crate::poly::Poly;
use crate::{Error, Result};

/// Inner argument substituted before evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "k")]
pub enum Substitution {
    Identity,
    /// `4x(1 - x)`
    Quad4x1mx,
    /// `1 - x^2`
    OneMinusXSq,
    /// `x^k`, `k >= 1`
    PowerK(u32),
}

impl Substitution {
    pub fn power(k: u32) -> Result<Substitution> {
        if k == 0 {
            return Err(Error::InvalidSpec("power substitution needs k >= 1".into()));
        }
        Ok(Substitution::PowerK(k))
    }

    #[inline]
    pub fn apply(self, f: Fp, x: u64) -> u64 {
        match self {
            Substitution::Identity => x,
            Substitution::Quad4x1mx => f.mul(f.mul(4, x), f.sub(1, x)),
            Substitution::OneMinusXSq => f.sub(1, f.mul(x, x)),
            Substitution::PowerK(k) => f.pow(x, k as u128),
        }
    }

    /// `sigma` as a polynomial, for composing instead of substituting.
    pub fn as_poly(self, f: Fp) -> Poly {
        match self {
            Substitution::Identity => Poly::x(f),
            Substitution::Quad4x1mx => Poly::from_signed(f, &[0, 4, -4]),
            Substitution::OneMinusXSq => Poly::from_signed(f, &[1, 0, -1]),
            Substitution::PowerK(k) => Poly::monomial(f, 1, k as usize),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Substitution::Identity => fm.write_str("identity"),
            Substitution::Quad4x1mx => fm.write_str("4x(1-x)"),
            Substitution::OneMinusXSq => fm.write_str("1-x^2"),
            Substitution::PowerK(k) => write!(fm, "x^{k}"),
        }
    }
}

impl FromStr for Substitution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Substitution> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match t.as_str() {
            "identity" | "id" | "x" => Ok(Substitution::Identity),
            "4x(1-x)" | "quad" => Ok(Substitution::Quad4x1mx),
            "1-x^2" | "1-x2" => Ok(Substitution::OneMinusXSq),
            _ => {
                let k = t
                    .strip_prefix("x^")
                    .or_else(|| t.strip_prefix("pow:"))
                    .and_then(|k| k.parse::<u32>().ok())
                    .ok_or_else(|| Error::InvalidSpec(format!("unknown substitution {s:?}")))?;
                Substitution::power(k)
            }
        }
    }
}

/// `counts[m] = #{x in F_p : f(sigma(x)) == m}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootDistribution {
    pub p: u64,
    pub spec: Option<String>,
    pub substitution: Substitution,
    pub degree: Option<usize>,
    pub counts: Vec<u32>,
    pub elapsed_secs: f64,
}

impl RootDistribution {
    pub fn count(&self, m: u64) -> u32 {
        self.counts[m as usize]
    }

    /// Count at the signed residue `m`.
    pub fn count_signed(&self, m: i64) -> u32 {
        let p = self.p as i64;
        self.counts[m.rem_euclid(p) as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }
}

const DEFAULT_CHUNK: usize = 1 << 12;

pub fn distribution(t: &TruncatedPoly, sigma: Substitution) -> RootDistribution {
    let mut d = distribution_poly(&t.poly, sigma);
    d.spec = Some(t.spec.to_string());
    d
}

pub fn distribution_poly(poly: &Poly, sigma: Substitution) -> RootDistribution {
    distribution_chunked(poly, sigma, DEFAULT_CHUNK)
}

/// As [`distribution_poly`] with an explicit chunk size; the counts do not
/// depend on it.
pub fn distribution_chunked(poly: &Poly, sigma: Substitution, chunk: usize) -> RootDistribution {
    let start = Instant::now();
    let f = poly.field();
    let p = f.p() as usize;
    let chunk = chunk.max(4);
    let n_chunks = p.div_ceil(chunk);
    let counts = (0..n_chunks)
        .into_par_iter()
        .fold(
            || vec![0u32; p],
            |mut acc, c| {
                let lo = c * chunk;
                let hi = (lo + chunk).min(p);
                let mut x = lo;
                while x + 4 <= hi {
                    let xs = [0, 1, 2, 3].map(|i| sigma.apply(f, (x + i) as u64));
                    for v in poly.eval4(xs) {
                        acc[v as usize] += 1;
                    }
                    x += 4;
                }
                for x in x..hi {
                    acc[poly.eval(sigma.apply(f, x as u64)) as usize] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u32; p],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.saturating_add(y);
                }
                a
            },
        );
    RootDistribution {
        p: f.p(),
        spec: None,
        substitution: sigma,
        degree: poly.degree(),
        counts,
        elapsed_secs: start.elapsed().as_secs_f64(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub p: u64,
    /// `M_p`, the largest count.
    pub max_count: u32,
    /// Signed residues attaining `M_p`, ascending.
    pub argmax: Vec<i64>,
    /// `c -> #{m : N_p(m) = c}`.
    pub histogram: BTreeMap<u32, u64>,
    /// `2 sqrt(p)`.
    pub window: f64,
    pub mass_inside_window: u64,
    pub mass_outside_window: u64,
}

pub fn summarize(d: &RootDistribution) -> Summary {
    let f = Fp::new(d.p).expect("distribution over a valid prime");
    let max_count = d.counts.iter().copied().max().unwrap_or(0);
    let mut argmax: Vec<i64> = (0..d.p)
        .filter(|&m| d.counts[m as usize] == max_count)
        .map(|m| f.lift(m))
        .collect();
    argmax.sort_unstable();
    let mut histogram = BTreeMap::new();
    for &c in &d.counts {
        *histogram.entry(c).or_insert(0) += 1;
    }
    let (mut inside, mut outside) = (0, 0);
    for (m, &c) in d.counts.iter().enumerate() {
        let s = f.lift(m as u64);
        if ((s * s) as u64) <= 4 * d.p {
            inside += c as u64;
        } else {
            outside += c as u64;
        }
    }
    Summary {
        p: d.p,
        max_count,
        argmax,
        histogram,
        window: 2.0 * (d.p as f64).sqrt(),
        mass_inside_window: inside,
        mass_outside_window: outside,
    }
}

/// Residues in signed-lift order `-(p-1)/2 ..= (p-1)/2`.
pub fn signed_order(p: u64) -> impl Iterator<Item = i64> {
    let h = (p / 2) as i64;
    -h..=h
}

/// CSV with header `m,count`, rows in signed-lift order.
pub fn write_csv<W: Write>(d: &RootDistribution, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["m", "count"]).map_err(csv_err)?;
    for m in signed_order(d.p) {
        wr.write_record([m.to_string(), d.count_signed(m).to_string()]).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn to_csv_string(d: &RootDistribution) -> String {
    let mut buf = Vec::new();
    write_csv(d, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

/// Read back `m,count` rows.
pub fn read_csv<R: std::io::Read>(r: R) -> Result<Vec<(i64, u32)>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for rec in rd.deserialize::<(i64, u32)>() {
        out.push(rec.map_err(csv_err)?);
    }
    Ok(out)
}

pub fn export_csv(d: &RootDistribution, path: &Path) -> Result<()> {
    write_csv(d, std::fs::File::create(path)?)
}

/// JSON with the full counts array and metadata; `extra` is merged in at
/// the top level.
pub fn export_json(d: &RootDistribution, extra: serde_json::Value, path: &Path) -> Result<()> {
    let mut v = serde_json::to_value(d).map_err(json_err)?;
    if let (Some(obj), serde_json::Value::Object(more)) = (v.as_object_mut(), extra) {
        obj.extend(more);
    }
    let s = serde_json::to_string_pretty(&v).map_err(json_err)?;
    std::fs::write(path, s)?;
    Ok(())
}

pub fn import_json(path: &Path) -> Result<RootDistribution> {
    let s = std::fs::read_to_string(path)?;
    serde_json::from_str(&s).map_err(json_err)
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub(crate) fn json_err(e: serde_json::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyptrunc::{truncate, HypSpec};
    use proptest::prelude::*;

    fn hasse(p: u64) -> TruncatedPoly {
        truncate(&"2F1(1/2,1/2;1)".parse::<HypSpec>().unwrap(), p).unwrap()
    }

    #[test]
    fn hasse_p7() {
        let d = distribution(&hasse(7), Substitution::Identity);
        assert_eq!(d.count(0), 3);
        assert_eq!(d.total(), 7);
        let s = summarize(&d);
        assert_eq!(s.histogram.values().sum::<u64>(), 7);
        assert_eq!(s.mass_outside_window, 0);
        assert!(s.argmax.iter().all(|&m| d.count_signed(m) == s.max_count));
    }

    #[test]
    fn constant_poly() {
        let f = Fp::new(11).unwrap();
        let d = distribution_poly(&Poly::constant(f, 5), Substitution::Quad4x1mx);
        assert_eq!(d.count(5), 11);
        assert_eq!(d.total(), 11);
    }

    #[test]
    fn csv_layout() {
        let d = distribution(&hasse(7), Substitution::Identity);
        let s = to_csv_string(&d);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 8);
        assert_eq!(lines[0], "m,count");
        assert_eq!(lines[1].split(',').next(), Some("-3"));
        let rows = read_csv(s.as_bytes()).unwrap();
        assert_eq!(rows.iter().map(|r| r.1 as u64).sum::<u64>(), 7);
        assert_eq!(rows.iter().find(|r| r.0 == 0).unwrap().1, 3);
    }

    #[test]
    fn json_roundtrip() {
        let dir = std::env::temp_dir().join(format!("hypmod-dist-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("d.json");
        let d = distribution(&hasse(13), Substitution::OneMinusXSq);
        export_json(&d, serde_json::json!({"note": "x"}), &path).unwrap();
        let back = import_json(&path).unwrap();
        assert_eq!(back.counts, d.counts);
        assert_eq!(back.substitution, d.substitution);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn substitution_parsing() {
        for s in ["identity", "4x(1-x)", "1-x^2", "x^3"] {
            let t: Substitution = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert!("x^0".parse::<Substitution>().is_err());
        assert!("sin".parse::<Substitution>().is_err());
    }

    #[test]
    fn substitution_matches_composition() {
        for p in crate::ff::primes_between(5, 101) {
            let t = hasse(p);
            for sigma in [Substitution::Quad4x1mx, Substitution::OneMinusXSq, Substitution::PowerK(3)] {
                let composed = t.poly.compose(&sigma.as_poly(t.field()));
                let a = distribution(&t, sigma);
                let b = distribution_poly(&composed, Substitution::Identity);
                assert_eq!(a.counts, b.counts, "p={p} {sigma}");
            }
        }
    }

    proptest! {
        #[test]
        fn chunking_is_irrelevant(coeffs in prop::collection::vec(0u64..1000, 0..30), chunk in 1usize..100) {
            let f = Fp::new(211).unwrap();
            let poly = Poly::new(f, coeffs.iter().map(|&c| f.reduce(c)).collect());
            let a = distribution_chunked(&poly, Substitution::Identity, chunk);
            let b = distribution_chunked(&poly, Substitution::Identity, 211);
            prop_assert_eq!(&a.counts, &b.counts);
            prop_assert_eq!(a.total(), 211);
        }
    }
}
