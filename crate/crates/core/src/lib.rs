//! Mod-p truncations of hypergeometric series.
//!
//! The crate builds the natural truncation `F^(p)` of a hypergeometric
//! series with rational parameters, checks the mod-p transformation
//! formulas relating such truncations, ties them to point counts on
//! elliptic curves and K3 surfaces, and computes the full value
//! distribution `m -> N_p(m)` of a truncation over `F_p`.
//!
//! Layout:
//! - [`ff`]: prime fields and their extensions.
//! - [`poly`]: dense univariate polynomials over `F_p`.
//! - [`hyptrunc`]: parameters, specs and truncations.
//! - [`identities`]: exact verifiers for the transformation formulas.
//! - [`curves`]: character sums, curve families, K3 surfaces.
//! - [`classnum`]: Hurwitz class numbers and the Deuring comparison.
//! - [`dist`]: root-count distributions at scale.
//! - [`ratfun`]: truncated rational functions and their value classes.
//! - [`kummer`]: confluent truncations over `F_q`.

pub mod classnum;
pub mod curves;
pub mod dist;
mod error;
pub mod ff;
pub mod hyptrunc;
pub mod identities;
pub mod kummer;
pub mod poly;
pub mod ratfun;

pub use error::{Error, Result};
pub use ff::{ExtElem, ExtField, Fp};
pub use hyptrunc::{HypSpec, RationalParam, TruncatedPoly};
pub use poly::Poly;
