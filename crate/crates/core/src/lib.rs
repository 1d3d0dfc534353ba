//! Learning over the Boolean cube `{-1,+1}^n` with local membership queries.
//!
//! The crate is `no_std` (it needs `alloc`). It provides:
//!
//! * [`cube`]: points, flips, Hamming metric, balls and exhaustive enumeration;
//! * [`concepts`]: DNFs, decision trees, DFAs, juntas, sparse polynomials and PTFs;
//! * [`distributions`]: sampling, pushforward and exact / Monte Carlo loss;
//! * [`oracle`]: a membership oracle that refuses non-local queries and logs the rest;
//! * [`evident`]: evident satisfaction of DNF terms and instance generators;
//! * [`learner`]: the 1-local-query learner for DNFs with evident examples;
//! * [`reductions`]: q-reductions of type A and B with brute-force verifiers.
//!
//! Coordinates are 0-based throughout the API. Textual formats are 1-based.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod concepts;
pub mod cube;
pub mod distributions;
mod error;
pub mod evident;
pub mod learner;
pub mod oracle;
pub mod reductions;
pub mod rng;

pub use error::{Error, Result};

/// Exact rational used for probabilities and polynomial coefficients.
pub type Rational = num_rational::Ratio<i128>;

/// Serde helper writing a [`Rational`] as the string `"p/q"` (or `"p"`).
pub mod ratio_str {
    use alloc::string::{String, ToString};

    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| serde::de::Error::custom(alloc::format!("not a fraction: {s:?}")))
    }

    /// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"`.
    pub fn parse(s: &str) -> Option<Rational> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let q: i128 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            return Some(Rational::new(p.trim().parse().ok()?, q));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 30 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let negative = int.starts_with('-');
            let whole: i128 = if int.is_empty() || int == "-" { 0 } else { int.parse().ok()? };
            let scale = 10i128.checked_pow(frac.len() as u32)?;
            let f: i128 = frac.parse().ok()?;
            let num = whole.checked_abs()?.checked_mul(scale)?.checked_add(f)?;
            return Some(Rational::new(if negative { -num } else { num }, scale));
        }
        Some(Rational::from_integer(s.parse().ok()?))
    }

}
