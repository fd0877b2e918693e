//! Exact scalars and the combinatorial primitives used by the functional evaluators.
//!
//! Every scalar in the crate is a [`Rat`], an arbitrary-precision rational kept in
//! lowest terms with a positive denominator. Rationals travel through files and the
//! command line as `"p/q"` strings (or `"p"` for integers); decimal notation is
//! rejected so that no float ever leaks into an exact computation.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use thiserror::Error;

/// Exact rational scalar.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("decimal notation is not accepted, write {0:?} as p/q")]
    Decimal(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
}

/// Integer as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `p/q` as a rational. Panics when `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"` or `"p"`, with optional sign and surrounding whitespace.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    if s.contains(['.', 'e', 'E']) {
        return Err(ParseRatError::Decimal(s.to_string()));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| ParseRatError::Malformed(s.to_string()))?;
    let den = BigInt::from_str(den).map_err(|_| ParseRatError::Malformed(s.to_string()))?;
    if den.is_zero() {
        return Err(ParseRatError::ZeroDenominator(s.to_string()));
    }
    Ok(Rat::new(num, den))
}

/// Canonical string form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses a comma separated list of rationals, e.g. `"0,0,-1/2"`.
pub fn parse_rat_list(s: &str) -> Result<Vec<Rat>, ParseRatError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_rat).collect()
}

/// Serde adapters so that `Rat` fields read and write as `"p/q"` strings.
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rat(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

/// Rising factorial `a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: &Rat, n: usize) -> Rat {
    let mut acc = Rat::one();
    let mut term = a.clone();
    for _ in 0..n {
        acc *= &term;
        term += Rat::one();
    }
    acc
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

pub fn factorial_rat(n: usize) -> Rat {
    Rat::from_integer(BigInt::from(factorial(n)))
}

/// Binomial coefficient, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub fn binomial_rat(n: usize, k: usize) -> Rat {
    Rat::from_integer(BigInt::from(binomial(n, k)))
}

/// Stirling number of the second kind: partitions of an `m`-set into `k` nonempty blocks.
pub fn stirling2(m: usize, k: usize) -> BigUint {
    if k > m {
        return BigUint::zero();
    }
    // row[j] holds S(i, j) for the current i
    let mut row = vec![BigUint::zero(); k + 1];
    row[0] = BigUint::one();
    for _ in 0..m {
        for j in (1..=k).rev() {
            row[j] = &row[j] * BigUint::from(j) + &row[j - 1];
        }
        row[0] = BigUint::zero();
    }
    row[k].clone()
}

pub fn stirling2_rat(m: usize, k: usize) -> Rat {
    Rat::from_integer(BigInt::from(stirling2(m, k)))
}

/// `r^n` for a nonnegative exponent.
pub fn pow_usize(r: &Rat, n: usize) -> Rat {
    num_traits::pow(r.clone(), n)
}

/// Converts to `f64`, for display and for seeding numeric comparisons only.
pub fn to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}
