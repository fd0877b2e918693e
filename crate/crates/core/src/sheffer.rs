//! Sheffer pairs generated by a couple of polynomials, in both directions.
//!
//! A couple `[gamma, sigma]` with `deg gamma = d` and `deg sigma <= d + 1` generates
//!
//! ```text
//! exp( ∫_0^t gamma/sigma ) * exp( x ∫_0^t 1/sigma ) = Σ P_n(x) t^n / n!
//! ```
//!
//! and conversely a Sheffer pair `(A, H)` is of this form exactly when
//! `1/H'` is a polynomial of degree at most `d + 1` and `A'/(A H')` is a
//! polynomial of degree `d`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{factorial_rat, format_rat, serde_rat, Rat};
use crate::poly::Poly;
use crate::series::{RatSeries, Series, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShefferError {
    #[error("d must be at least 1")]
    ZeroD,
    #[error("gamma has {found} coefficients beyond degree {d}")]
    GammaTooLong { d: usize, found: usize },
    #[error("sigma has nonzero coefficients beyond degree {max}")]
    SigmaTooLong { max: usize },
    #[error("sigma(0) = 0, the couple generates no Sheffer pair")]
    ZeroSigmaConstant,
    #[error("A(0) must be 1, found {0}")]
    ANotNormalized(String),
    #[error("H(0) must be 0 and H'(0) nonzero")]
    BadH,
    #[error("truncation order {order} is too low, need at least {needed}")]
    OrderTooLow { order: usize, needed: usize },
    #[error("not-d-orthogonal-sheffer: {series} has a nonzero coefficient at t^{degree}, beyond degree {bound}")]
    NotDOrthogonalSheffer {
        series: &'static str,
        degree: usize,
        bound: usize,
    },
    #[error("gamma has degree {found:?}, expected exactly {d}")]
    GammaDegree { d: usize, found: Option<usize> },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The couple `[gamma_d, sigma_{d+1}]`: `gamma` holds `beta_0..beta_d`, `sigma`
/// holds `alpha_0..alpha_{d+1}` (zero-padded, so lower degrees are allowed).
///
/// Construction only enforces the shape. Whether `beta_d` and `alpha_0` are
/// nonzero is reported by [`check_conditions`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCouple", into = "RawCouple")]
pub struct CoupleSpec {
    d: usize,
    gamma: Vec<Rat>,
    sigma: Vec<Rat>,
}

#[derive(Serialize, Deserialize)]
struct RawCouple {
    d: usize,
    #[serde(with = "serde_rat::vec")]
    gamma: Vec<Rat>,
    #[serde(with = "serde_rat::vec")]
    sigma: Vec<Rat>,
}

impl TryFrom<RawCouple> for CoupleSpec {
    type Error = ShefferError;

    fn try_from(raw: RawCouple) -> Result<Self, Self::Error> {
        CoupleSpec::new(raw.d, raw.gamma, raw.sigma)
    }
}

impl From<CoupleSpec> for RawCouple {
    fn from(c: CoupleSpec) -> Self {
        RawCouple {
            d: c.d,
            gamma: c.gamma,
            sigma: c.sigma,
        }
    }
}

fn fit(mut v: Vec<Rat>, len: usize) -> Result<Vec<Rat>, usize> {
    while v.len() > len && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    if v.len() > len {
        return Err(v.len() - len);
    }
    v.resize(len, Rat::zero());
    Ok(v)
}

impl CoupleSpec {
    pub fn new(d: usize, gamma: Vec<Rat>, sigma: Vec<Rat>) -> Result<Self, ShefferError> {
        if d == 0 {
            return Err(ShefferError::ZeroD);
        }
        let gamma = fit(gamma, d + 1).map_err(|found| ShefferError::GammaTooLong { d, found })?;
        let sigma = fit(sigma, d + 2).map_err(|_| ShefferError::SigmaTooLong { max: d + 1 })?;
        Ok(CoupleSpec { d, gamma, sigma })
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `beta_0..beta_d`
    pub fn gamma(&self) -> &[Rat] {
        &self.gamma
    }

    /// `alpha_0..alpha_{d+1}`
    pub fn sigma(&self) -> &[Rat] {
        &self.sigma
    }

    pub fn gamma_poly(&self) -> Poly {
        Poly::new(self.gamma.clone())
    }

    pub fn sigma_poly(&self) -> Poly {
        Poly::new(self.sigma.clone())
    }
}

/// Exponential-form data `A(t) exp(x H(t))`, with the discrete (Newton) form kept
/// alongside when the set was given as `A(t) (1 + w H(t))^(x/w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShefferPair {
    a: RatSeries,
    hx: RatSeries,
    newton: Option<NewtonForm>,
}

/// `(1 + step * h(t))^(x / step)`
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonForm {
    pub h: RatSeries,
    pub step: Rat,
}

impl ShefferPair {
    /// Checks `A(0) = 1`, `H(0) = 0`, `H'(0) != 0` and equal orders.
    pub fn new(a: RatSeries, hx: RatSeries) -> Result<Self, ShefferError> {
        if !a.constant_term().is_one() {
            return Err(ShefferError::ANotNormalized(format_rat(a.constant_term())));
        }
        if a.order() != hx.order() {
            return Err(SeriesError::OrderMismatch {
                left: a.order(),
                right: hx.order(),
            }
            .into());
        }
        if hx.order() == 0 || !hx.constant_term().is_zero() || hx.coeff(1).is_zero() {
            return Err(ShefferError::BadH);
        }
        Ok(ShefferPair {
            a,
            hx,
            newton: None,
        })
    }

    /// Builds the pair from the Newton form, converting `(1 + w h)^(x/w)` to
    /// `exp(x log(1 + w h) / w)` and keeping `(h, w)` for the difference operator.
    pub fn from_newton(a: RatSeries, h: RatSeries, step: Rat) -> Result<Self, ShefferError> {
        if step.is_zero() {
            return Err(ShefferError::BadH);
        }
        let base = &RatSeries::one(h.order()) + &h.scale(&step);
        let hx = base.log()?.scale(&step.recip());
        let mut pair = ShefferPair::new(a, hx)?;
        pair.newton = Some(NewtonForm { h, step });
        Ok(pair)
    }

    pub fn a(&self) -> &RatSeries {
        &self.a
    }

    /// The series multiplying `x` in the exponent.
    pub fn hx(&self) -> &RatSeries {
        &self.hx
    }

    pub fn newton(&self) -> Option<&NewtonForm> {
        self.newton.as_ref()
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }
}

/// `P_0..P_N`, with `deg P_n = n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySequence {
    polys: Vec<Poly>,
}

impl PolySequence {
    pub fn new(polys: Vec<Poly>) -> Self {
        PolySequence { polys }
    }

    /// `P_n`, and the zero polynomial for negative indices.
    pub fn get(&self, n: isize) -> Poly {
        if n < 0 {
            return Poly::zero();
        }
        self.polys[n as usize].clone()
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    /// Highest available index `N`.
    pub fn max_index(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn truncated(&self, n: usize) -> Self {
        PolySequence {
            polys: self.polys[..=n.min(self.max_index())].to_vec(),
        }
    }
}

/// `H = ∫ 1/sigma`, `A = exp ∫ gamma/sigma`, both at order `n`.
pub fn pair_from_couple(c: &CoupleSpec, n: usize) -> Result<ShefferPair, ShefferError> {
    if c.sigma[0].is_zero() {
        return Err(ShefferError::ZeroSigmaConstant);
    }
    // integrate_raising lifts order n-1 data to order n without losing a term
    let m = n.saturating_sub(1);
    let sigma = RatSeries::new(c.sigma.clone(), m);
    let gamma = RatSeries::new(c.gamma.clone(), m);
    let inv = sigma.invert()?;
    let h = inv.integrate_raising();
    let a = (&gamma * &inv).integrate_raising().exp()?;
    ShefferPair::new(a.resized(n), h.resized(n))
}

/// One entry of the `alpha_0 (n alpha_{d+1} - beta_d) != 0` check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionEntry {
    pub n: usize,
    #[serde(with = "serde_rat")]
    pub value: Rat,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub alpha0_nonzero: bool,
    pub beta_d_nonzero: bool,
    /// `n alpha_{d+1} - beta_d` for `n = 1..N`
    pub entries: Vec<ConditionEntry>,
    pub pass: bool,
}

impl ConditionReport {
    pub fn failing_n(&self) -> Vec<usize> {
        self.entries.iter().filter(|e| !e.ok).map(|e| e.n).collect()
    }
}

pub fn check_conditions(c: &CoupleSpec, n: usize) -> ConditionReport {
    let d = c.d;
    let alpha0_nonzero = !c.sigma[0].is_zero();
    let beta_d_nonzero = !c.gamma[d].is_zero();
    let entries: Vec<ConditionEntry> = (1..=n)
        .map(|k| {
            let value = Rat::from_integer(k.into()) * &c.sigma[d + 1] - &c.gamma[d];
            ConditionEntry {
                n: k,
                ok: !value.is_zero(),
                value,
            }
        })
        .collect();
    let pass = alpha0_nonzero && beta_d_nonzero && entries.iter().all(|e| e.ok);
    ConditionReport {
        alpha0_nonzero,
        beta_d_nonzero,
        entries,
        pass,
    }
}

/// `P_n = n! [t^n] A(t) exp(x H(t))` for `n = 0..=n_max`.
pub fn expand_polynomials(p: &ShefferPair, n_max: usize) -> Result<PolySequence, ShefferError> {
    if p.order() < n_max {
        return Err(ShefferError::OrderTooLow {
            order: p.order(),
            needed: n_max,
        });
    }
    let exponent: Series<Poly> = p.hx.resized(n_max).map(|h| Poly::monomial(h.clone(), 1));
    let a: Series<Poly> = p.a.resized(n_max).map(|c| Poly::constant(c.clone()));
    let g = &a * &exponent.exp()?;
    let polys = g
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.scale(&factorial_rat(k)))
        .collect();
    Ok(PolySequence { polys })
}

/// Recovers the couple: `sigma = 1/H'`, `gamma = A' sigma / A`.
///
/// Both must be polynomials of the right degree. Polynomiality is certified by
/// the vanishing of every truncated coefficient above the bound, which needs
/// `N > 2(d + 1)` to mean anything.
pub fn couple_from_pair(p: &ShefferPair, d: usize) -> Result<CoupleSpec, ShefferError> {
    if d == 0 {
        return Err(ShefferError::ZeroD);
    }
    let n = p.order();
    let needed = 2 * (d + 1) + 1;
    if n < needed {
        return Err(ShefferError::OrderTooLow { order: n, needed });
    }
    let hprime = p.hx.derivative();
    let sigma = hprime.invert()?;
    let a_inv = p.a.invert()?.resized(n - 1);
    let gamma = &(&p.a.derivative() * &sigma) * &a_inv;

    let first_nonzero_beyond =
        |s: &RatSeries, bound: usize| (bound + 1..=s.order()).find(|&k| !s.coeff(k).is_zero());
    if let Some(degree) = first_nonzero_beyond(&sigma, d + 1) {
        return Err(ShefferError::NotDOrthogonalSheffer {
            series: "sigma = 1/H'",
            degree,
            bound: d + 1,
        });
    }
    if let Some(degree) = first_nonzero_beyond(&gamma, d) {
        return Err(ShefferError::NotDOrthogonalSheffer {
            series: "gamma = A'/(A H')",
            degree,
            bound: d,
        });
    }
    if gamma.coeff(d).is_zero() {
        let found = (0..d).rev().find(|&k| !gamma.coeff(k).is_zero());
        return Err(ShefferError::GammaDegree { d, found });
    }
    CoupleSpec::new(
        d,
        gamma.coeffs()[..=d].to_vec(),
        sigma.coeffs()[..=d + 1].to_vec(),
    )
}
