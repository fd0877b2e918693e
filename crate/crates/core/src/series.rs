//! Truncated formal power series.
//!
//! A [`Series`] stores `c_0..c_N` and represents a power series modulo `t^(N+1)`.
//! The coefficient ring is generic: [`Rat`] for the generating-function data
//! `A(t)`, `H(t)` and their inverses, and [`Poly`] when the whole bivariate
//! generating function `A(t) exp(x H(t))` is expanded at once.
//!
//! Operations that need to divide by a coefficient (reciprocal, logarithm,
//! rational powers, reversion) live on `Series<Rat>` only. The analytic maps are
//! defined on normalized inputs: `exp` wants a zero constant term, `log` and
//! `pow_rat` want constant term one.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::{format_rat, Rat};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("constant term is zero, series is not invertible")]
    ZeroConstantTerm,
    #[error("exp needs a zero constant term")]
    NonzeroConstantTerm,
    #[error("log and rational powers need constant term 1")]
    ConstantTermNotOne,
    #[error("inner series of a composition must have zero constant term")]
    NonzeroInnerConstant,
    #[error("reversion needs zero constant term and nonzero linear term")]
    NotReversible,
}

/// Coefficient ring of a [`Series`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + Zero + One {
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scaled(&self, r: &Rat) -> Self;
}

impl Coeff for Rat {
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, r: &Rat) -> Self {
        self * r
    }
}

impl Coeff for Poly {
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, r: &Rat) -> Self {
        self.scale(r)
    }
}

/// Power series truncated after `t^order`; always holds exactly `order + 1` coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Series<C> {
    coeffs: Vec<C>,
    order: usize,
}

pub type RatSeries = Series<Rat>;

impl<C: Coeff> Series<C> {
    /// Pads with zeros or truncates so that the result has `order + 1` coefficients.
    pub fn new(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::zero());
        Series { coeffs, order }
    }

    pub fn zero(order: usize) -> Self {
        Series::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Series::new(vec![C::one()], order)
    }

    /// The series `t`.
    pub fn var(order: usize) -> Self {
        Series::new(vec![C::zero(), C::one()], order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn constant_term(&self) -> &C {
        &self.coeffs[0]
    }

    /// Same coefficients viewed at another order: truncates, or pads with zeros.
    /// Padding does not invent information only when the caller knows the
    /// missing coefficients vanish or do not matter.
    pub fn resized(&self, order: usize) -> Self {
        Series::new(self.coeffs.clone(), order)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
            order: self.order,
        }
    }

    fn check_order(&self, rhs: &Self) -> Result<(), SeriesError> {
        if self.order == rhs.order {
            Ok(())
        } else {
            Err(SeriesError::OrderMismatch {
                left: self.order,
                right: rhs.order,
            })
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check_order(rhs)?;
        Ok(Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.plus(b))
                .collect(),
            order: self.order,
        })
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check_order(rhs)?;
        Ok(Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.minus(b))
                .collect(),
            order: self.order,
        })
    }

    /// Cauchy product truncated at the common order.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check_order(rhs)?;
        let n = self.order;
        let mut out = vec![C::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].plus(&a.times(b));
                }
            }
        }
        Ok(Series {
            coeffs: out,
            order: n,
        })
    }

    pub fn scale(&self, r: &Rat) -> Self {
        self.map(|c| c.scaled(r))
    }

    pub fn mul_coeff(&self, c: &C) -> Self {
        self.map(|a| a.times(c))
    }

    /// `t^k * self`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Series::new(coeffs, self.order)
    }

    /// Antiderivative with zero constant term. The output keeps order `N`, so the
    /// top input coefficient has nowhere to go and is dropped.
    pub fn integrate(&self) -> Self {
        self.integrate_raising().resized(self.order)
    }

    /// Antiderivative at order `N + 1`, keeping every input coefficient.
    pub fn integrate_raising(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.order + 2);
        coeffs.push(C::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scaled(&Rat::new(1.into(), (k + 1).into())));
        }
        Series {
            coeffs,
            order: self.order + 1,
        }
    }

    /// Formal derivative. Only `N` coefficients of the result are known, so the
    /// output has order `N - 1` (order 0 stays 0).
    pub fn derivative(&self) -> Self {
        let coeffs: Vec<C> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scaled(&Rat::from_integer(k.into())))
            .collect();
        Series::new(coeffs, self.order.saturating_sub(1))
    }

    /// Formal exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        // E' = S' E  gives  k e_k = sum_{j=1}^k j s_j e_{k-j}
        let n = self.order;
        let mut e: Vec<C> = Vec::with_capacity(n + 1);
        e.push(C::one());
        for k in 1..=n {
            let mut acc = C::zero();
            for j in 1..=k {
                let s = &self.coeffs[j];
                if s.is_zero() {
                    continue;
                }
                let term = s.times(&e[k - j]).scaled(&Rat::from_integer(j.into()));
                acc = acc.plus(&term);
            }
            e.push(acc.scaled(&Rat::new(1.into(), k.into())));
        }
        Ok(Series {
            coeffs: e,
            order: n,
        })
    }

    /// `outer(inner(t))` by Horner's rule, truncated at the common order.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self, SeriesError> {
        outer.check_order(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroInnerConstant);
        }
        let n = outer.order;
        let mut acc = Series::new(vec![outer.coeffs[n].clone()], n);
        for c in outer.coeffs[..n].iter().rev() {
            acc = acc.checked_mul(inner)?;
            acc.coeffs[0] = acc.coeffs[0].plus(c);
        }
        Ok(acc)
    }
}

impl Series<Rat> {
    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        Series::new(
            coeffs.iter().map(|&c| crate::exactnum::rat(c)).collect(),
            order,
        )
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let inv0 = a0.recip();
        let n = self.order;
        let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
        b.push(inv0.clone());
        for k in 1..=n {
            let mut acc = Rat::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &b[k - j];
                }
            }
            b.push(-acc * &inv0);
        }
        Ok(Series {
            coeffs: b,
            order: n,
        })
    }

    /// Formal logarithm of a series with constant term 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::ConstantTermNotOne);
        }
        if self.order == 0 {
            return Ok(Series::zero(0));
        }
        let inv = self.invert()?.resized(self.order - 1);
        let quotient = self.derivative().checked_mul(&inv)?;
        Ok(quotient.integrate_raising())
    }

    /// `self^r` for a series with constant term 1, as `exp(r log self)`.
    pub fn pow_rat(&self, r: &Rat) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::ConstantTermNotOne);
        }
        self.log()?.scale(r).exp()
    }

    /// Compositional inverse `G` with `self(G(t)) = G(self(t)) = t`.
    ///
    /// Newton iteration `G <- G - (H(G) - t) / H'(G)`, doubling the number of
    /// correct coefficients each round.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        let n = self.order;
        if !self.coeffs[0].is_zero() || n == 0 || self.coeffs[1].is_zero() {
            return Err(SeriesError::NotReversible);
        }
        let hprime = self.derivative();
        let mut g = Series::new(vec![Rat::zero(), self.coeffs[1].recip()], 1);
        let mut known = 2; // coefficients 0..known of g are exact
        while known <= n {
            let target = (2 * known).min(n + 1);
            let ord = target - 1;
            let g_ord = g.resized(ord);
            let h = self.resized(ord);
            // hprime is exact to order n-1; a padded top term only meets the
            // vanishing low part of the residual
            let dh = hprime.resized(ord);
            let residual = Series::compose(&h, &g_ord)?.checked_sub(&Series::var(ord))?;
            let slope = Series::compose(&dh, &g_ord)?;
            let step = residual.checked_mul(&slope.invert()?)?;
            g = g_ord.checked_sub(&step)?;
            known = target;
        }
        Ok(g.resized(n))
    }

    /// Coefficients as canonical `"p/q"` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rat).collect()
    }
}

macro_rules! series_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<C: Coeff> $tr<&Series<C>> for &Series<C> {
            type Output = Series<C>;
            /// Panics on mismatched orders; use the `checked_*` form to handle that case.
            fn $m(self, rhs: &Series<C>) -> Series<C> {
                self.$checked(rhs).expect("series orders must match")
            }
        }
        impl<C: Coeff> $tr<Series<C>> for Series<C> {
            type Output = Series<C>;
            fn $m(self, rhs: Series<C>) -> Series<C> {
                (&self).$m(&rhs)
            }
        }
    };
}

series_op!(Add, add, checked_add);
series_op!(Sub, sub, checked_sub);
series_op!(Mul, mul, checked_mul);

impl<C: Coeff> Neg for &Series<C> {
    type Output = Series<C>;

    fn neg(self) -> Series<C> {
        self.map(Coeff::negated)
    }
}

impl<C: Coeff> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series(order {}, {:?})", self.order, self.coeffs)
    }
}
