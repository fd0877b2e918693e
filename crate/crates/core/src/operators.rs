//! Lowering operators and the functional vector of a Sheffer set.
//!
//! For `A(t) exp(x H(t))` the lowering operator is `H*(D)` with `H*` the
//! compositional inverse of `H`; for the discrete form `A(t) (1 + w H(t))^(x/w)`
//! it is `H*(Δ_w)`. Both base operators lower degree by exactly one, so an
//! operator series applied to a polynomial of degree `m` only needs its first
//! `m + 1` terms.
//!
//! The functionals are `<u_i, f> = (1/i!) [σ^i / A(σ) f]_{x=0}` for `i < d`.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::{factorial_rat, pow_usize, stirling2_rat, Rat};
use crate::poly::Poly;
use crate::series::{RatSeries, SeriesError};
use crate::sheffer::ShefferPair;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("functional index {index} out of range for d = {d}")]
    IndexOutOfRange { index: usize, d: usize },
    #[error("operator series known to order {order}, polynomial has degree {degree}")]
    InsufficientOrder { order: usize, degree: usize },
    #[error("difference step must be nonzero")]
    ZeroStep,
    #[error("A(0) must be 1")]
    ANotNormalized,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The degree-lowering operator the lowering series is evaluated at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseOp {
    Derivative,
    /// `(f(x + step) - f(x)) / step`
    Difference {
        step: Rat,
    },
}

impl BaseOp {
    pub fn is_difference(&self) -> bool {
        matches!(self, BaseOp::Difference { .. })
    }
}

pub fn apply_base(base: &BaseOp, f: &Poly) -> Poly {
    match base {
        BaseOp::Derivative => f.derivative(),
        BaseOp::Difference { step } => f.forward_difference(step),
    }
}

/// `σ = H*(B)`, stored as the series `H*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoweringOp {
    base: BaseOp,
    hstar: RatSeries,
}

impl LoweringOp {
    pub fn new(base: BaseOp, hstar: RatSeries) -> Result<Self, OperatorError> {
        if let BaseOp::Difference { step } = &base {
            if step.is_zero() {
                return Err(OperatorError::ZeroStep);
            }
        }
        if hstar.order() == 0 || !hstar.constant_term().is_zero() || hstar.coeff(1).is_zero() {
            return Err(SeriesError::NotReversible.into());
        }
        Ok(LoweringOp { base, hstar })
    }

    pub fn base(&self) -> &BaseOp {
        &self.base
    }

    pub fn hstar(&self) -> &RatSeries {
        &self.hstar
    }

    pub fn order(&self) -> usize {
        self.hstar.order()
    }

    /// Lowering operator of a pair: `H*(Δ_w)` for pairs built from the Newton form,
    /// `H*(D)` otherwise.
    pub fn for_pair(pair: &ShefferPair) -> Result<Self, OperatorError> {
        match pair.newton() {
            Some(nf) => lowering_from_h(
                &nf.h,
                BaseOp::Difference {
                    step: nf.step.clone(),
                },
            ),
            None => lowering_from_h(pair.hx(), BaseOp::Derivative),
        }
    }
}

/// Inverts `H` at its own truncation order.
pub fn lowering_from_h(h: &RatSeries, base: BaseOp) -> Result<LoweringOp, OperatorError> {
    LoweringOp::new(base, h.reversion()?)
}

/// `Σ_{k>=1} h*_k B^k f`. The sum stops at `deg f` because `B` lowers degree.
pub fn apply_lowering(op: &LoweringOp, f: &Poly) -> Result<Poly, OperatorError> {
    let Some(deg) = f.degree() else {
        return Ok(Poly::zero());
    };
    if deg > op.order() {
        return Err(OperatorError::InsufficientOrder {
            order: op.order(),
            degree: deg,
        });
    }
    let mut acc = Poly::zero();
    let mut power = f.clone();
    for k in 1..=deg {
        power = apply_base(&op.base, &power);
        let c = op.hstar.coeff(k);
        if !c.is_zero() {
            acc = acc + power.scale(c);
        }
    }
    Ok(acc)
}

/// The functionals `u_0..u_{d-1}` attached to `A` and the lowering operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalVector {
    a_inv: RatSeries,
    lop: LoweringOp,
    d: usize,
}

impl FunctionalVector {
    pub fn new(a: &RatSeries, lop: LoweringOp, d: usize) -> Result<Self, OperatorError> {
        if !a.constant_term().is_one() {
            return Err(OperatorError::ANotNormalized);
        }
        Ok(FunctionalVector {
            a_inv: a.invert()?,
            lop,
            d,
        })
    }

    pub fn for_pair(pair: &ShefferPair, d: usize) -> Result<Self, OperatorError> {
        FunctionalVector::new(pair.a(), LoweringOp::for_pair(pair)?, d)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn lowering(&self) -> &LoweringOp {
        &self.lop
    }

    /// Largest polynomial degree the vector can evaluate exactly.
    pub fn max_degree(&self) -> usize {
        self.a_inv.order().min(self.lop.order())
    }

    fn check(&self, i: usize, degree: usize) -> Result<(), OperatorError> {
        if i >= self.d {
            return Err(OperatorError::IndexOutOfRange {
                index: i,
                d: self.d,
            });
        }
        if degree > self.max_degree() {
            return Err(OperatorError::InsufficientOrder {
                order: self.max_degree(),
                degree,
            });
        }
        Ok(())
    }

    /// Coefficients of `t^i / A(t)` up to `t^m`.
    fn operator_series(&self, i: usize, m: usize) -> RatSeries {
        self.a_inv.resized(m).shift_up(i)
    }

    /// `<u_i, f>`
    pub fn eval(&self, i: usize, f: &Poly) -> Result<Rat, OperatorError> {
        let Some(m) = f.degree() else {
            self.check(i, 0)?;
            return Ok(Rat::zero());
        };
        self.check(i, m)?;
        let q = self.operator_series(i, m);
        let mut acc = Rat::zero();
        let mut g = f.clone();
        for j in 0..=m {
            let c = q.coeff(j);
            if !c.is_zero() {
                acc += c * g.coeff(0);
            }
            if j < m {
                g = apply_lowering(&self.lop, &g)?;
            }
        }
        Ok(acc / factorial_rat(i))
    }

    /// Moments `<u_i, x^j>` for `j = 0..=max_deg`.
    ///
    /// With `G = (t^i / A) ∘ H*`, `ev_0 ∘ D^k` picks out `j! [t^j] G` and
    /// `ev_0 ∘ Δ_ω^k x^j = ω^(j-k) k! S(j, k)`, so one composition gives every moment.
    pub fn moments(&self, i: usize, max_deg: usize) -> Result<Vec<Rat>, OperatorError> {
        self.check(i, max_deg)?;
        let q = self.operator_series(i, max_deg);
        let g = RatSeries::compose(&q, &self.lop.hstar.resized(max_deg))?;
        let scale = factorial_rat(i).recip();
        let out = (0..=max_deg).map(|j| match &self.lop.base {
            BaseOp::Derivative => factorial_rat(j) * g.coeff(j),
            BaseOp::Difference { step } => (0..=j).fold(Rat::zero(), |acc, k| {
                acc + factorial_rat(k) * stirling2_rat(j, k) * pow_usize(step, j - k) * g.coeff(k)
            }),
        });
        Ok(out.map(|v| v * &scale).collect())
    }
}

/// `<u_i, f>` for a functional vector.
pub fn functional_eval(v: &FunctionalVector, i: usize, f: &Poly) -> Result<Rat, OperatorError> {
    v.eval(i, f)
}
