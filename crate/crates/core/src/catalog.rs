//! The eight application families, their couples, closed-form generating
//! functions, and the explicit functionals known for some of them.
//!
//! | id            | generating function                                          | σ kind |
//! |---------------|--------------------------------------------------------------|--------|
//! | laguerre-eq9  | `(1-t)^{-(α+1)d} exp(-x[(1-t)^{-d} - 1])`                    | D      |
//! | laguerre-eq10 | `e^{π_{d-1}} (1-t)^{-α-1} exp(-xt/(1-t))`                    | D      |
//! | laguerre-eq11 | `e^{π_{d-2}} (1-t)^{-α-1} exp(x (t²-2t)/(2(1-t)²))`, d ≥ 2   | D      |
//! | hermite-eq12  | `e^{π_{d+1}} e^{xt}`                                          | D      |
//! | charlier-eq13 | `e^{π_d} (1+ωt)^{x/ω}`                                        | Δ_ω    |
//! | meixner-eq14  | `e^{π_{d-1}} (1-t)^{-β} (1 + (c-1)/c · t/(1-t))^x`           | Δ      |
//! | meixner-eq16  | `(1-t)^{-βd} (1 + (c-1)/(dc) [(1-t)^{-d} - 1])^x`            | Δ      |
//! | meixner-eq21  | `e^{π_{d-2}} (1-t)^{-β} (1 + (c-1)/(2c) (t²-2t)/(1-t)²)^x`   | Δ      |
//!
//! The constant term `a_0` of an auxiliary polynomial `π` only rescales every
//! `P_n` by `e^{a_0}`; the generating functions here use `e^{π(t) - a_0}` so that
//! `A(0) = 1` and everything stays rational.

use std::collections::BTreeMap;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactnum::{
    binomial_rat, factorial_rat, format_rat, pochhammer, pow_usize, rat, ratio, stirling2_rat, Rat,
};
use crate::operators::{BaseOp, FunctionalVector, LoweringOp, OperatorError};
use crate::poly::Poly;
use crate::series::RatSeries;
use crate::sheffer::{CoupleSpec, ShefferError, ShefferPair};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("family {family} has no parameter {name:?}")]
    UnknownParam { family: &'static str, name: String },
    #[error("invalid parameters: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("functional index {index} out of range (d = {d})")]
    IndexOutOfRange { index: usize, d: usize },
    #[error("divergent parameters: {0}")]
    Divergent(String),
    #[error("numeric series did not converge within {0} terms")]
    NotConverged(usize),
    #[error(transparent)]
    Sheffer(#[from] ShefferError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Series(#[from] crate::series::SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyId {
    LaguerreEq9,
    LaguerreEq10,
    LaguerreEq11,
    HermiteEq12,
    CharlierEq13,
    MeixnerEq14,
    MeixnerEq16,
    MeixnerEq21,
}

impl FamilyId {
    pub const ALL: [FamilyId; 8] = [
        FamilyId::LaguerreEq9,
        FamilyId::LaguerreEq10,
        FamilyId::LaguerreEq11,
        FamilyId::HermiteEq12,
        FamilyId::CharlierEq13,
        FamilyId::MeixnerEq14,
        FamilyId::MeixnerEq16,
        FamilyId::MeixnerEq21,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::LaguerreEq9 => "laguerre-eq9",
            FamilyId::LaguerreEq10 => "laguerre-eq10",
            FamilyId::LaguerreEq11 => "laguerre-eq11",
            FamilyId::HermiteEq12 => "hermite-eq12",
            FamilyId::CharlierEq13 => "charlier-eq13",
            FamilyId::MeixnerEq14 => "meixner-eq14",
            FamilyId::MeixnerEq16 => "meixner-eq16",
            FamilyId::MeixnerEq21 => "meixner-eq21",
        }
    }

    pub fn from_name(s: &str) -> Result<Self, CatalogError> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CatalogError::UnknownFamily(s.to_string()))
    }

    pub fn description(self) -> &'static str {
        match self {
            FamilyId::LaguerreEq9 => "Laguerre type, couple [-(α+1)(1-t)^d, (-1/d)(1-t)^(d+1)]",
            FamilyId::LaguerreEq10 => "Laguerre type with e^π_{d-1}, σ = -(1-t)^2",
            FamilyId::LaguerreEq11 => {
                "Laguerre type with e^π_{d-2}, σ = -(1-t)^3 (2-orthogonal at d = 2)"
            }
            FamilyId::HermiteEq12 => "Appell type, couple [π'_{d+1}, 1]",
            FamilyId::CharlierEq13 => "Charlier type, couple [(1+ωt)π'_d, 1+ωt]",
            FamilyId::MeixnerEq14 => "Meixner type with e^π_{d-1}, σ = (c-t)(1-t)/(c-1)",
            FamilyId::MeixnerEq16 => "Meixner type, explicit functional vector",
            FamilyId::MeixnerEq21 => "Meixner type with e^π_{d-2}, σ of degree 3",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FamilyId::LaguerreEq9 | FamilyId::LaguerreEq10 | FamilyId::LaguerreEq11 => &["alpha"],
            FamilyId::HermiteEq12 => &[],
            FamilyId::CharlierEq13 => &["omega"],
            FamilyId::MeixnerEq14 | FamilyId::MeixnerEq16 | FamilyId::MeixnerEq21 => &["beta", "c"],
        }
    }

    pub fn min_d(self) -> usize {
        match self {
            FamilyId::LaguerreEq11 | FamilyId::MeixnerEq21 => 2,
            _ => 1,
        }
    }

    /// Length `deg π + 1` of the auxiliary polynomial, if the family has one.
    pub fn aux_len(self, d: usize) -> Option<usize> {
        match self {
            FamilyId::LaguerreEq10 | FamilyId::MeixnerEq14 => Some(d),
            FamilyId::LaguerreEq11 | FamilyId::MeixnerEq21 => Some(d.saturating_sub(1)),
            FamilyId::HermiteEq12 => Some(d + 2),
            FamilyId::CharlierEq13 => Some(d + 1),
            FamilyId::LaguerreEq9 | FamilyId::MeixnerEq16 => None,
        }
    }

    /// Whether the lowering operator is a difference operator.
    pub fn is_discrete(self) -> bool {
        matches!(
            self,
            FamilyId::CharlierEq13
                | FamilyId::MeixnerEq14
                | FamilyId::MeixnerEq16
                | FamilyId::MeixnerEq21
        )
    }

    fn default_param(name: &str) -> Rat {
        match name {
            "alpha" => ratio(1, 2),
            "beta" => rat(1),
            "c" => ratio(1, 2),
            _ => rat(1),
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A family together with `d`, its named parameters and auxiliary coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: FamilyId,
    pub d: usize,
    params: BTreeMap<&'static str, Rat>,
    aux: Vec<Rat>,
}

impl FamilySpec {
    /// Default sample: α = 1/2, (c, β) = (1/2, 1), ω = 1, all `π` coefficients 1.
    pub fn new(family: FamilyId, d: usize) -> Self {
        let params = family
            .param_names()
            .iter()
            .map(|&n| (n, FamilyId::default_param(n)))
            .collect();
        let aux = vec![rat(1); family.aux_len(d).unwrap_or(0)];
        FamilySpec {
            family,
            d,
            params,
            aux,
        }
    }

    pub fn set_param(&mut self, name: &str, value: Rat) -> Result<(), CatalogError> {
        let key = self
            .family
            .param_names()
            .iter()
            .find(|&&n| n == name)
            .ok_or_else(|| CatalogError::UnknownParam {
                family: self.family.name(),
                name: name.to_string(),
            })?;
        self.params.insert(key, value);
        Ok(())
    }

    pub fn with_param(mut self, name: &str, value: Rat) -> Result<Self, CatalogError> {
        self.set_param(name, value)?;
        Ok(self)
    }

    pub fn with_aux(mut self, aux: Vec<Rat>) -> Self {
        self.aux = aux;
        self
    }

    pub fn param(&self, name: &str) -> &Rat {
        &self.params[name]
    }

    pub fn params(&self) -> impl Iterator<Item = (&'static str, &Rat)> {
        self.params.iter().map(|(k, v)| (*k, v))
    }

    pub fn aux(&self) -> &[Rat] {
        &self.aux
    }

    fn pi(&self) -> Poly {
        Poly::new(self.aux.clone())
    }

    /// The default parameter samples used by the test suites, over `d = 1, 2, 3`.
    pub fn default_samples() -> Vec<FamilySpec> {
        let mut out = Vec::new();
        for family in FamilyId::ALL {
            for d in family.min_d()..=3 {
                out.push(FamilySpec::new(family, d));
            }
        }
        out
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} d={}", self.family, self.d)?;
        for (k, v) in &self.params {
            write!(f, " {k}={}", format_rat(v))?;
        }
        if !self.aux.is_empty() {
            let aux: Vec<String> = self.aux.iter().map(format_rat).collect();
            write!(f, " aux=[{}]", aux.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<(), CatalogError> {
        if self.ok() {
            Ok(())
        } else {
            Err(CatalogError::Invalid(self.violations))
        }
    }
}

/// `Some(n)` when `x = -n/d` for an integer `n >= min_n`.
fn negative_multiple(x: &Rat, d: usize, min_n: i64) -> Option<i64> {
    let n = -(x * rat(d as i64));
    if n.is_integer() {
        let n: i64 = n.to_integer().try_into().ok()?;
        (n >= min_n).then_some(n)
    } else {
        None
    }
}

/// Checks the restrictions each family places on its parameters.
pub fn validate_params(fs: &FamilySpec) -> ValidationReport {
    let mut v = Vec::new();
    let d = fs.d;
    let fam = fs.family;
    if d < fam.min_d() {
        v.push(format!("d ≥ {} (got d = {d})", fam.min_d()));
        return ValidationReport { violations: v };
    }
    if let Some(len) = fam.aux_len(d) {
        if fs.aux.len() != len {
            v.push(format!(
                "auxiliary polynomial needs {len} coefficients a_0..a_{}, got {}",
                len - 1,
                fs.aux.len()
            ));
        } else if fs.aux[len - 1].is_zero() {
            v.push(format!("a_{} ≠ 0", len - 1));
        }
    }
    let alpha = fs.params.get("alpha");
    let beta = fs.params.get("beta");
    let c = fs.params.get("c");
    match fam {
        FamilyId::LaguerreEq9 => {
            let a1 = alpha.unwrap() + rat(1);
            if a1.is_zero() {
                v.push("α ≠ −1".into());
            } else if let Some(n) = negative_multiple(&a1, d, 1) {
                v.push(format!("n/d + α + 1 ≠ 0 (fails at n = {n})"));
            }
        }
        FamilyId::LaguerreEq10 => {
            if d == 1 {
                if let Some(n) = negative_multiple(&(alpha.unwrap() + rat(1)), 1, 0) {
                    v.push(format!("α + n + 1 ≠ 0 for d = 1 (fails at n = {n})"));
                }
            }
        }
        FamilyId::LaguerreEq11 => {
            if d == 2 {
                if let Some(n) = negative_multiple(&(alpha.unwrap() + rat(1)), 1, 0) {
                    v.push(format!("α + n + 1 ≠ 0, n ≥ 0 (fails at n = {n})"));
                }
            }
        }
        FamilyId::HermiteEq12 => {}
        FamilyId::CharlierEq13 => {
            if fs.params["omega"].is_zero() {
                v.push("ω ≠ 0".into());
            }
        }
        FamilyId::MeixnerEq14 => {
            let c = c.unwrap();
            if c.is_zero() || c.is_one() {
                v.push("c ∉ {0, 1}".into());
            }
            if d == 1 {
                if let Some(n) = negative_multiple(beta.unwrap(), 1, 0) {
                    v.push(format!("β ≠ −n, n ≥ 0 for d = 1 (fails at n = {n})"));
                }
            }
        }
        FamilyId::MeixnerEq16 => {
            let c = c.unwrap();
            let excluded = c.is_zero()
                || c.is_one()
                || (d > 1 && *c == Rat::new(1.into(), (1 - d as i64).into()));
            if excluded {
                v.push("c ∉ {0, 1/(1−d), 1}".into());
            }
            if let Some(n) = negative_multiple(beta.unwrap(), d, 0) {
                v.push(format!("β ≠ −n/d, n ≥ 0 (fails at n = {n})"));
            }
        }
        FamilyId::MeixnerEq21 => {
            let c = c.unwrap();
            if c.is_zero() || c.is_one() || *c == ratio(1, 3) {
                v.push("c ∉ {0, 1/3, 1}".into());
            }
            if d == 2 {
                if let Some(n) = negative_multiple(beta.unwrap(), 1, 0) {
                    v.push(format!("β ≠ −n, n ≥ 0 for d = 2 (fails at n = {n})"));
                }
            }
        }
    }
    ValidationReport { violations: v }
}

/// `(1 - t)^k` as a polynomial in `t`.
fn one_minus_t_pow(k: usize) -> Poly {
    let base = Poly::from_ints(&[1, -1]);
    (0..k).fold(Poly::one(), |acc, _| &acc * &base)
}

fn cp(r: Rat) -> Poly {
    Poly::constant(r)
}

/// The couple `[gamma_d, sigma_{d+1}]` of the family, expanded into coefficients.
pub fn family_couple(fs: &FamilySpec) -> Result<CoupleSpec, CatalogError> {
    validate_params(fs).into_result()?;
    let d = fs.d;
    let one = rat(1);
    let (gamma, sigma) = match fs.family {
        FamilyId::LaguerreEq9 => {
            let a1 = fs.param("alpha") + &one;
            (
                one_minus_t_pow(d).scale(&-a1),
                one_minus_t_pow(d + 1).scale(&ratio(-1, d as i64)),
            )
        }
        FamilyId::LaguerreEq10 => {
            let a1 = fs.param("alpha") + &one;
            let sq = one_minus_t_pow(2);
            let gamma = -(&sq * &fs.pi().derivative()) - one_minus_t_pow(1).scale(&a1);
            (gamma, -sq)
        }
        FamilyId::LaguerreEq11 => {
            let a1 = fs.param("alpha") + &one;
            let cube = one_minus_t_pow(3);
            let gamma = -(&cube * &fs.pi().derivative()) - one_minus_t_pow(2).scale(&a1);
            (gamma, -cube)
        }
        FamilyId::HermiteEq12 => (fs.pi().derivative(), Poly::one()),
        FamilyId::CharlierEq13 => {
            let lin = Poly::new(vec![one.clone(), fs.param("omega").clone()]);
            (&lin * &fs.pi().derivative(), lin)
        }
        FamilyId::MeixnerEq14 => {
            let c = fs.param("c");
            let beta = fs.param("beta");
            let inv = (c - &one).recip();
            let c_minus_t = Poly::new(vec![c.clone(), -one.clone()]);
            let sigma = (&c_minus_t * &one_minus_t_pow(1)).scale(&inv);
            let gamma = &sigma * &fs.pi().derivative() + c_minus_t.scale(&(beta * &inv));
            (gamma, sigma)
        }
        FamilyId::MeixnerEq16 => {
            let c = fs.param("c");
            let beta = fs.param("beta");
            let dr = rat(d as i64);
            let k = (c - &one) / (&dr * c);
            let omd = one_minus_t_pow(d);
            let bracket = &omd + &(cp(one.clone()) - omd.clone()).scale(&k);
            let gamma = bracket.scale(&(&dr * c * beta / (c - &one)));
            let sigma = (&one_minus_t_pow(1) * &bracket).scale(&(c / (c - &one)));
            (gamma, sigma)
        }
        FamilyId::MeixnerEq21 => {
            let c = fs.param("c");
            let beta = fs.param("beta");
            let k = (c - &one) / (rat(2) * c);
            let sq = one_minus_t_pow(2);
            let bracket = &sq + &(sq.clone() - cp(one.clone())).scale(&k);
            let lead = -(c / (c - &one));
            let sigma = (&one_minus_t_pow(1) * &bracket).scale(&lead);
            let gamma = &sigma * &fs.pi().derivative() + bracket.scale(&(&lead * beta));
            (gamma, sigma)
        }
    };
    Ok(CoupleSpec::new(
        d,
        gamma.into_coeffs(),
        sigma.into_coeffs(),
    )?)
}

/// `(1 - t)^r` at order `n`.
fn one_minus_t_series(r: &Rat, n: usize) -> Result<RatSeries, CatalogError> {
    Ok(RatSeries::from_ints(&[1, -1], n).pow_rat(r)?)
}

/// `exp(π(t) - π(0))` at order `n`.
fn exp_pi(fs: &FamilySpec, n: usize) -> Result<RatSeries, CatalogError> {
    let mut c = fs.aux.clone();
    if let Some(first) = c.first_mut() {
        *first = Rat::zero();
    }
    Ok(RatSeries::new(c, n).exp()?)
}

/// `(t² - 2t) / (1 - t)²` at order `n`.
fn quadratic_ratio(n: usize) -> Result<RatSeries, CatalogError> {
    Ok(&RatSeries::from_ints(&[0, -2, 1], n) * &one_minus_t_series(&rat(-2), n)?)
}

/// Builds `(A, H)` straight from the closed-form generating function.
pub fn family_generating(fs: &FamilySpec, n: usize) -> Result<ShefferPair, CatalogError> {
    validate_params(fs).into_result()?;
    let d = fs.d;
    let dr = rat(d as i64);
    let one = rat(1);
    let unit = RatSeries::one(n);
    let pair = match fs.family {
        FamilyId::LaguerreEq9 => {
            let a1 = fs.param("alpha") + &one;
            let a = one_minus_t_series(&-(&a1 * &dr), n)?;
            let h = &unit - &one_minus_t_series(&-dr.clone(), n)?;
            ShefferPair::new(a, h)?
        }
        FamilyId::LaguerreEq10 => {
            let a1 = fs.param("alpha") + &one;
            let a = &exp_pi(fs, n)? * &one_minus_t_series(&-a1, n)?;
            // -t/(1-t) = 1 - (1-t)^{-1}
            let h = &unit - &one_minus_t_series(&rat(-1), n)?;
            ShefferPair::new(a, h)?
        }
        FamilyId::LaguerreEq11 => {
            let a1 = fs.param("alpha") + &one;
            let a = &exp_pi(fs, n)? * &one_minus_t_series(&-a1, n)?;
            let h = quadratic_ratio(n)?.scale(&ratio(1, 2));
            ShefferPair::new(a, h)?
        }
        FamilyId::HermiteEq12 => ShefferPair::new(exp_pi(fs, n)?, RatSeries::var(n))?,
        FamilyId::CharlierEq13 => {
            ShefferPair::from_newton(exp_pi(fs, n)?, RatSeries::var(n), fs.param("omega").clone())?
        }
        FamilyId::MeixnerEq14 => {
            let c = fs.param("c");
            let a = &exp_pi(fs, n)? * &one_minus_t_series(&-fs.param("beta").clone(), n)?;
            // t/(1-t) = (1-t)^{-1} - 1
            let h = (&one_minus_t_series(&rat(-1), n)? - &unit).scale(&((c - &one) / c));
            ShefferPair::from_newton(a, h, one)?
        }
        FamilyId::MeixnerEq16 => {
            let c = fs.param("c");
            let a = one_minus_t_series(&-(fs.param("beta") * &dr), n)?;
            let h =
                (&one_minus_t_series(&-dr.clone(), n)? - &unit).scale(&((c - &one) / (&dr * c)));
            ShefferPair::from_newton(a, h, one)?
        }
        FamilyId::MeixnerEq21 => {
            let c = fs.param("c");
            let a = &exp_pi(fs, n)? * &one_minus_t_series(&-fs.param("beta").clone(), n)?;
            let h = quadratic_ratio(n)?.scale(&((c - &one) / (rat(2) * c)));
            ShefferPair::from_newton(a, h, one)?
        }
    };
    Ok(pair)
}

/// Lowering operator of the family in its native kind (`H*(D)` or `H*(Δ_ω)`).
pub fn family_lowering(fs: &FamilySpec, n: usize) -> Result<LoweringOp, CatalogError> {
    Ok(LoweringOp::for_pair(&family_generating(fs, n)?)?)
}

/// Functional vector of the family, able to evaluate polynomials up to degree `n`.
pub fn family_functionals(fs: &FamilySpec, n: usize) -> Result<FunctionalVector, CatalogError> {
    Ok(FunctionalVector::for_pair(
        &family_generating(fs, n)?,
        fs.d,
    )?)
}

pub fn base_op(fs: &FamilySpec) -> BaseOp {
    match fs.family {
        FamilyId::CharlierEq13 => BaseOp::Difference {
            step: fs.param("omega").clone(),
        },
        f if f.is_discrete() => BaseOp::Difference { step: rat(1) },
        _ => BaseOp::Derivative,
    }
}

/// `Σ_m f_m Σ_k S(m, k) (b)_k z^k`: the value of `Σ_k (b)_k z^k Δ^k f(0) / k!`.
fn stirling_transform(f: &Poly, b: &Rat, z: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for (m, fm) in f.coeffs().iter().enumerate() {
        if fm.is_zero() {
            continue;
        }
        let inner = (0..=m).fold(Rat::zero(), |s, k| {
            s + stirling2_rat(m, k) * pochhammer(b, k) * pow_usize(z, k)
        });
        acc += fm * inner;
    }
    acc
}

/// `<u_i, f>` for the 2-orthogonal set with `A = (1-t)^{-α-1}`, `H = (t²-2t)/(2(1-t)²)`:
///
/// `<u_0, f> = Σ_k ((α+1)/2)_k 2^k f^{(k)}(0)/k!`, and `u_1` is the `r = 0, 1`
/// alternating sum of the same expression with `α` shifted by `r`.
pub fn laguerre2_functionals(alpha: &Rat, i: usize, f: &Poly) -> Result<Rat, CatalogError> {
    if (alpha + rat(1)).is_zero() {
        return Err(CatalogError::Invalid(vec!["α ≠ −1".into()]));
    }
    if i > 1 {
        return Err(CatalogError::IndexOutOfRange { index: i, d: 2 });
    }
    let two = rat(2);
    let branch = |r: i64| {
        let b = (alpha + rat(r + 1)) / &two;
        f.coeffs()
            .iter()
            .enumerate()
            .fold(Rat::zero(), |acc, (k, fk)| {
                acc + pochhammer(&b, k) * pow_usize(&two, k) * fk
            })
    };
    Ok((0..=i as i64)
        .map(|r| {
            let sign = if r % 2 == 0 { rat(1) } else { rat(-1) };
            binomial_rat(i, r as usize) * sign * branch(r)
        })
        .fold(Rat::zero(), |a, b| a + b))
}

struct MeixnerData {
    d: usize,
    beta: Rat,
    /// `dc / (1 - c)`
    z: Rat,
    /// `1 - dc/(c - 1)`
    q: Rat,
}

fn meixner_data(d: usize, c: &Rat, beta: &Rat, r: usize) -> Result<MeixnerData, CatalogError> {
    let fs = FamilySpec::new(FamilyId::MeixnerEq16, d)
        .with_param("c", c.clone())?
        .with_param("beta", beta.clone())?;
    validate_params(&fs).into_result()?;
    if r >= d {
        return Err(CatalogError::IndexOutOfRange { index: r, d });
    }
    let dr = rat(d as i64);
    let one = rat(1);
    let w = &dr * c / (&one + c * (&dr - &one));
    if w.abs() >= one {
        return Err(CatalogError::Divergent(format!(
            "|dc/(1 + c(d-1))| = {} ≥ 1",
            format_rat(&w.abs())
        )));
    }
    Ok(MeixnerData {
        d,
        beta: beta.clone(),
        z: &dr * c / (&one - c),
        q: &one - &dr * c / (c - &one),
    })
}

/// Closed form of the Meixner-type functional vector on polynomials.
///
/// Writing `f(j) = Σ_m f_m Σ_k S(m,k) j(j-1)...(j-k+1)` turns each `j`-sum into
/// `(1-w)^{-b-k} w^k (b)_k`, and `(1 - dc/(c-1)) (1 - w) = 1` with
/// `w = dc/(1 + c(d-1))` collapses the prefactor, leaving
/// `(1/r!) Σ_i C(r,i) (-1)^i Σ_k S(m,k) (β + i/d)_k (w/(1-w))^k`.
pub fn meixner_functionals_eq19(
    d: usize,
    c: &Rat,
    beta: &Rat,
    r: usize,
    f: &Poly,
) -> Result<Rat, CatalogError> {
    let md = meixner_data(d, c, beta, r)?;
    let mut acc = Rat::zero();
    for i in 0..=r {
        let b = &md.beta + ratio(i as i64, md.d as i64);
        let sign = if i % 2 == 0 { rat(1) } else { rat(-1) };
        acc += binomial_rat(r, i) * sign * stirling_transform(f, &b, &md.z);
    }
    Ok(acc / factorial_rat(r))
}

const NUMERIC_PRECISION: usize = 384;
const NUMERIC_MAX_TERMS: usize = 20_000;

/// High-precision partial sum with a rigorous bound on the neglected tail.
#[derive(Debug, Clone)]
pub struct NumericValue {
    pub value: BigFloat,
    pub tail_bound: BigFloat,
    pub terms: usize,
}

fn rm() -> RoundingMode {
    RoundingMode::ToEven
}

fn bf_from_rat(r: &Rat, cc: &mut Consts) -> BigFloat {
    let p = NUMERIC_PRECISION;
    let num = BigFloat::parse(&r.numer().to_string(), Radix::Dec, p, rm(), cc);
    let den = BigFloat::parse(&r.denom().to_string(), Radix::Dec, p, rm(), cc);
    num.div(&den, p, rm())
}

fn bf_to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap_or(f64::NAN)
}

impl NumericValue {
    pub fn to_f64(&self) -> f64 {
        bf_to_f64(&self.value)
    }

    /// `|value - exact| / |exact|`, or the absolute error when `exact = 0`.
    pub fn relative_error(&self, exact: &Rat) -> f64 {
        let mut cc = Consts::new().expect("astro-float constants");
        let e = bf_from_rat(exact, &mut cc);
        let diff = self.value.sub(&e, NUMERIC_PRECISION, rm()).abs();
        if exact.is_zero() {
            bf_to_f64(&diff)
        } else {
            bf_to_f64(&diff.div(&e.abs(), NUMERIC_PRECISION, rm()))
        }
    }
}

fn horner(coeffs: &[BigFloat], x: &BigFloat) -> BigFloat {
    let p = NUMERIC_PRECISION;
    coeffs
        .iter()
        .rev()
        .fold(BigFloat::from_u64(0, p), |acc, c| {
            acc.mul(x, p, rm()).add(c, p, rm())
        })
}

/// Direct summation of the Meixner-type functional as an infinite series in `j`,
/// `Σ_j (b)_j z^j / ((1 + z)^{b+j} j!) f(j)`, in 384-bit floating point.
pub fn meixner_functionals_eq19_numeric(
    d: usize,
    c: &Rat,
    beta: &Rat,
    r: usize,
    f: &Poly,
) -> Result<NumericValue, CatalogError> {
    let md = meixner_data(d, c, beta, r)?;
    let p = NUMERIC_PRECISION;
    let mut cc = Consts::new().expect("astro-float constants");
    let z = bf_from_rat(&md.z, &mut cc);
    let q = bf_from_rat(&md.q, &mut cc);
    let ratio_zq = z.div(&q, p, rm());
    let w_abs = crate::exactnum::to_f64(&(&md.z / &md.q)).abs();
    let deg = f.degree().unwrap_or(0) as i32;
    let tol = BigFloat::from_f64(1e-60, p);
    let f_bf: Vec<BigFloat> = f.coeffs().iter().map(|c| bf_from_rat(c, &mut cc)).collect();
    let f_abs: Vec<BigFloat> = f_bf.iter().map(|c| c.abs()).collect();

    let mut total = BigFloat::from_u64(0, p);
    let mut total_tail = BigFloat::from_u64(0, p);
    let mut max_terms = 0;
    for i in 0..=r {
        let b = &md.beta + ratio(i as i64, md.d as i64);
        let b_bf = bf_from_rat(&b, &mut cc);
        // c_0 = q^{-b}
        let mut coef = q.pow(&b_bf.neg(), p, rm(), &mut cc);
        let mut sum = BigFloat::from_u64(0, p);
        let b_f = crate::exactnum::to_f64(&b);
        let mut tail = None;
        for j in 0..NUMERIC_MAX_TERMS {
            let j_bf = BigFloat::from_u64(j as u64, p);
            let fj = horner(&f_bf, &j_bf);
            sum = sum.add(&coef.mul(&fj, p, rm()), p, rm());
            if j >= 1 && (j as f64) > b_f.abs() {
                let jf = j as f64;
                let growth = ((jf + 1.0) / jf).powi(deg);
                let rho = w_abs * f64::max(1.0, (b_f + jf) / (jf + 1.0)) * growth * (1.0 + 1e-9);
                if rho < 1.0 {
                    let mag = coef.abs().mul(&horner(&f_abs, &j_bf), p, rm());
                    let factor = BigFloat::from_f64(rho / (1.0 - rho), p);
                    let bound = mag.mul(&factor, p, rm());
                    let scale = sum.abs().max(&BigFloat::from_u64(1, p));
                    if bound.cmp(&scale.mul(&tol, p, rm())).is_some_and(|o| o < 0) {
                        tail = Some((bound, j + 1));
                        break;
                    }
                }
            }
            // c_{j+1} = c_j (b + j) z / ((j + 1) q)
            let step = b_bf
                .add(&j_bf, p, rm())
                .div(&BigFloat::from_u64(j as u64 + 1, p), p, rm());
            coef = coef.mul(&step, p, rm()).mul(&ratio_zq, p, rm());
        }
        let (bound, terms) = tail.ok_or(CatalogError::NotConverged(NUMERIC_MAX_TERMS))?;
        max_terms = max_terms.max(terms);
        let weight = bf_from_rat(&binomial_rat(r, i), &mut cc);
        let signed = if i % 2 == 0 { sum } else { sum.neg() };
        total = total.add(&signed.mul(&weight, p, rm()), p, rm());
        total_tail = total_tail.add(&bound.mul(&weight, p, rm()), p, rm());
    }
    let inv_fact = bf_from_rat(&factorial_rat(r).recip(), &mut cc);
    Ok(NumericValue {
        value: total.mul(&inv_fact, p, rm()),
        tail_bound: total_tail.mul(&inv_fact, p, rm()),
        terms: max_terms,
    })
}

/// `<u_0, f> = (1-c)^β Σ_j (β)_j c^j f(j) / j!` for `0 < c < 1`, evaluated in
/// closed form as `Σ_m f_m Σ_k S(m,k) (β)_k (c/(1-c))^k`.
pub fn meixner_classical_functional(c: &Rat, beta: &Rat, f: &Poly) -> Result<Rat, CatalogError> {
    if !(c.is_positive() && *c < rat(1)) {
        return Err(CatalogError::Divergent(format!(
            "c = {} outside (0, 1)",
            format_rat(c)
        )));
    }
    let z = c / (rat(1) - c);
    Ok(stirling_transform(f, beta, &z))
}
