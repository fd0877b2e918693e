//! Exact verification of d-orthogonality.
//!
//! Two independent views of the same property are checked here:
//!
//! * the recurrence `x P_n = Σ_{k=0}^{d+1} α_{k,d}(n) P_{n-d+k}` with
//!   `α_{d+1,d}(n) α_{0,d}(n) != 0` for `n >= d`, obtained by expanding
//!   `x P_n` in the basis `P_0..P_{n+1}`;
//! * the orthogonality relations `<u_k, P_n P_m> = 0` for `m > nd + k` and
//!   `<u_k, P_n P_{nd+k}> != 0`, evaluated with the functional vector.
//!
//! Every zero test is exact. Reports keep the offending values, not just flags.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{format_rat, serde_rat, Rat};
use crate::operators::{apply_lowering, FunctionalVector, LoweringOp, OperatorError};
use crate::poly::Poly;
use crate::sheffer::PolySequence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DorthError {
    #[error("need P_0..P_{needed} for d = {d}, have only up to P_{have}")]
    SequenceTooShort {
        d: usize,
        needed: usize,
        have: usize,
    },
    #[error("P_{n} has degree {found:?}, expected {n}")]
    DegreeMismatch { n: usize, found: Option<usize> },
    #[error("window violation: {}", describe_window(.0))]
    WindowViolation(Vec<WindowViolation>),
    #[error("regularity violation at n = {0:?}")]
    RegularityViolation(Vec<usize>),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

fn describe_window(v: &[WindowViolation]) -> String {
    v.iter()
        .map(|w| {
            format!(
                "x P_{} has coefficient {} on P_{}",
                w.n,
                format_rat(&w.value),
                w.j
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// A nonzero coefficient of `P_j` in `x P_n` with `j < n - d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowViolation {
    pub n: usize,
    pub j: usize,
    #[serde(with = "serde_rat")]
    pub value: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrenceRow {
    pub n: usize,
    /// `α_{k,d}(n)` for `k = 0..=d+1`; entries with `n - d + k < 0` are zero.
    #[serde(with = "serde_rat::vec")]
    pub coeffs: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrenceTable {
    pub d: usize,
    pub rows: Vec<RecurrenceRow>,
}

impl RecurrenceTable {
    /// `α_{k,d}(n)`
    pub fn alpha(&self, k: usize, n: usize) -> &Rat {
        &self.rows[n].coeffs[k]
    }
}

/// Everything the recurrence analysis found, whether or not it passed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrenceAnalysis {
    pub table: RecurrenceTable,
    pub window_violations: Vec<WindowViolation>,
    pub regularity_violations: Vec<usize>,
}

impl RecurrenceAnalysis {
    pub fn pass(&self) -> bool {
        self.window_violations.is_empty() && self.regularity_violations.is_empty()
    }
}

/// Coordinates of `f` in the basis `P_0..P_top`, by peeling leading terms.
fn triangular_coords(seq: &PolySequence, f: &Poly, top: usize) -> Vec<Rat> {
    let mut coords = vec![Rat::zero(); top + 1];
    let mut rest = f.clone();
    for j in (0..=top).rev() {
        let pj = &seq.polys()[j];
        let c = rest.coeff(j) / pj.leading().expect("P_j is nonzero");
        if !c.is_zero() {
            rest = &rest - &pj.scale(&c);
            coords[j] = c;
        }
    }
    debug_assert!(rest.is_zero());
    coords
}

fn check_degrees(seq: &PolySequence) -> Result<(), DorthError> {
    for (n, p) in seq.polys().iter().enumerate() {
        if p.degree() != Some(n) {
            return Err(DorthError::DegreeMismatch {
                n,
                found: p.degree(),
            });
        }
    }
    Ok(())
}

/// Expands `x P_n` for `n = 0..N-1` and records window and regularity findings.
pub fn analyze_recurrence(seq: &PolySequence, d: usize) -> Result<RecurrenceAnalysis, DorthError> {
    let top = seq.max_index();
    if top < d + 2 {
        return Err(DorthError::SequenceTooShort {
            d,
            needed: d + 2,
            have: top,
        });
    }
    check_degrees(seq)?;
    let x = Poly::x();
    let mut rows = Vec::with_capacity(top);
    let mut window_violations = Vec::new();
    let mut regularity_violations = Vec::new();
    for n in 0..top {
        let xp = &x * &seq.polys()[n];
        let coords = triangular_coords(seq, &xp, n + 1);
        let low = n as isize - d as isize;
        for (j, c) in coords.iter().enumerate() {
            if (j as isize) < low && !c.is_zero() {
                window_violations.push(WindowViolation {
                    n,
                    j,
                    value: c.clone(),
                });
            }
        }
        let coeffs: Vec<Rat> = (0..=d + 1)
            .map(|k| {
                let j = low + k as isize;
                if j < 0 {
                    Rat::zero()
                } else {
                    coords[j as usize].clone()
                }
            })
            .collect();
        if n >= d && (coeffs[0].is_zero() || coeffs[d + 1].is_zero()) {
            regularity_violations.push(n);
        }
        rows.push(RecurrenceRow { n, coeffs });
    }
    Ok(RecurrenceAnalysis {
        table: RecurrenceTable { d, rows },
        window_violations,
        regularity_violations,
    })
}

/// The `(d+1)`-order recurrence of a d-orthogonal sequence, or the reason there is none.
pub fn extract_recurrence(seq: &PolySequence, d: usize) -> Result<RecurrenceTable, DorthError> {
    let analysis = analyze_recurrence(seq, d)?;
    if !analysis.window_violations.is_empty() {
        return Err(DorthError::WindowViolation(analysis.window_violations));
    }
    if !analysis.regularity_violations.is_empty() {
        return Err(DorthError::RegularityViolation(
            analysis.regularity_violations,
        ));
    }
    Ok(analysis.table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Requirement {
    MustBeZero,
    MustBeNonzero,
    Unconstrained,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthEntry {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    /// `<u_k, P_n P_m>`
    #[serde(with = "serde_rat")]
    pub value: Rat,
    pub requirement: Requirement,
    pub ok: bool,
}

/// A boundary pair `(n, nd + k)` that lies beyond the available `P_N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Unchecked {
    pub k: usize,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthogonalityReport {
    pub d: usize,
    pub n_max: usize,
    pub entries: Vec<OrthEntry>,
    pub unchecked: Vec<Unchecked>,
    pub pass: bool,
}

impl OrthogonalityReport {
    pub fn failures(&self) -> impl Iterator<Item = &OrthEntry> {
        self.entries.iter().filter(|e| !e.ok)
    }

    pub fn value(&self, k: usize, n: usize, m: usize) -> Option<&Rat> {
        self.entries
            .iter()
            .find(|e| e.k == k && e.n == n && e.m == m)
            .map(|e| &e.value)
    }
}

fn pair_value(moments: &[Rat], f: &Poly) -> Rat {
    f.coeffs()
        .iter()
        .zip(moments)
        .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
}

/// Evaluates `<u_k, P_n P_m>` for all `k < d` and `n, m <= N`.
///
/// The functional vector must reach degree `2N`; the check is exact.
pub fn verify_d_orthogonality(
    seq: &PolySequence,
    v: &FunctionalVector,
) -> Result<OrthogonalityReport, DorthError> {
    let d = v.d();
    let n_max = seq.max_index();
    let moments: Vec<Vec<Rat>> = (0..d)
        .map(|k| v.moments(k, 2 * n_max))
        .collect::<Result<_, _>>()?;
    let mut entries = Vec::new();
    let mut unchecked = Vec::new();
    let products: Vec<Vec<Poly>> = (0..=n_max)
        .map(|n| {
            (0..=n_max)
                .map(|m| &seq.polys()[n] * &seq.polys()[m])
                .collect()
        })
        .collect();
    for (k, mom) in moments.iter().enumerate() {
        for (n, row) in products.iter().enumerate() {
            let boundary = n * d + k;
            if boundary > n_max {
                unchecked.push(Unchecked { k, n, m: boundary });
            }
            for (m, product) in row.iter().enumerate() {
                let value = pair_value(mom, product);
                let requirement = if m > boundary {
                    Requirement::MustBeZero
                } else if m == boundary {
                    Requirement::MustBeNonzero
                } else {
                    Requirement::Unconstrained
                };
                let ok = match requirement {
                    Requirement::MustBeZero => value.is_zero(),
                    Requirement::MustBeNonzero => !value.is_zero(),
                    Requirement::Unconstrained => true,
                };
                entries.push(OrthEntry {
                    k,
                    n,
                    m,
                    value,
                    requirement,
                    ok,
                });
            }
        }
    }
    let pass = entries.iter().all(|e| e.ok);
    Ok(OrthogonalityReport {
        d,
        n_max,
        entries,
        unchecked,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityEntry {
    pub i: usize,
    pub k: usize,
    #[serde(with = "serde_rat")]
    pub value: Rat,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub entries: Vec<DualityEntry>,
    pub pass: bool,
}

/// `<u_i, P_k> = δ_ik` for `i < d`, `k <= N`.
pub fn verify_duality(
    seq: &PolySequence,
    v: &FunctionalVector,
) -> Result<DualityReport, DorthError> {
    let mut entries = Vec::new();
    for i in 0..v.d() {
        let moments = v.moments(i, seq.max_index())?;
        for (k, p) in seq.polys().iter().enumerate() {
            let value = pair_value(&moments, p);
            let expected = if i == k {
                Rat::from_integer(1.into())
            } else {
                Rat::zero()
            };
            entries.push(DualityEntry {
                i,
                k,
                ok: value == expected,
                value,
            });
        }
    }
    let pass = entries.iter().all(|e| e.ok);
    Ok(DualityReport { entries, pass })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoweringEntry {
    pub n: usize,
    /// `σ P_n - n P_{n-1}`, rendered; `"0"` when the identity holds.
    pub residual: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoweringReport {
    pub entries: Vec<LoweringEntry>,
    pub pass: bool,
}

/// `σ P_n = n P_{n-1}` for `0 <= n <= N`.
pub fn verify_lowering(seq: &PolySequence, op: &LoweringOp) -> Result<LoweringReport, DorthError> {
    let mut entries = Vec::new();
    for n in 0..=seq.max_index() {
        let lowered = apply_lowering(op, &seq.polys()[n])?;
        let expected = seq.get(n as isize - 1).scale(&Rat::from_integer(n.into()));
        let residual = &lowered - &expected;
        entries.push(LoweringEntry {
            n,
            ok: residual.is_zero(),
            residual: residual.to_string(),
        });
    }
    let pass = entries.iter().all(|e| e.ok);
    Ok(LoweringReport { entries, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, ratio};
    use crate::series::RatSeries;
    use crate::sheffer::{expand_polynomials, ShefferPair};
    use num_traits::One;

    fn hermite(n: usize) -> (ShefferPair, PolySequence) {
        let a = RatSeries::new(vec![rat(0), rat(0), ratio(-1, 2)], 2 * n)
            .exp()
            .unwrap();
        let p = ShefferPair::new(a, RatSeries::var(2 * n)).unwrap();
        let seq = expand_polynomials(&p, n).unwrap();
        (p, seq)
    }

    fn appell_cubic(n: usize) -> (ShefferPair, PolySequence) {
        let a = RatSeries::from_ints(&[0, 0, 0, 1], 2 * n).exp().unwrap();
        let p = ShefferPair::new(a, RatSeries::var(2 * n)).unwrap();
        let seq = expand_polynomials(&p, n).unwrap();
        (p, seq)
    }

    fn laguerre(n: usize) -> (ShefferPair, PolySequence) {
        let a = RatSeries::from_ints(&[1, -1], 2 * n).invert().unwrap();
        let h = &RatSeries::one(2 * n) - &a;
        let p = ShefferPair::new(a, h).unwrap();
        let seq = expand_polynomials(&p, n).unwrap();
        (p, seq)
    }

    #[test]
    fn hermite_three_term() {
        let (_, seq) = hermite(10);
        let table = extract_recurrence(&seq, 1).unwrap();
        for n in 0..10 {
            assert_eq!(table.alpha(2, n), &rat(1));
            assert_eq!(table.alpha(1, n), &rat(0));
            assert_eq!(table.alpha(0, n), &rat(n as i64));
        }
    }

    #[test]
    fn row_zero_is_degree_one_identity() {
        let (_, seq) = laguerre(6);
        let table = extract_recurrence(&seq, 1).unwrap();
        let p1 = &seq.polys()[1];
        // x P_0 = (1/lc) P_1 - (c0/lc) P_0 with P_1 = lc x + c0; here lc = -1
        let lc = p1.coeff(1);
        assert_eq!(table.alpha(2, 0), &(rat(1) / &lc));
        assert_eq!(table.alpha(1, 0), &(-p1.coeff(0) / &lc));
        assert_eq!(table.alpha(0, 0), &rat(0));
    }

    #[test]
    fn two_orthogonal_appell_needs_width_four() {
        let (_, seq) = appell_cubic(10);
        let table = extract_recurrence(&seq, 2).unwrap();
        assert_eq!(table.rows[0].coeffs.len(), 4);
        match extract_recurrence(&seq, 1) {
            Err(DorthError::WindowViolation(v)) => assert!(!v.is_empty()),
            other => panic!("expected a window violation, got {other:?}"),
        }
    }

    #[test]
    fn too_short() {
        let (_, seq) = hermite(3);
        assert!(matches!(
            extract_recurrence(&seq, 2),
            Err(DorthError::SequenceTooShort { .. })
        ));
    }

    #[test]
    fn laguerre_orthogonality() {
        let (p, seq) = laguerre(8);
        let v = FunctionalVector::for_pair(&p, 1).unwrap();
        let r = verify_d_orthogonality(&seq, &v).unwrap();
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.value(0, 1, 2), Some(&rat(0)));
        assert_ne!(r.value(0, 1, 1), Some(&rat(0)));
        assert_eq!(r.value(0, 0, 0), Some(&rat(1)));
    }

    #[test]
    fn wrong_d_fails_orthogonality() {
        let (p, seq) = appell_cubic(8);
        let good =
            verify_d_orthogonality(&seq, &FunctionalVector::for_pair(&p, 2).unwrap()).unwrap();
        assert!(good.pass);
        let bad =
            verify_d_orthogonality(&seq, &FunctionalVector::for_pair(&p, 1).unwrap()).unwrap();
        assert!(!bad.pass);
    }

    #[test]
    fn boundary_beyond_n_is_unchecked() {
        let (p, seq) = appell_cubic(6);
        let r = verify_d_orthogonality(&seq, &FunctionalVector::for_pair(&p, 2).unwrap()).unwrap();
        assert!(r.unchecked.iter().any(|u| u.k == 1 && u.n == 3 && u.m == 7));
    }

    #[test]
    fn duality_and_lowering() {
        for (p, seq) in [hermite(8), laguerre(8), appell_cubic(8)] {
            let v = FunctionalVector::for_pair(&p, 2).unwrap();
            let dual = verify_duality(&seq, &v).unwrap();
            assert!(dual.pass);
            assert_eq!(dual.entries[0].value, rat(1));
            assert_eq!(dual.entries[3].value, rat(0));
            let low = verify_lowering(&seq, v.lowering()).unwrap();
            assert!(low.pass);
        }
    }

    #[test]
    fn non_sheffer_d_orthogonal_pair_fails_window() {
        // H = t + t^3 is not generated by any couple with d = 1
        let n = 10;
        let p =
            ShefferPair::new(RatSeries::one(n), RatSeries::from_ints(&[0, 1, 0, 1], n)).unwrap();
        let seq = expand_polynomials(&p, n).unwrap();
        assert!(matches!(
            extract_recurrence(&seq, 1),
            Err(DorthError::WindowViolation(_))
        ));
    }

    #[test]
    fn degree_mismatch() {
        let seq = PolySequence::new(vec![
            Poly::one(),
            Poly::one(),
            Poly::x(),
            Poly::x(),
            Poly::x(),
        ]);
        assert!(matches!(
            analyze_recurrence(&seq, 1),
            Err(DorthError::DegreeMismatch { n: 1, .. })
        ));
    }
}
