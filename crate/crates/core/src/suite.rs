//! Runs every check on one family sample or couple and assembles a JSON report.
//!
//! The report has six sections, `conditions`, `two_path`, `recurrence`,
//! `duality`, `orthogonality` and `lowering`, each `{status, details}`. Keys are
//! emitted sorted and rationals in canonical `p/q` form, so equal inputs give
//! byte-identical output.

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::catalog::{family_couple, family_generating, CatalogError, FamilySpec};
use crate::dorth::{
    analyze_recurrence, verify_d_orthogonality, verify_duality, verify_lowering, DorthError,
    Requirement,
};
use crate::operators::{FunctionalVector, LoweringOp, OperatorError};
use crate::sheffer::{
    check_conditions, expand_polynomials, pair_from_couple, CoupleSpec, ShefferError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Sheffer(#[from] ShefferError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Dorth(#[from] DorthError),
}

#[derive(Debug, Clone)]
pub enum Source {
    Family(FamilySpec),
    Couple(CoupleSpec),
}

impl Source {
    pub fn d(&self) -> usize {
        match self {
            Source::Family(fs) => fs.d,
            Source::Couple(c) => c.d(),
        }
    }

    pub fn couple(&self) -> Result<CoupleSpec, SuiteError> {
        match self {
            Source::Family(fs) => Ok(family_couple(fs)?),
            Source::Couple(c) => Ok(c.clone()),
        }
    }

    /// The input as recorded at the top of every report.
    pub fn describe(&self) -> Value {
        match self {
            Source::Family(fs) => {
                let params: Map<String, Value> = fs
                    .params()
                    .map(|(k, v)| (k.to_string(), Value::String(crate::exactnum::format_rat(v))))
                    .collect();
                let aux: Vec<String> = fs.aux().iter().map(crate::exactnum::format_rat).collect();
                json!({ "family": fs.family.name(), "d": fs.d, "params": params, "aux": aux })
            }
            Source::Couple(c) => json!({ "couple": c }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub status: Status,
    pub details: Value,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub source: Value,
    pub order: usize,
    pub check_d: usize,
    pub conditions: Section,
    pub two_path: Section,
    pub recurrence: Section,
    pub duality: Section,
    pub orthogonality: Section,
    pub lowering: Section,
}

impl SuiteReport {
    pub fn sections(&self) -> [(&'static str, &Section); 6] {
        [
            ("conditions", &self.conditions),
            ("two_path", &self.two_path),
            ("recurrence", &self.recurrence),
            ("duality", &self.duality),
            ("orthogonality", &self.orthogonality),
            ("lowering", &self.lowering),
        ]
    }

    /// No section failed; skipped sections do not count against the run.
    pub fn pass(&self) -> bool {
        self.sections()
            .iter()
            .all(|(_, s)| s.status != Status::Fail)
    }

    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        for (name, s) in self.sections() {
            root.insert(
                name.to_string(),
                serde_json::to_value(s).expect("section serializes"),
            );
        }
        root.insert("input".into(), self.source.clone());
        root.insert("order".into(), json!(self.order));
        root.insert("check_d".into(), json!(self.check_d));
        root.insert("pass".into(), json!(self.pass()));
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serializes");
        s.push('\n');
        s
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

/// Runs the whole suite on `P_0..P_N`, checking d-orthogonality against
/// `check_d` (the source's own `d` when `None`).
pub fn run_suite(
    source: &Source,
    order: usize,
    check_d: Option<usize>,
) -> Result<SuiteReport, SuiteError> {
    let d = check_d.unwrap_or_else(|| source.d());
    let couple = source.couple()?;
    // functionals on P_n P_m need the series up to degree 2N
    let series_order = 2 * order + 1;

    let cond = check_conditions(&couple, order);
    let conditions = Section {
        status: Status::from_bool(cond.pass),
        details: json!({
            "alpha0_nonzero": cond.alpha0_nonzero,
            "beta_d_nonzero": cond.beta_d_nonzero,
            "failing_n": cond.failing_n(),
            "checked_up_to": order,
        }),
    };

    let from_couple = pair_from_couple(&couple, series_order)?;
    let (pair, two_path) = match source {
        Source::Family(fs) => {
            let direct = family_generating(fs, series_order)?;
            let a = expand_polynomials(&direct, order)?;
            let b = expand_polynomials(&from_couple, order)?;
            let mismatches: Vec<usize> = (0..=order)
                .filter(|&n| a.polys()[n] != b.polys()[n])
                .collect();
            let section = Section {
                status: Status::from_bool(mismatches.is_empty()),
                details: json!({ "compared_up_to": order, "mismatches": mismatches }),
            };
            (direct, section)
        }
        Source::Couple(_) => (
            from_couple,
            Section {
                status: Status::Skipped,
                details: json!({ "reason": "no closed form for a couple file" }),
            },
        ),
    };

    let seq = expand_polynomials(&pair, order)?;

    let rec = analyze_recurrence(&seq, d)?;
    let recurrence = Section {
        status: Status::from_bool(rec.pass()),
        details: json!({
            "d": d,
            "window_violations": to_value(&rec.window_violations),
            "regularity_violations": rec.regularity_violations,
            "table": to_value(&rec.table.rows),
        }),
    };

    let fv = FunctionalVector::for_pair(&pair, d)?;
    let dual = verify_duality(&seq, &fv)?;
    let duality = Section {
        status: Status::from_bool(dual.pass),
        details: json!({
            "checked": dual.entries.len(),
            "failures": to_value(&dual.entries.iter().filter(|e| !e.ok).collect::<Vec<_>>()),
        }),
    };

    let orth = verify_d_orthogonality(&seq, &fv)?;
    let count = |r: Requirement| orth.entries.iter().filter(|e| e.requirement == r).count();
    let orthogonality = Section {
        status: Status::from_bool(orth.pass),
        details: json!({
            "d": d,
            "n_max": orth.n_max,
            "zero_checked": count(Requirement::MustBeZero),
            "nonzero_checked": count(Requirement::MustBeNonzero),
            "failures": to_value(&orth.failures().collect::<Vec<_>>()),
            "unchecked_boundaries": to_value(&orth.unchecked),
        }),
    };

    let op = LoweringOp::for_pair(&pair)?;
    let low = verify_lowering(&seq, &op)?;
    let lowering = Section {
        status: Status::from_bool(low.pass),
        details: json!({
            "operator": if op.base().is_difference() { "difference" } else { "derivative" },
            "checked_up_to": order,
            "failures": to_value(&low.entries.iter().filter(|e| !e.ok).collect::<Vec<_>>()),
        }),
    };

    Ok(SuiteReport {
        source: source.describe(),
        order,
        check_d: d,
        conditions,
        two_path,
        recurrence,
        duality,
        orthogonality,
        lowering,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::FamilyId;
    use crate::exactnum::{rat, ratio};

    #[test]
    fn meixner16_passes() {
        let fs = FamilySpec::new(FamilyId::MeixnerEq16, 2)
            .with_param("c", ratio(1, 2))
            .unwrap()
            .with_param("beta", rat(1))
            .unwrap();
        let r = run_suite(&Source::Family(fs), 8, None).unwrap();
        assert!(r.pass(), "{}", r.to_json());
        assert_eq!(r.two_path.status, Status::Pass);
    }

    #[test]
    fn two_orthogonal_laguerre_against_d1_fails_window() {
        let fs = FamilySpec::new(FamilyId::LaguerreEq11, 2);
        let r = run_suite(&Source::Family(fs), 8, Some(1)).unwrap();
        assert!(!r.pass());
        assert_eq!(r.recurrence.status, Status::Fail);
        assert!(!r.recurrence.details["window_violations"]
            .as_array()
            .unwrap()
            .is_empty());
    }

    #[test]
    fn couple_violating_conditions_fails() {
        // alpha_2 = 1, beta_1 = 3: n alpha_2 - beta_1 vanishes at n = 3
        let c = CoupleSpec::new(1, vec![rat(0), rat(3)], vec![rat(1), rat(0), rat(1)]).unwrap();
        let r = run_suite(&Source::Couple(c), 8, None).unwrap();
        assert_eq!(r.conditions.status, Status::Fail);
        assert_eq!(r.conditions.details["failing_n"], json!([3]));
        assert_eq!(r.two_path.status, Status::Skipped);
        assert!(!r.pass());
    }

    #[test]
    fn reports_are_deterministic() {
        let fs = FamilySpec::new(FamilyId::CharlierEq13, 2);
        let a = run_suite(&Source::Family(fs.clone()), 6, None)
            .unwrap()
            .to_json();
        let b = run_suite(&Source::Family(fs), 6, None).unwrap().to_json();
        assert_eq!(a, b);
    }
}
