//! Acceptance criteria 1-9. Run with
//! `cargo test -p sheffer-core --test acceptance -- --nocapture` to see one
//! PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sheffer_core::catalog::{
    family_couple, family_functionals, family_generating, family_lowering, laguerre2_functionals,
    meixner_classical_functional, meixner_functionals_eq19, meixner_functionals_eq19_numeric,
    FamilyId, FamilySpec,
};
use sheffer_core::dorth::{
    analyze_recurrence, extract_recurrence, verify_d_orthogonality, verify_duality, verify_lowering,
};
use sheffer_core::exactnum::{pochhammer, pow_usize, rat, ratio, Rat};
use sheffer_core::poly::Poly;
use sheffer_core::series::RatSeries;
use sheffer_core::sheffer::{
    check_conditions, couple_from_pair, expand_polynomials, pair_from_couple, CoupleSpec,
    ShefferPair,
};
use sheffer_core::suite::{run_suite, Source};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_couple(rng: &mut StdRng, n: usize) -> CoupleSpec {
    loop {
        let d = rng.gen_range(1..=4usize);
        let gamma: Vec<Rat> = (0..=d).map(|_| rat(rng.gen_range(-5..=5))).collect();
        let sigma: Vec<Rat> = (0..=d + 1).map(|_| rat(rng.gen_range(-5..=5))).collect();
        let c = CoupleSpec::new(d, gamma, sigma).unwrap();
        if check_conditions(&c, n).pass {
            return c;
        }
    }
}

/// Pairs whose `1/H'` or `A'/(A H')` is not a polynomial of bounded degree.
fn non_polynomial_pairs(n: usize) -> Vec<(&'static str, ShefferPair)> {
    let t = RatSeries::var(n);
    let one = RatSeries::one(n);
    let h_quad = RatSeries::from_ints(&[0, 1, 1], n);
    let h_exp = &t.exp().unwrap() - &one;
    let a_rational = RatSeries::from_ints(&[1, 0, -1], n).invert().unwrap();
    let a_mixed = &t.exp().unwrap() * &RatSeries::from_ints(&[1, 1], n);
    let h_lorentz = &t * &RatSeries::from_ints(&[1, 0, 1], n).invert().unwrap();
    let a_high = RatSeries::new(
        vec![rat(0), rat(0), rat(0), rat(0), rat(0), rat(0), rat(1)],
        n,
    )
    .exp()
    .unwrap();
    vec![
        (
            "H = t + t^2",
            ShefferPair::new(one.clone(), h_quad).unwrap(),
        ),
        ("H = e^t - 1", ShefferPair::new(one.clone(), h_exp).unwrap()),
        (
            "A = 1/(1 - t^2)",
            ShefferPair::new(a_rational, t.clone()).unwrap(),
        ),
        (
            "A = (1 + t) e^t",
            ShefferPair::new(a_mixed, t.clone()).unwrap(),
        ),
        (
            "H = t/(1 + t^2)",
            ShefferPair::new(one.clone(), h_lorentz).unwrap(),
        ),
        (
            "A = exp(t^6) at d = 2",
            ShefferPair::new(a_high, t).unwrap(),
        ),
    ]
}

fn criterion1() -> Outcome {
    let n = 16;
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_d0e7);
    let count = 60;
    for k in 0..count {
        let c = random_couple(&mut rng, n);
        let pair = pair_from_couple(&c, n).map_err(|e| format!("couple {k}: {e}"))?;
        let back = couple_from_pair(&pair, c.d()).map_err(|e| format!("couple {k}: {e}"))?;
        ensure(back == c, || {
            format!("round trip changed couple {k}: {c:?} -> {back:?}")
        })?;
    }
    let rejects = non_polynomial_pairs(n);
    for (name, pair) in &rejects {
        let d = if name.contains("d = 2") { 2 } else { 1 };
        ensure(couple_from_pair(pair, d).is_err(), || {
            format!("{name} was accepted")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{count} round trips, {} rejections, {elapsed:.2?}",
        rejects.len()
    ))
}

fn criterion2() -> Outcome {
    let n = 12;
    let samples = FamilySpec::default_samples();
    for fs in &samples {
        let direct = expand_polynomials(&family_generating(fs, n + 1).unwrap(), n).unwrap();
        let couple = family_couple(fs).unwrap();
        let via = expand_polynomials(&pair_from_couple(&couple, n + 1).unwrap(), n).unwrap();
        ensure(direct == via, || format!("{fs}: expansions differ"))?;
    }
    Ok(format!("{} samples, P_0..P_{n}", samples.len()))
}

fn criterion3() -> Outcome {
    let n = 12;
    let samples = FamilySpec::default_samples();
    for fs in &samples {
        let seq = expand_polynomials(&family_generating(fs, n + 1).unwrap(), n).unwrap();
        let table = extract_recurrence(&seq, fs.d).map_err(|e| format!("{fs}: {e}"))?;
        // the lowest order reached is exactly n - d
        for row in table.rows.iter().filter(|r| r.n >= fs.d) {
            ensure(
                !row.coeffs[0].is_zero() && !row.coeffs[fs.d + 1].is_zero(),
                || format!("{fs}: regularity fails at n = {}", row.n),
            )?;
        }
    }
    let laguerre2 = FamilySpec::new(FamilyId::LaguerreEq11, 2);
    let seq = expand_polynomials(&family_generating(&laguerre2, n + 1).unwrap(), n).unwrap();
    let negative = analyze_recurrence(&seq, 1).unwrap();
    ensure(!negative.window_violations.is_empty(), || {
        "laguerre-laguerre2 passed the d = 1 window".into()
    })?;
    Ok(format!(
        "{} samples; laguerre-laguerre2 at d = 1 has {} window violations",
        samples.len(),
        negative.window_violations.len()
    ))
}

fn criterion4() -> Outcome {
    let samples = FamilySpec::default_samples();
    let mut zeros = 0;
    let mut nonzeros = 0;
    for fs in &samples {
        let fv = family_functionals(fs, 25).unwrap();
        let pair = family_generating(fs, 13).unwrap();
        let seq10 = expand_polynomials(&pair, 10).unwrap();
        let orth = verify_d_orthogonality(&seq10, &fv).unwrap();
        if let Some(bad) = orth.failures().next() {
            return Err(format!(
                "{fs}: <u_{}, P_{} P_{}> = {}",
                bad.k, bad.n, bad.m, bad.value
            ));
        }
        zeros += orth
            .entries
            .iter()
            .filter(|e| e.requirement == sheffer_core::dorth::Requirement::MustBeZero)
            .count();
        nonzeros += orth
            .entries
            .iter()
            .filter(|e| e.requirement == sheffer_core::dorth::Requirement::MustBeNonzero)
            .count();
        let seq12 = expand_polynomials(&pair, 12).unwrap();
        let dual = verify_duality(&seq12, &fv).unwrap();
        ensure(dual.pass, || format!("{fs}: duality fails"))?;
    }
    Ok(format!(
        "{} samples, {zeros} zero and {nonzeros} nonzero relations",
        samples.len()
    ))
}

fn criterion5() -> Outcome {
    for alpha in [ratio(1, 2), rat(0), rat(3)] {
        let fs = FamilySpec::new(FamilyId::LaguerreEq11, 2)
            .with_param("alpha", alpha.clone())
            .unwrap();
        let fv = family_functionals(&fs, 13).unwrap();
        for i in 0..2 {
            for m in 0..=12 {
                let f = Poly::monomial(rat(1), m);
                let closed = laguerre2_functionals(&alpha, i, &f).unwrap();
                let generic = fv.eval(i, &f).unwrap();
                ensure(closed == generic, || {
                    format!("α = {alpha}, i = {i}, m = {m}: {closed} vs {generic}")
                })?;
            }
        }
    }
    for alpha in [ratio(1, 2), rat(0), rat(3), ratio(-7, 3)] {
        let a1 = &alpha + rat(1);
        for k in 0..=20 {
            let lhs = pochhammer(&a1, 2 * k);
            let rhs = pow_usize(&rat(4), k)
                * pochhammer(&(&a1 / rat(2)), k)
                * pochhammer(&((&alpha + rat(2)) / rat(2)), k);
            ensure(lhs == rhs, || {
                format!("duplication fails at α = {alpha}, k = {k}")
            })?;
        }
    }
    Ok("α ∈ {1/2, 0, 3}, m ≤ 12; duplication k ≤ 20".into())
}

fn criterion6() -> Outcome {
    let (c, beta) = (ratio(1, 2), rat(1));
    let fs = FamilySpec::new(FamilyId::MeixnerEq16, 2)
        .with_param("c", c.clone())
        .unwrap()
        .with_param("beta", beta.clone())
        .unwrap();
    let fv = family_functionals(&fs, 9).unwrap();
    let mut worst = 0f64;
    for r in 0..2 {
        for m in 0..=8 {
            let f = Poly::monomial(rat(1), m);
            let exact = meixner_functionals_eq19(2, &c, &beta, r, &f).unwrap();
            let generic = fv.eval(r, &f).unwrap();
            ensure(exact == generic, || {
                format!("r = {r}, m = {m}: {exact} vs {generic}")
            })?;
            let numeric = meixner_functionals_eq19_numeric(2, &c, &beta, r, &f).unwrap();
            let err = numeric.relative_error(&exact);
            ensure(err < 1e-12, || {
                format!("r = {r}, m = {m}: numeric relative error {err:e}")
            })?;
            worst = worst.max(err);
        }
    }
    for (c1, b1) in [(ratio(1, 2), rat(1)), (ratio(1, 5), ratio(7, 2))] {
        for m in 0..=8 {
            let f = Poly::monomial(rat(1), m);
            let a = meixner_functionals_eq19(1, &c1, &b1, 0, &f).unwrap();
            let b = meixner_classical_functional(&c1, &b1, &f).unwrap();
            ensure(a == b, || {
                format!("d = 1 reduction fails at c = {c1}, m = {m}")
            })?;
        }
    }
    Ok(format!(
        "exact on m ≤ 8, numeric worst relative error {worst:.1e}"
    ))
}

fn criterion7() -> Outcome {
    let n = 12;
    let samples = FamilySpec::default_samples();
    let (mut derivative, mut difference) = (0, 0);
    for fs in &samples {
        let seq = expand_polynomials(&family_generating(fs, n + 1).unwrap(), n).unwrap();
        let op = family_lowering(fs, n + 1).unwrap();
        if op.base().is_difference() {
            difference += 1;
        } else {
            derivative += 1;
        }
        ensure(op.base().is_difference() == fs.family.is_discrete(), || {
            format!("{fs}: wrong operator kind")
        })?;
        let report = verify_lowering(&seq, &op).unwrap();
        ensure(report.pass, || format!("{fs}: σP_n ≠ nP_(n-1)"))?;
    }
    let order = 16;
    let laguerre2 = FamilySpec::new(FamilyId::LaguerreEq11, 2);
    let hstar = family_generating(&laguerre2, order)
        .unwrap()
        .hx()
        .reversion()
        .unwrap();
    let closed = &RatSeries::one(order)
        - &RatSeries::from_ints(&[1, -2], order)
            .pow_rat(&ratio(-1, 2))
            .unwrap();
    ensure(hstar == closed, || {
        "reversion differs from 1 - (1-2t)^(-1/2)".into()
    })?;
    Ok(format!("{derivative} derivative-kind, {difference} difference-kind samples; closed σ to order {order}"))
}

fn criterion8() -> Outcome {
    let hermite =
        FamilySpec::new(FamilyId::HermiteEq12, 1).with_aux(vec![rat(0), rat(0), ratio(-1, 2)]);
    let seq = expand_polynomials(&family_generating(&hermite, 14).unwrap(), 13).unwrap();
    for k in 0..=12 {
        let lhs = &Poly::x() * &seq.get(k);
        let rhs = &seq.get(k + 1) + &seq.get(k - 1).scale(&rat(k as i64));
        ensure(lhs == rhs, || {
            format!("Hermite recurrence fails at n = {k}")
        })?;
    }

    let laguerre = FamilySpec::new(FamilyId::LaguerreEq9, 1)
        .with_param("alpha", rat(0))
        .unwrap();
    let pair = family_generating(&laguerre, 8).unwrap();
    ensure(
        pair.a() == &RatSeries::from_ints(&[1, -1], 8).invert().unwrap(),
        || "A ≠ 1/(1-t)".into(),
    )?;
    let fv = family_functionals(&laguerre, 8).unwrap();
    ensure(fv.eval(0, &Poly::x()).unwrap().is_one(), || {
        "Laguerre <u_0, x> ≠ 1".into()
    })?;

    let charlier = FamilySpec::new(FamilyId::CharlierEq13, 1).with_aux(vec![rat(0), rat(-1)]);
    let seq = expand_polynomials(&family_generating(&charlier, 4).unwrap(), 3).unwrap();
    ensure(seq.get(1) == Poly::from_ints(&[-1, 1]), || {
        format!("Charlier P_1 = {}", seq.get(1))
    })?;

    // Σ_j j^m / 2^(j+1), summed directly, against the closed form
    let (c, beta) = (ratio(1, 2), rat(1));
    let mut values = Vec::new();
    for m in 0..=4usize {
        let exact = meixner_classical_functional(&c, &beta, &Poly::monomial(rat(1), m)).unwrap();
        let partial = (0..300i64).fold(Rat::zero(), |acc, j| {
            acc + pow_usize(&rat(j), m) / pow_usize(&rat(2), j as usize + 1)
        });
        let gap = sheffer_core::exactnum::to_f64(&(&exact - &partial)).abs();
        ensure(gap < 1e-60, || {
            format!("Meixner moment m = {m}: {exact} vs brute force")
        })?;
        values.push(exact.to_string());
    }
    ensure(values[2] == "3", || {
        format!("Meixner m = 2 moment {}", values[2])
    })?;
    Ok(format!(
        "Hermite, Laguerre, Charlier; Meixner moments {}",
        values.join(", ")
    ))
}

fn criterion9() -> Outcome {
    let n = 12;
    let start = Instant::now();
    let samples = FamilySpec::default_samples();
    let mut first = Vec::new();
    for fs in &samples {
        let report =
            run_suite(&Source::Family(fs.clone()), n, None).map_err(|e| format!("{fs}: {e}"))?;
        ensure(report.pass(), || {
            format!("{fs}: suite fails\n{}", report.to_json())
        })?;
        first.push(report.to_json());
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("suite took {elapsed:?}")
    })?;
    for (fs, json) in samples.iter().zip(&first).take(4) {
        let again = run_suite(&Source::Family(fs.clone()), n, None)
            .unwrap()
            .to_json();
        ensure(&again == json, || {
            format!("{fs}: report not byte-identical")
        })?;
    }
    Ok(format!(
        "{} samples at N = {n} in {elapsed:.2?}, reports reproducible",
        samples.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("characterization round trip", criterion1),
        ("two-path equality", criterion2),
        ("recurrence structure", criterion3),
        ("d-orthogonality and duality", criterion4),
        ("Laguerre 2-orthogonal functionals", criterion5),
        ("Meixner functionals", criterion6),
        ("lowering operators", criterion7),
        ("classical d = 1 reductions", criterion8),
        ("whole suite runtime and determinism", criterion9),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        match &outcome {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg} [{took:.2?}]", k + 1),
            Err(msg) => {
                println!("criterion {}: FAIL  {name}: {msg} [{took:.2?}]", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
