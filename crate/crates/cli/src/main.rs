//! `sheffer`: build, tabulate and verify d-orthogonal Sheffer polynomial sets.
//!
//! Exit codes: 0 all checks pass, 1 a verification failed, 2 parameter or
//! contract violation, 3 I/O or parse error.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sheffer_core::catalog::{
    family_generating, laguerre2_functionals, meixner_classical_functional,
    meixner_functionals_eq19, meixner_functionals_eq19_numeric, validate_params, CatalogError,
    FamilyId, FamilySpec,
};
use sheffer_core::dorth::analyze_recurrence;
use sheffer_core::exactnum::{format_rat, parse_rat, parse_rat_list, Rat};
use sheffer_core::operators::FunctionalVector;
use sheffer_core::poly::Poly;
use sheffer_core::sheffer::{expand_polynomials, pair_from_couple, CoupleSpec, ShefferPair};
use sheffer_core::suite::{run_suite, Source, SuiteError};

use render::{latex_poly, latex_rat, Format, Table};

#[derive(Parser)]
#[command(
    name = "sheffer",
    version,
    about = "Exact d-orthogonal Sheffer polynomial toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate P_0..P_N
    Expand(RunArgs),
    /// Run every check and write a JSON report
    Verify(RunArgs),
    /// Tabulate the recurrence coefficients of x P_n
    Recurrence(RunArgs),
    /// Tabulate <u_i, x^m> for i < d, m <= N
    Functionals(RunArgs),
    /// List the built-in families
    CatalogList(ListArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Built-in family, see `catalog-list`
    #[arg(long, conflicts_with = "couple_file")]
    family: Option<String>,
    /// JSON couple file {"d": .., "gamma": [..], "sigma": [..]}
    #[arg(long)]
    couple_file: Option<PathBuf>,
    /// d (defaults to the family's smallest admissible value)
    #[arg(long)]
    d: Option<usize>,
    /// Check d-orthogonality against this d instead of the construction's own
    #[arg(long)]
    check_d: Option<usize>,
    /// Family parameter, e.g. --param c=1/2 (repeatable)
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Coefficients a_0,a_1,.. of the auxiliary polynomial
    #[arg(long, allow_hyphen_values = true)]
    aux: Option<String>,
    /// Highest index N
    #[arg(long, default_value_t = 16)]
    order: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Restrict `functionals` to a single u_i
    #[arg(long)]
    index: Option<usize>,
}

#[derive(Args)]
struct ListArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Contract(String),
    Parse(String),
}

impl From<SuiteError> for Failure {
    fn from(e: SuiteError) -> Self {
        Failure::Contract(e.to_string())
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        Failure::Contract(e.to_string())
    }
}

fn contract(e: impl std::fmt::Display) -> Failure {
    Failure::Contract(e.to_string())
}

fn resolve_source(args: &RunArgs) -> Result<Source, Failure> {
    match (&args.family, &args.couple_file) {
        (Some(name), None) => {
            let family = FamilyId::from_name(name)?;
            let d = args.d.unwrap_or_else(|| family.min_d());
            if d == 0 {
                return Err(Failure::Contract("d must be positive".into()));
            }
            let mut fs = FamilySpec::new(family, d);
            for binding in &args.params {
                let (k, v) = binding
                    .split_once('=')
                    .ok_or_else(|| Failure::Parse(format!("--param {binding:?} is not K=V")))?;
                let value =
                    parse_rat(v).map_err(|e| Failure::Parse(format!("--param {k}: {e}")))?;
                fs.set_param(k.trim(), value)?;
            }
            if let Some(aux) = &args.aux {
                let aux = parse_rat_list(aux).map_err(|e| Failure::Parse(format!("--aux: {e}")))?;
                fs = fs.with_aux(aux);
            }
            validate_params(&fs).into_result()?;
            Ok(Source::Family(fs))
        }
        (None, Some(path)) => {
            if !args.params.is_empty() || args.aux.is_some() {
                return Err(Failure::Contract(
                    "--param and --aux apply only to --family".into(),
                ));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
            let couple = CoupleSpec::from_json(&text)
                .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
            if let Some(d) = args.d {
                if d != couple.d() {
                    return Err(Failure::Contract(format!(
                        "--d {d} disagrees with the couple file (d = {})",
                        couple.d()
                    )));
                }
            }
            Ok(Source::Couple(couple))
        }
        _ => Err(Failure::Contract(
            "exactly one of --family or --couple-file is required".into(),
        )),
    }
}

fn build_pair(source: &Source, order: usize) -> Result<ShefferPair, Failure> {
    match source {
        Source::Family(fs) => Ok(family_generating(fs, order)?),
        Source::Couple(c) => pair_from_couple(c, order).map_err(contract),
    }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Parse(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_expand(args: &RunArgs) -> Result<bool, Failure> {
    let source = resolve_source(args)?;
    let n = args.order;
    let seq = expand_polynomials(&build_pair(&source, n + 1)?, n).map_err(contract)?;
    let mut header = vec!["n".to_string()];
    header.extend((0..=n).map(|k| format!("x^{k}")));
    let mut table = Table {
        header,
        latex_header: vec!["$n$".into(), "$P_n(x)$".into()],
        rows: Vec::new(),
        latex_rows: Vec::new(),
    };
    let mut polys = Vec::new();
    for (i, p) in seq.polys().iter().enumerate() {
        let coeffs: Vec<String> = p.coeffs().iter().map(format_rat).collect();
        let mut row = vec![i.to_string()];
        row.extend((0..=n).map(|k| coeffs.get(k).cloned().unwrap_or_default()));
        table.rows.push(row);
        table
            .latex_rows
            .push(vec![i.to_string(), format!("${}$", latex_poly(p, "x"))]);
        polys.push(json!({ "n": i, "coeffs": coeffs, "poly": p.to_string() }));
    }
    let doc = json!({ "input": source.describe(), "order": n, "polynomials": polys });
    write_output(&args.out, &table.render(args.format, &doc))?;
    Ok(true)
}

fn cmd_verify(args: &RunArgs) -> Result<bool, Failure> {
    let source = resolve_source(args)?;
    let report = run_suite(&source, args.order, args.check_d)?;
    let text = match args.format {
        Format::Json => report.to_json(),
        fmt => {
            let rows: Vec<Vec<String>> = report
                .sections()
                .iter()
                .map(|(name, s)| {
                    vec![
                        name.to_string(),
                        json!(s.status).as_str().unwrap_or("").to_string(),
                    ]
                })
                .collect();
            let table = Table {
                header: vec!["section".into(), "status".into()],
                latex_header: vec!["check".into(), "status".into()],
                latex_rows: rows
                    .iter()
                    .map(|r| vec![r[0].replace('_', "\\_"), r[1].clone()])
                    .collect(),
                rows,
            };
            table.render(fmt, &Value::Null)
        }
    };
    write_output(&args.out, &text)?;
    Ok(report.pass())
}

fn cmd_recurrence(args: &RunArgs) -> Result<bool, Failure> {
    let source = resolve_source(args)?;
    let d = args.check_d.unwrap_or_else(|| source.d());
    let n = args.order;
    let seq = expand_polynomials(&build_pair(&source, n + 1)?, n).map_err(contract)?;
    let analysis = analyze_recurrence(&seq, d).map_err(contract)?;
    let mut header = vec!["n".to_string()];
    header.extend((0..=d + 1).map(|k| format!("alpha_{k}")));
    let mut latex_header = vec!["$n$".to_string()];
    latex_header.extend((0..=d + 1).map(|k| format!("$\\alpha_{{{k},{d}}}(n)$")));
    let rows = analysis
        .table
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![r.n.to_string()];
            row.extend(r.coeffs.iter().map(format_rat));
            row
        })
        .collect();
    let latex_rows = analysis
        .table
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![r.n.to_string()];
            row.extend(r.coeffs.iter().map(|c| format!("${}$", latex_rat(c))));
            row
        })
        .collect();
    let table = Table {
        header,
        latex_header,
        rows,
        latex_rows,
    };
    let doc = json!({
        "input": source.describe(),
        "d": d,
        "rows": analysis.table.rows,
        "window_violations": analysis.window_violations,
        "regularity_violations": analysis.regularity_violations,
        "pass": analysis.pass(),
    });
    write_output(&args.out, &table.render(args.format, &doc))?;
    if !analysis.pass() {
        eprintln!(
            "recurrence check failed for d = {d}: {} window violation(s), regularity failures at n = {:?}",
            analysis.window_violations.len(),
            analysis.regularity_violations
        );
    }
    Ok(analysis.pass())
}

/// A closed-form evaluator for `<u_i, f>`, when the family has one.
enum ClosedForm {
    Laguerre2(Rat),
    Stirling { d: usize, c: Rat, beta: Rat },
    Classical { c: Rat, beta: Rat },
}

impl ClosedForm {
    fn for_source(source: &Source) -> Option<ClosedForm> {
        let Source::Family(fs) = source else {
            return None;
        };
        match (fs.family, fs.d) {
            (FamilyId::LaguerreEq11, 2) => Some(ClosedForm::Laguerre2(fs.param("alpha").clone())),
            (FamilyId::MeixnerEq14 | FamilyId::MeixnerEq16, 1) => Some(ClosedForm::Classical {
                c: fs.param("c").clone(),
                beta: fs.param("beta").clone(),
            }),
            (FamilyId::MeixnerEq16, d) => Some(ClosedForm::Stirling {
                d,
                c: fs.param("c").clone(),
                beta: fs.param("beta").clone(),
            }),
            _ => None,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            ClosedForm::Laguerre2(_) => "laguerre2-series",
            ClosedForm::Stirling { .. } => "meixner-stirling",
            ClosedForm::Classical { .. } => "meixner-classical",
        }
    }

    fn eval(&self, i: usize, f: &Poly) -> Result<Rat, CatalogError> {
        match self {
            ClosedForm::Laguerre2(alpha) => laguerre2_functionals(alpha, i, f),
            ClosedForm::Stirling { d, c, beta } => meixner_functionals_eq19(*d, c, beta, i, f),
            ClosedForm::Classical { c, beta } => meixner_classical_functional(c, beta, f),
        }
    }
}

fn cmd_functionals(args: &RunArgs) -> Result<bool, Failure> {
    let source = resolve_source(args)?;
    let d = source.d();
    let n = args.order;
    let indices: Vec<usize> = match args.index {
        Some(i) if i >= d => {
            return Err(Failure::Contract(format!(
                "functional index {i} out of range: need i < d = {d}"
            )))
        }
        Some(i) => vec![i],
        None => (0..d).collect(),
    };
    let fv = FunctionalVector::for_pair(&build_pair(&source, n + 1)?, d).map_err(contract)?;
    let closed = ClosedForm::for_source(&source);
    let mut all_ok = true;
    let mut entries = Vec::new();
    let mut table = Table {
        header: ["i", "m", "value", "evaluator", "cross_check"]
            .map(String::from)
            .to_vec(),
        latex_header: [
            "$i$",
            "$m$",
            "$\\langle u_i, x^m\\rangle$",
            "evaluator",
            "check",
        ]
        .map(String::from)
        .to_vec(),
        rows: Vec::new(),
        latex_rows: Vec::new(),
    };
    for &i in &indices {
        let moments = fv.moments(i, n).map_err(contract)?;
        for (m, generic) in moments.iter().enumerate() {
            let f = Poly::monomial(Rat::from_integer(1.into()), m);
            let mut entry = json!({ "i": i, "m": m });
            let (value, evaluator, check) = match &closed {
                Some(cf) => match cf.eval(i, &f) {
                    Ok(v) => {
                        let agree = &v == generic;
                        all_ok &= agree;
                        let check = if agree {
                            "agrees with sigma-series"
                        } else {
                            "MISMATCH with sigma-series"
                        };
                        if let ClosedForm::Stirling { d, c, beta } = cf {
                            let num = meixner_functionals_eq19_numeric(*d, c, beta, i, &f)?;
                            let err = num.relative_error(&v);
                            all_ok &= err < 1e-12;
                            entry["numeric_relative_error"] = json!(format!("{err:.3e}"));
                            entry["numeric_terms"] = json!(num.terms);
                        }
                        (v, cf.name(), check.to_string())
                    }
                    Err(CatalogError::Divergent(why)) => (
                        generic.clone(),
                        "sigma-series",
                        format!("{} skipped: {why}", cf.name()),
                    ),
                    Err(e) => return Err(e.into()),
                },
                None => (generic.clone(), "sigma-series", "none".to_string()),
            };
            entry["value"] = json!(format_rat(&value));
            entry["evaluator"] = json!(evaluator);
            entry["cross_check"] = json!(check);
            table.rows.push(vec![
                i.to_string(),
                m.to_string(),
                format_rat(&value),
                evaluator.to_string(),
                check.clone(),
            ]);
            table.latex_rows.push(vec![
                i.to_string(),
                m.to_string(),
                format!("${}$", latex_rat(&value)),
                evaluator.to_string(),
                check,
            ]);
            entries.push(entry);
        }
    }
    let doc = json!({ "input": source.describe(), "order": n, "entries": entries, "pass": all_ok });
    write_output(&args.out, &table.render(args.format, &doc))?;
    Ok(all_ok)
}

/// Symbolic length of the auxiliary coefficient list, e.g. "d+1".
fn aux_formula(f: FamilyId) -> String {
    match f.aux_len(100) {
        None => "-".into(),
        Some(len) => match len as i64 - 100 {
            0 => "d".into(),
            k if k > 0 => format!("d+{k}"),
            k => format!("d{k}"),
        },
    }
}

fn cmd_catalog_list(args: &ListArgs) -> Result<bool, Failure> {
    let mut items = Vec::new();
    let mut table = Table {
        header: [
            "family",
            "params",
            "min_d",
            "aux_len",
            "operator",
            "description",
        ]
        .map(String::from)
        .to_vec(),
        latex_header: ["family", "parameters", "$d_{\\min}$", "aux", "$\\sigma$"]
            .map(String::from)
            .to_vec(),
        rows: Vec::new(),
        latex_rows: Vec::new(),
    };
    for f in FamilyId::ALL {
        let defaults = FamilySpec::new(f, f.min_d());
        let params: Vec<String> = defaults
            .params()
            .map(|(k, v)| format!("{k}={}", format_rat(v)))
            .collect();
        let op = if f.is_discrete() {
            "difference"
        } else {
            "derivative"
        };
        items.push(json!({
            "family": f.name(),
            "defaults": params,
            "min_d": f.min_d(),
            "aux_len": aux_formula(f),
            "operator": op,
            "description": f.description(),
        }));
        table.rows.push(vec![
            f.name().into(),
            params.join(" "),
            f.min_d().to_string(),
            aux_formula(f),
            op.into(),
            f.description().into(),
        ]);
        table.latex_rows.push(vec![
            format!("\\texttt{{{}}}", f.name()),
            params.join(", "),
            f.min_d().to_string(),
            aux_formula(f),
            if f.is_discrete() {
                "$H^*(\\Delta)$".into()
            } else {
                "$H^*(D)$".into()
            },
        ]);
    }
    write_output(
        &args.out,
        &table.render(args.format, &json!({ "families": items })),
    )?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(2),
            };
        }
    };
    let result = match &cli.command {
        Command::Expand(a) => cmd_expand(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Recurrence(a) => cmd_recurrence(a),
        Command::Functionals(a) => cmd_functionals(a),
        Command::CatalogList(a) => cmd_catalog_list(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Contract(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
