use std::process::{Command, Output};

use serde_json::Value;

fn sheffer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sheffer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn expand_hermite_row() {
    let o = sheffer(&[
        "expand",
        "--family",
        "hermite-eq12",
        "--d",
        "1",
        "--aux",
        "0,0,-1/2",
        "--order",
        "5",
    ]);
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    assert_eq!(doc["polynomials"][3]["poly"], "x^3 - 3*x");
    assert_eq!(
        doc["polynomials"][3]["coeffs"],
        serde_json::json!(["0", "-3", "0", "1"])
    );
}

#[test]
fn expand_couple_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(
        &path,
        r#"{"d":1,"gamma":["-1","1"],"sigma":["-1","2","-1"]}"#,
    )
    .unwrap();
    let o = sheffer(&[
        "expand",
        "--couple-file",
        path.to_str().unwrap(),
        "--order",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    // Laguerre L_1 = 1 - x
    assert_eq!(json(&o)["polynomials"][1]["poly"], "-x + 1");
}

#[test]
fn expand_rejects_alpha_minus_one() {
    let o = sheffer(&["expand", "--family", "laguerre-eq9", "--param", "alpha=-1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("α ≠ −1"));
}

#[test]
fn malformed_inputs_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"d":1,"gamma":["-1"]"#).unwrap();
    assert_eq!(
        code(&sheffer(&[
            "expand",
            "--couple-file",
            bad.to_str().unwrap()
        ])),
        3
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&sheffer(&[
            "expand",
            "--couple-file",
            missing.to_str().unwrap()
        ])),
        3
    );
    assert_eq!(
        code(&sheffer(&[
            "expand",
            "--family",
            "meixner-eq16",
            "--param",
            "c=0.5"
        ])),
        3
    );
}

#[test]
fn contract_violations_exit_2() {
    assert_eq!(code(&sheffer(&["expand", "--family", "jacobi"])), 2);
    assert_eq!(
        code(&sheffer(&[
            "expand",
            "--family",
            "hermite-eq12",
            "--param",
            "alpha=1"
        ])),
        2
    );
    assert_eq!(code(&sheffer(&["expand"])), 2);
    assert_eq!(
        code(&sheffer(&[
            "expand",
            "--family",
            "meixner-eq16",
            "--d",
            "2",
            "--param",
            "c=-1"
        ])),
        2
    );
    assert_eq!(
        code(&sheffer(&[
            "functionals",
            "--family",
            "laguerre-eq11",
            "--index",
            "2"
        ])),
        2
    );
}

#[test]
fn verify_meixner16_passes() {
    let o = sheffer(&[
        "verify",
        "--family",
        "meixner-eq16",
        "--d",
        "2",
        "--param",
        "c=1/2",
        "--param",
        "beta=1",
        "--order",
        "12",
    ]);
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    for s in [
        "conditions",
        "two_path",
        "recurrence",
        "duality",
        "orthogonality",
        "lowering",
    ] {
        assert_eq!(doc[s]["status"], "pass", "{s}");
    }
}

#[test]
fn verify_failing_conditions_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    // n * 1 - 3 vanishes at n = 3
    std::fs::write(&path, r#"{"d":1,"gamma":["0","3"],"sigma":["1","0","1"]}"#).unwrap();
    let out = dir.path().join("report.json");
    let o = sheffer(&[
        "verify",
        "--couple-file",
        path.to_str().unwrap(),
        "--order",
        "8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["conditions"]["status"], "fail");
    assert_eq!(
        doc["conditions"]["details"]["failing_n"],
        serde_json::json!([3])
    );
}

#[test]
fn verify_two_orthogonal_laguerre_against_d1_reports_window() {
    let o = sheffer(&[
        "verify",
        "--family",
        "laguerre-eq11",
        "--param",
        "alpha=1/2",
        "--check-d",
        "1",
        "--order",
        "8",
    ]);
    assert_eq!(code(&o), 1);
    let doc = json(&o);
    assert_eq!(doc["recurrence"]["status"], "fail");
    assert!(!doc["recurrence"]["details"]["window_violations"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn verify_is_byte_identical() {
    let args = [
        "verify",
        "--family",
        "charlier-eq13",
        "--d",
        "2",
        "--order",
        "8",
    ];
    assert_eq!(stdout(&sheffer(&args)), stdout(&sheffer(&args)));
}

#[test]
fn functionals_tables() {
    let o = sheffer(&[
        "functionals",
        "--family",
        "meixner-eq16",
        "--d",
        "1",
        "--param",
        "c=1/2",
        "--param",
        "beta=1",
        "--order",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0,2,3,meixner-classical,agrees with sigma-series"));

    let o = sheffer(&[
        "functionals",
        "--family",
        "laguerre-eq11",
        "--param",
        "alpha=1/2",
        "--index",
        "0",
        "--order",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    assert_eq!(doc["entries"][1]["value"], "3/2");
    assert_eq!(doc["entries"][1]["evaluator"], "laguerre2-series");

    let o = sheffer(&[
        "functionals",
        "--family",
        "meixner-eq16",
        "--d",
        "2",
        "--order",
        "6",
    ]);
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    assert_eq!(doc["entries"][1]["value"], "2");
    assert!(doc["entries"][1]["numeric_relative_error"].is_string());
}

#[test]
fn recurrence_and_catalog_list() {
    let o = sheffer(&[
        "recurrence",
        "--family",
        "hermite-eq12",
        "--aux",
        "0,0,-1/2",
        "--order",
        "6",
        "--format",
        "latex",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\\begin{tabular}"));

    let o = sheffer(&["catalog-list"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["families"].as_array().unwrap().len(), 8);
}
