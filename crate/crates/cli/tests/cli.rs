use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hidsym")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (out.status.code().unwrap(), v)
}

#[test]
fn bernoulli_example_verifies() {
    let (code, v) = json(&["verify-example", "ex-2.2"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    let q = &v["report"]["quadrature"];
    assert_eq!(q["solution_verified"], true);
    assert_eq!(q["slope"], "-1/rho^2");
}

#[test]
fn every_example_passes_in_a_batch() {
    let (code, v) = json(&["verify-example", "all", "--jobs", "2"]);
    assert_eq!(code, 0);
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 3);
    assert!(items.iter().all(|i| i["pass"] == true));
}

#[test]
fn translation_and_dilation_are_type_three() {
    let (code, v) = json(&["classify-pair", "--field", "0;1", "--field", "0;s"]);
    assert_eq!(code, 0);
    assert_eq!(v["type"], "III");
    assert_eq!(v["pseudo_scalar"], "0");
}

#[test]
fn plan_lists_the_hidden_path() {
    let (code, v) = json(&["plan", "--input", &data("a4_1.json")]);
    assert_eq!(code, 0);
    let paths = v["paths"].as_array().unwrap();
    let p = paths.iter().find(|p| p["path"] == serde_json::json!(["U", "X", "Y", "Z"])).expect("path present");
    assert_eq!(p["orders"]["Y"]["order"], 1);
    assert_eq!(p["orders"]["Z"]["order"], 2);
}

#[test]
fn algebra_is_named() {
    let (code, v) = json(&["algebra", "-i", &data("a4_1.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["named"], "A4_1");
    assert_eq!(v["derived_series_dims"], serde_json::json!([4, 2, 0]));
}

#[test]
fn decompose_splits_case_one() {
    let (code, v) = json(&["decompose", "-i", &data("case1_triple.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["case"], 1);
    assert_eq!(v["z0"], "r^3*D[s]");
    assert_eq!(v["zstar"], "r^2*D[r] + r*s*D[s]");
}

#[test]
fn quadrature_solves_first_order() {
    let (code, v) = json(&["quadrature", "-i", &data("bernoulli.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["solution_verified"], true);
}

#[test]
fn bad_input_reports_json_error() {
    let (code, v) = json(&["algebra", "-i", "/no/such/file.json"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "invalid-input");
    let (code, v) = json(&["classify-pair", "--field", "0;1", "--field", "0;s^"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "syntax");
    let (code, v) = json(&["solve-determining", "--case", "7"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "invalid-input");
}

#[test]
fn text_output_is_readable() {
    let out = run(&["predict", "-i", &data("a4_1.json")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("path U -> X -> Y: feasible"));
    assert!(text.contains("Z: order 2"));
}

fn expression_strings(report: &Value) -> Vec<String> {
    let mut out = Vec::new();
    let rhs = |s: &Value| s.as_str().unwrap().split_once(" = ").unwrap().1.to_string();
    for step in report["steps"].as_array().unwrap() {
        out.push(rhs(&step["equation_out"]));
        out.push(step["r"].as_str().unwrap().to_string());
        out.push(step["s"].as_str().unwrap().to_string());
        for r in step["restrictions"].as_array().unwrap() {
            out.push(r["xi"].as_str().unwrap().to_string());
            out.push(r["eta"].as_str().unwrap().to_string());
        }
    }
    let q = &report["quadrature"];
    for k in ["slope", "theta_expr", "closed_form", "solution"] {
        if let Some(s) = q[k].as_str() {
            out.push(s.to_string());
        }
    }
    out
}

#[test]
fn report_expressions_reparse() {
    let (_, v) = json(&["verify-example", "all"]);
    for item in v.as_array().unwrap() {
        let strings = expression_strings(&item["report"]);
        assert!(strings.len() > 10);
        for s in strings {
            let e = hidsym::parse(&s).unwrap_or_else(|err| panic!("{s}: {err}"));
            let back = hidsym::parse(&hidsym::symexpr::normalize(&e).unwrap().to_string()).unwrap();
            assert!(hidsym::symexpr::equal(&e, &back).unwrap(), "{s}");
        }
    }
}
