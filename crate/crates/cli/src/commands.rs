//! Command implementations. Each returns JSON and a text rendering plus
//! whether every check it ran succeeded.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hidsym::hidden::{self, Case};
use hidsym::liealg::{match_named, LieAlgebra};
use hidsym::problem::{self, OdeProblem};
use hidsym::reduce::{self, Level, ReductionReport};
use hidsym::vfield::{self, Chart, VectorField};
use hidsym::{props, Error, Result, Symbol, Q};
use serde_json::{json, Value};

use crate::input::{FieldSet, Input};

pub struct Outcome {
    pub ok: bool,
    pub json: Value,
    pub text: String,
}

impl Outcome {
    fn new(ok: bool, json: Value, text: String) -> Self {
        Outcome { ok, json, text }
    }
}

/// `2*Y - X` style linear combination.
pub fn combo(labels: &[String], coeffs: &[Q]) -> String {
    let mut out = String::new();
    for (l, c) in labels.iter().zip(coeffs) {
        if *c == Q::from_integer(0.into()) {
            continue;
        }
        let neg = *c < Q::from_integer(0.into());
        let a = if neg { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if a != Q::from_integer(1.into()) {
            let _ = write!(out, "{a}*");
        }
        out.push_str(l);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn relations(l: &LieAlgebra) -> Vec<String> {
    let n = l.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let b = l.bracket(&l.basis_vector(i), &l.basis_vector(j));
            if b.iter().any(|c| *c != Q::from_integer(0.into())) {
                out.push(format!("[{}, {}] = {}", l.labels[i], l.labels[j], combo(&l.labels, &b)));
            }
        }
    }
    out
}

pub fn classify_pair(fs: &FieldSet, names: &[String]) -> Result<Outcome> {
    let picked = fs.pick(names, 2)?;
    let (x, y) = (&picked[0].1, &picked[1].1);
    let t = vfield::classify_pair(x, y)?;
    let c = vfield::commutator(x, y)?;
    let p = vfield::pseudo_scalar(x, y)?.to_expr();
    let (a, b) = (&picked[0].0, &picked[1].0);
    let text = format!("{a} = {x}\n{b} = {y}\n[{a}, {b}] = {c}\n{a} v {b} = {p}\ntype {t}\n");
    let json = json!({
        "chart": [fs.chart.independent.to_string(), fs.chart.dependent.to_string()],
        "fields": [{"name": a, "field": x.to_string()}, {"name": b, "field": y.to_string()}],
        "commutator": c.to_string(),
        "pseudo_scalar": p.to_string(),
        "type": t.to_string(),
    });
    Ok(Outcome::new(true, json, text))
}

pub fn algebra(input: &Input) -> Result<Outcome> {
    let (l, _) = input.algebra()?;
    let fields = input.fields().ok().map(|f| f.fields);
    let jacobi = l.jacobi_check();
    let derived: Vec<usize> = l.derived_series().iter().map(|m| m.len()).collect();
    let m = match_named(&l, fields.as_deref());
    let rel = relations(&l);
    let transform: Option<Vec<String>> =
        m.transform.as_ref().map(|t| t.iter().map(|row| combo(&l.labels, row)).collect());
    let mut text = format!("basis: {}\n", l.labels.join(", "));
    for r in &rel {
        let _ = writeln!(text, "  {r}");
    }
    let derived_text: Vec<String> = derived.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(text, "jacobi: {}", if jacobi { "holds" } else { "FAILS" });
    let _ = writeln!(text, "derived series dimensions: {}", derived_text.join(" > "));
    let _ = writeln!(text, "solvable: {}", l.is_solvable());
    let _ = writeln!(text, "named: {}", m.tag);
    if let Some(t) = &transform {
        let _ = writeln!(text, "standard basis: {}", t.join(", "));
    }
    let json = json!({
        "basis": l.labels,
        "relations": rel,
        "wire": l.to_wire(),
        "jacobi": jacobi,
        "derived_series_dims": derived,
        "solvable": l.is_solvable(),
        "named": m.tag.to_string(),
        "standard_basis": transform,
    });
    Ok(Outcome::new(jacobi, json, text))
}

fn status_table(p: &hidden::PathPrediction, labels: &[String]) -> String {
    let mut text = String::new();
    let _ = write!(text, "{:<6}", "step");
    for l in labels {
        let _ = write!(text, "{l:>10}");
    }
    text.push('\n');
    for (k, row) in p.statuses.iter().enumerate() {
        let head = if k == 0 { "0".to_string() } else { format!("{k}:{}", p.path[k - 1]) };
        let _ = write!(text, "{head:<6}");
        for l in labels {
            let _ = write!(text, "{:>10}", row.get(l).map(|s| s.label()).unwrap_or("-"));
        }
        text.push('\n');
    }
    text
}

fn orders_text(p: &hidden::PathPrediction) -> String {
    p.orders.iter().map(|(g, o)| format!("{g}: {o}")).collect::<Vec<_>>().join(", ")
}

pub fn predict(input: &Input, path: &[String], generator: Option<&str>) -> Result<Outcome> {
    let (l, file_path) = input.algebra()?;
    let path = if path.is_empty() { file_path } else { path.to_vec() };
    if path.is_empty() {
        return Err(Error::InvalidInput("no reduction path given (use --path or a `path` entry)".into()));
    }
    if let Some(g) = generator {
        let statuses = hidden::predict_status(&l, &path, g)?;
        let order = hidden::convertible_order(&l, &path, g)?;
        let labels: Vec<&str> = statuses.iter().map(|s| s.label()).collect();
        let text = format!("{g} along {}: {}\nconvertible: {order}\n", path.join(" -> "), labels.join(", "));
        let json = json!({"generator": g, "path": path, "statuses": statuses, "convertible_order": order});
        return Ok(Outcome::new(true, json, text));
    }
    let p = hidden::predict_path(&l, &path)?;
    let mut text = format!("path {}: {}\n", path.join(" -> "), if p.feasible { "feasible" } else { "infeasible" });
    text.push_str(&status_table(&p, &l.labels));
    let _ = writeln!(text, "orders: {}", orders_text(&p));
    Ok(Outcome::new(true, serde_json::to_value(&p).map_err(internal)?, text))
}

pub fn plan(input: &Input, max_dim: usize) -> Result<Outcome> {
    let (l, _) = input.algebra()?;
    let paths = hidden::plan_paths_bounded(&l, max_dim)?;
    let mut text = String::new();
    for p in &paths {
        let _ = writeln!(text, "{}  [{}]", p.path.join(" -> "), orders_text(p));
    }
    if paths.is_empty() {
        text.push_str("no feasible path\n");
    }
    Ok(Outcome::new(true, json!({ "paths": paths }), text))
}

fn internal(e: serde_json::Error) -> Error {
    Error::Internal(e.to_string())
}

fn canon_map(m: &BTreeMap<String, hidsym::Canon>) -> BTreeMap<String, String> {
    m.iter().map(|(k, v)| (k.clone(), v.to_expr().to_string())).collect()
}

pub fn decompose(fs: &FieldSet, names: &[String]) -> Result<Outcome> {
    let picked = fs.pick(names, 3)?;
    let (x, y, z) = (&picked[0].1, &picked[1].1, &picked[2].1);
    let report = hidden::verify_convertible_conditions(x, y, z)?;
    let d = hidden::decompose(x, y, z)?;
    let all_hold = report.conditions.iter().all(|c| c.holds);
    let mut text = format!("case {}\nZ0 = {}\nZ* = {}\n", d.case.number(), d.z0, d.zstar);
    for (k, v) in canon_map(&d.params) {
        let _ = writeln!(text, "  {k} = {v}");
    }
    for c in &report.conditions {
        let _ = writeln!(text, "{} {}: {}", if c.holds { "holds" } else { "fails" }, c.name, c.detail);
    }
    let json = json!({
        "case": d.case.number(),
        "z0": d.z0.to_string(),
        "zstar": d.zstar.to_string(),
        "params": canon_map(&d.params),
        "normalized": canon_map(&d.normalized),
        "conditions": report,
        "all_conditions_hold": all_hold,
    });
    Ok(Outcome::new(true, json, text))
}

pub fn solve_determining(case: u32, degree: usize) -> Result<Outcome> {
    let f = hidden::solve_determining(Case::from_number(case)?, degree)?;
    let basis: Vec<String> = f.basis.iter().map(|b| b.to_string()).collect();
    let general = f.general()?.to_string();
    let mut text = format!("case {case}, ansatz degree {degree}: {} conditions\n", f.conditions.len());
    for b in &basis {
        let _ = writeln!(text, "  {b}");
    }
    if f.free_function {
        text.push_str("  b(r)*D[s]\n");
    }
    let _ = writeln!(text, "general: {general}");
    let json = json!({
        "case": case,
        "degree": degree,
        "conditions": f.conditions.len(),
        "basis": basis,
        "free_function": f.free_function,
        "general": general,
    });
    Ok(Outcome::new(true, json, text))
}

fn report_text(r: &ReductionReport) -> String {
    let mut text = format!("{}: {}\n", r.id, r.equation);
    for s in &r.steps {
        let _ = writeln!(text, "step {} by {}: ({}, {}) -> {}", s.index, s.generator, s.r, s.s, s.equation_out);
        for x in &s.restrictions {
            let check = match x.verified {
                Some(true) => " (symmetry verified)",
                Some(false) => " (NOT a symmetry)",
                None => "",
            };
            let _ = writeln!(text, "  {}: xi = {}, eta = {}  {}{check}", x.generator, x.xi, x.eta, x.status.label());
        }
    }
    if let Some(q) = &r.quadrature {
        let _ = writeln!(text, "quadrature by {}: d{}/d{} = {}", q.generator, q.theta, q.rho, q.slope);
        let _ = writeln!(text, "  {} = {}", q.theta, q.closed_form.as_deref().unwrap_or(&q.theta_expr));
        if let Some(s) = &q.solution {
            let v = match q.solution_verified {
                Some(true) => "verified",
                Some(false) => "NOT verified",
                None => "unchecked",
            };
            let _ = writeln!(text, "  solution {s} ({v})");
        }
    }
    if let Some(a) = r.predictor_agrees {
        let _ = writeln!(text, "predictor agrees: {a}");
    }
    for d in &r.diagnostics {
        let level = match d.level {
            Level::Warn => "WARN",
            Level::Mismatch => "MISMATCH",
            Level::Error => "ERROR",
        };
        let _ = writeln!(text, "{level} {}: {}", d.code, d.message);
    }
    text
}

fn report_ok(r: &ReductionReport) -> bool {
    let q_ok = r
        .quadrature
        .as_ref()
        .map(|q| q.differentiates_back && q.solution_verified != Some(false))
        .unwrap_or(true);
    r.ok() && q_ok && r.predictor_agrees != Some(false)
}

pub fn reduce(p: &OdeProblem) -> Result<Outcome> {
    let r = reduce::run_path(p)?;
    let text = report_text(&r);
    Ok(Outcome::new(report_ok(&r), serde_json::to_value(&r).map_err(internal)?, text))
}

pub fn verify_example(id: &str) -> Result<Outcome> {
    let p = problem::example(id)?;
    let mut o = reduce(&p)?;
    let status = if o.ok { "PASS" } else { "FAIL" };
    let warns = o.json["diagnostics"].as_array().map(|d| d.len()).unwrap_or(0);
    let _ = writeln!(o.text, "{status} {id} ({warns} diagnostics)");
    o.json = json!({ "id": id, "pass": o.ok, "report": o.json });
    Ok(o)
}

pub fn quadrature(p: &OdeProblem, generator: Option<&str>) -> Result<Outcome> {
    if p.equation.order() != 1 {
        let r = reduce::run_path(p)?;
        let Some(q) = &r.quadrature else {
            return Err(Error::InvalidInput("the path does not end in a first-order equation".into()));
        };
        let json = serde_json::to_value(q).map_err(internal)?;
        return Ok(Outcome::new(report_ok(&r), json, report_text(&r)));
    }
    let wire = p.quadrature.as_ref();
    let name = generator
        .map(str::to_string)
        .or_else(|| wire.map(|w| w.generator.clone()))
        .or_else(|| p.generators.first().map(|g| g.name.clone()))
        .ok_or_else(|| Error::InvalidInput("no generator".into()))?;
    let x = &p.generator(&name)?.field;
    let rho = Symbol::new(wire.map(|w| w.rho.as_str()).unwrap_or("rho"));
    let theta = Symbol::new(wire.map(|w| w.theta.as_str()).unwrap_or("theta"));
    let coords = p.coordinates.get(&name).map(|(r, s)| (r, s));
    let q = reduce::finish_quadrature(&p.equation, x, coords, &rho, &theta)?;
    let verified = q.solution.as_ref().map(|s| reduce::verify_solution(&p.equation, s)).transpose()?;
    let shown = q.closed.as_ref().unwrap_or(&q.theta_expr).to_expr().to_string();
    let mut text = format!("d{theta}/d{rho} = {}\n{theta} = {shown}\n", q.g.to_expr());
    if let Some(s) = &q.solution {
        let _ = writeln!(text, "{} = {} ({})", p.equation.chart.dependent, s.to_expr(), if verified == Some(true) { "verified" } else { "NOT verified" });
    }
    let json = json!({
        "generator": name,
        "coordinates": [q.coords.r.to_expr().to_string(), q.coords.s.to_expr().to_string()],
        "slope": q.g.to_expr().to_string(),
        "theta": shown,
        "solution": q.solution.as_ref().map(|s| s.to_expr().to_string()),
        "solution_verified": verified,
    });
    Ok(Outcome::new(verified != Some(false), json, text))
}

pub fn check_properties(seed: u64, sizes: &props::Sizes) -> Result<Outcome> {
    let counts = props::run(seed, sizes)?;
    let ok = counts.iter().all(|c| c.ok());
    let mut text = format!("seed {seed}\n");
    for c in &counts {
        let _ = writeln!(text, "{} {}: {}/{}", if c.ok() { "PASS" } else { "FAIL" }, c.name, c.passed, c.total);
    }
    Ok(Outcome::new(ok, json!({ "seed": seed, "properties": counts }), text))
}

/// Fields given directly on the command line as `xi;eta`.
pub fn inline_fields(chart: &str, fields: &[String]) -> Result<FieldSet> {
    let vars: Vec<&str> = chart.split(',').map(str::trim).collect();
    if vars.len() != 2 {
        return Err(Error::InvalidInput(format!("chart must be `x,y`, got `{chart}`")));
    }
    let chart = Chart::new(vars[0], vars[1], 0);
    let mut set = FieldSet { chart: chart.clone(), names: vec![], fields: vec![], path: vec![] };
    for (i, f) in fields.iter().enumerate() {
        let (xi, eta) = f
            .split_once(';')
            .ok_or_else(|| Error::InvalidInput(format!("field must be `xi;eta`, got `{f}`")))?;
        set.names.push(["X", "Y", "Z", "W"].get(i).map(|s| s.to_string()).unwrap_or(format!("V{i}")));
        set.fields.push(VectorField::parse_planar(&chart, xi, eta)?);
    }
    Ok(set)
}
