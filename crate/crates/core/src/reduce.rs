//! Order reduction along a chain of canonical-coordinate changes.
//!
//! Step `j` maps chart `(x_j, y_j)` to `(x_{j+1}, y_{j+1})` through
//! canonical coordinates `(R, S)` of the step's generator:
//! `x_{j+1} = R`, `s_j = S` is eliminated and `y_{j+1} = dS/dR`. Each step
//! keeps explicit forward maps (new jets in old jets) and inverse maps (old
//! jets in new jets and `s_j`). Generators of the original chart are
//! restricted by composing these maps from chart 0, so any `s_j` left over
//! marks a nonlocal restriction.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::calculus::{integrate, solve_for};
use crate::error::{Error, Result};
use crate::expr::Symbol;
use crate::hidden;
use crate::liealg::LieAlgebra;
use crate::poly::Canon;
use crate::problem::{self, Display, OdeProblem};
use crate::vfield::{self, canonical_coordinates, CanonicalCoordinates, Chart, CoordinateMethod, Coordinates, OdeEquation, VectorField};

pub type Subst = BTreeMap<Symbol, Canon>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Strategy {
    /// `v = ds/dr` with `r` built from the old independent variable.
    Standard,
    /// Dependent and independent variables exchange roles.
    Swap,
}

#[derive(Clone, Debug)]
pub struct StepMaps {
    pub from: Chart,
    pub to: Chart,
    pub coords: Coordinates,
    pub eliminated: Symbol,
    pub strategy: Strategy,
    /// `x_{j+1}`, `y_{j+1}^(k)` in chart-`j` jets.
    pub forward: Subst,
    /// `x_j`, `y_j`, `y_j^(k)` in chart-`(j+1)` jets and `s_j`.
    pub inverse: Subst,
}

pub fn eliminated_symbol(j: usize) -> Symbol {
    Symbol::new(format!("_s{j}"))
}

fn subst(c: &Canon, m: &Subst) -> Result<Canon> {
    c.substitute(m)
}

/// Solves `R(x, y) = X`, `S(x, y) = s` for `(x, y)`.
fn invert_coordinates(r: &Canon, s: &Canon, from: &Chart, new_x: &Symbol, elim: &Symbol) -> Result<(Canon, Canon)> {
    let (x, y) = (&from.independent, &from.dependent);
    let nx = Canon::symbol(new_x);
    let ns = Canon::symbol(elim);
    let fail = || Error::Coordinates(format!("cannot invert ({}, {})", r.to_expr(), s.to_expr()));
    let one = |eq: &Canon, v: &Symbol| solve_for(eq, v).ok_or_else(fail);
    let at = |e: &Canon, v: &Symbol, val: &Canon| e.substitute(&[(v.clone(), val.clone())].into());
    // `R` equal to an old variable: read it off directly, which also covers
    // charts that keep the variable name.
    if *r == Canon::symbol(x) {
        let yv = one(&at(s, x, &nx)?.sub(&ns), y)?;
        return Ok((nx, yv));
    }
    if *r == Canon::symbol(y) {
        let xv = one(&at(s, y, &nx)?.sub(&ns), x)?;
        return Ok((xv, nx));
    }
    if !r.contains_symbol(y) {
        let xv = one(&r.sub(&nx), x)?;
        let yv = one(&at(s, x, &xv)?.sub(&ns), y)?;
        Ok((xv, yv))
    } else if !s.contains_symbol(y) {
        let xv = one(&s.sub(&ns), x)?;
        let yv = one(&at(r, x, &xv)?.sub(&nx), y)?;
        Ok((xv, yv))
    } else if !r.contains_symbol(x) {
        let yv = one(&r.sub(&nx), y)?;
        let xv = one(&at(s, y, &yv)?.sub(&ns), x)?;
        Ok((xv, yv))
    } else if !s.contains_symbol(x) {
        let yv = one(&s.sub(&ns), y)?;
        let xv = one(&at(r, y, &yv)?.sub(&nx), x)?;
        Ok((xv, yv))
    } else {
        Err(fail())
    }
}

/// Builds forward and inverse maps for one step. `order` is the jet order
/// carried on chart `from`: forward maps reach `y_{j+1}^(order-1)`,
/// inverse maps reach `y_j^(order)`.
pub fn build_step(from: &Chart, to: &Chart, coords: &Coordinates, j: usize, order: usize) -> Result<StepMaps> {
    let elim = eliminated_symbol(j);
    let (r, s) = (&coords.r, &coords.s);
    let mut forward = Subst::new();
    forward.insert(to.independent.clone(), r.clone());
    let dr = from.total_derivative(r, 0);
    if dr.is_zero() {
        return Err(Error::Coordinates("new independent variable is constant along solutions".into()));
    }
    let mut cur = from.total_derivative(s, 0).div(&dr)?;
    for k in 0..order {
        forward.insert(to.derivative(k), cur.clone());
        if k + 1 < order {
            cur = from.total_derivative(&cur, k + 1).div(&dr)?;
        }
    }
    let (xv, yv) = invert_coordinates(r, s, from, &to.independent, &elim)?;
    let mut inverse = Subst::new();
    inverse.insert(from.independent.clone(), xv);
    inverse.insert(from.dependent.clone(), yv);
    for k in 1..=order {
        let f = &forward[&to.derivative(k - 1)];
        let target = from.derivative(k);
        let eq = f.sub(&Canon::symbol(&to.derivative(k - 1)));
        let sol = solve_for(&eq, &target)
            .ok_or_else(|| Error::Internal(format!("cannot solve for {target} at step {j}")))?;
        let v = subst(&sol, &inverse)?;
        inverse.insert(target, v);
    }
    let strategy = if coords.method == CoordinateMethod::Swap { Strategy::Swap } else { Strategy::Standard };
    Ok(StepMaps { from: from.clone(), to: to.clone(), coords: coords.clone(), eliminated: elim, strategy, forward, inverse })
}

/// Rewrites `y_j^(n) = rhs` on the next chart.
pub fn transform_equation(eq: &OdeEquation, step: &StepMaps) -> Result<OdeEquation> {
    let n = eq.order();
    if n < 2 {
        return Err(Error::InvalidInput("cannot reduce a first-order equation further".into()));
    }
    let top_new = step.to.derivative(n - 1);
    let f = step
        .forward
        .get(&top_new)
        .ok_or_else(|| Error::Internal("forward map too short".into()))?;
    let on_shell = f.substitute(&[(eq.top(), eq.rhs.clone())].into())?;
    let rhs = subst(&on_shell, &step.inverse)?;
    if rhs.contains_symbol(&step.eliminated) {
        return Err(Error::NotSymmetry(format!(
            "reduced equation still depends on the eliminated variable: {}",
            rhs.to_expr()
        )));
    }
    if rhs.contains_symbol(&top_new) {
        return Err(Error::Internal("change of variables left a top-order derivative".into()));
    }
    OdeEquation::new(step.to.with_order(n - 1), rhs)
}

/// Composite maps from chart 0 to chart `m`.
#[derive(Clone, Debug)]
pub struct Chain {
    pub charts: Vec<Chart>,
    pub steps: Vec<StepMaps>,
    /// Chart-`m` jets in chart-0 jets, per chart.
    pub forward_total: Vec<Subst>,
    /// Chart-0 jets in chart-`m` jets plus eliminated variables, per chart.
    pub inverse_total: Vec<Subst>,
}

impl Chain {
    pub fn new(chart0: Chart) -> Chain {
        let id: Subst = chart0.jet().into_iter().map(|s| (s.clone(), Canon::symbol(&s))).collect();
        Chain { charts: vec![chart0], steps: vec![], forward_total: vec![id.clone()], inverse_total: vec![id] }
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn current(&self) -> &Chart {
        self.charts.last().unwrap()
    }

    pub fn push(&mut self, step: StepMaps) -> Result<()> {
        let m = self.depth();
        let prev_f = &self.forward_total[m];
        let mut fwd = Subst::new();
        for (k, v) in &step.forward {
            fwd.insert(k.clone(), subst(v, prev_f)?);
        }
        let prev_i = &self.inverse_total[m];
        let mut inv = Subst::new();
        for (k, v) in prev_i {
            inv.insert(k.clone(), subst(v, &step.inverse)?);
        }
        self.charts.push(step.to.clone());
        self.steps.push(step);
        self.forward_total.push(fwd);
        self.inverse_total.push(inv);
        Ok(())
    }

    /// Restriction of a chart-0 point field to chart `m`.
    pub fn restrict(&self, z: &VectorField, m: usize) -> Result<Restricted> {
        let chart0 = &self.charts[0];
        let chart = &self.charts[m];
        let p = vfield::prolong(z, chart0, m)?;
        let fwd = &self.forward_total[m];
        let inv = &self.inverse_total[m];
        let mut coeffs = Vec::new();
        for s in [&chart.independent, &chart.dependent] {
            let f = fwd.get(s).ok_or_else(|| Error::Internal(format!("no forward map for {s}")))?;
            let c = subst(&p.apply(f), inv)?;
            coeffs.push((s.clone(), c));
        }
        let field = VectorField::new(chart.base(), coeffs)?;
        Ok(Restricted::classify(field, chart, m))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Status {
    Used,
    Point,
    Nonlocal { residual: Vec<String> },
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Used => "used",
            Status::Point => "point",
            Status::Nonlocal { .. } => "nonlocal",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Restricted {
    /// Coefficients in chart symbols and eliminated variables.
    pub field: VectorField,
    /// Same field with the latest eliminated variable written as an
    /// integral over the current chart.
    pub display: VectorField,
    pub status: Status,
}

impl Restricted {
    fn classify(field: VectorField, chart: &Chart, m: usize) -> Restricted {
        let mut residual: Vec<String> = Vec::new();
        for j in 0..m {
            let e = eliminated_symbol(j);
            if field.coeffs.values().any(|c| c.contains_symbol(&e)) {
                residual.push(e.to_string());
            }
        }
        for d in chart.with_order(m.max(1) + 8).derivative_symbols() {
            if field.coeffs.values().any(|c| c.contains_symbol(&d)) {
                residual.push(d.to_string());
            }
        }
        let mut display = field.clone();
        if m > 0 {
            let e = eliminated_symbol(m - 1);
            let int = Canon::integral(&Canon::symbol(&chart.dependent), &chart.independent);
            let b: Subst = [(e, int)].into();
            display.coeffs = field.coeffs.iter().map(|(s, c)| (s.clone(), c.substitute(&b).unwrap_or_else(|_| c.clone()))).collect();
            let names: Vec<String> = residual.iter().map(|r| if *r == eliminated_symbol(m - 1).to_string() { format!("Int({}, {})", chart.dependent, chart.independent) } else { r.clone() }).collect();
            residual = names;
        }
        let status = if residual.is_empty() { Status::Point } else { Status::Nonlocal { residual } };
        Restricted { field, display, status }
    }
}

/// Canonical coordinates for a step: user-supplied ones are verified,
/// otherwise the catalog solver runs.
pub fn coordinates_for(x: &VectorField, user: Option<(&Canon, &Canon)>) -> Result<Coordinates> {
    if let Some((r, s)) = user {
        vfield::verify_coordinates(x, r, s)?;
        return Ok(Coordinates { r: r.clone(), s: s.clone(), method: CoordinateMethod::User });
    }
    match canonical_coordinates(x)? {
        CanonicalCoordinates::Found(c) => Ok(c),
        CanonicalCoordinates::NeedsUserInput(why) => Err(Error::Coordinates(format!("needs user input: {why}"))),
    }
}

/// Result of [`reduce_once`].
#[derive(Clone, Debug)]
pub struct SingleReduction {
    pub step: StepMaps,
    pub equation: OdeEquation,
}

/// One reduction of `eq` by the point symmetry `x`.
pub fn reduce_once(eq: &OdeEquation, x: &VectorField, coords: Option<(&Canon, &Canon)>, to: &Chart) -> Result<SingleReduction> {
    if !vfield::is_symmetry(x, eq)? {
        return Err(Error::NotSymmetry(x.to_string()));
    }
    let c = coordinates_for(x, coords)?;
    let step = build_step(&eq.chart, &to.with_order(eq.order()), &c, 0, eq.order())?;
    let equation = transform_equation(eq, &step)?;
    Ok(SingleReduction { step, equation })
}

/// First-order equation in canonical coordinates of its symmetry.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub coords: Coordinates,
    pub rho: Symbol,
    pub theta: Symbol,
    /// `dθ/dρ = g(ρ)`.
    pub g: Canon,
    /// `θ = Int(g, ρ) + c1`.
    pub theta_expr: Canon,
    /// Closed form of the antiderivative plus `c1`, when the catalog has it.
    pub closed: Option<Canon>,
    /// Explicit solution for the dependent variable, when solvable.
    pub solution: Option<Canon>,
}

pub fn constant(k: usize) -> Symbol {
    Symbol::new(format!("c{k}"))
}

/// Transforms a first-order equation to `dθ/dρ = g(ρ)` and integrates.
pub fn finish_quadrature(eq: &OdeEquation, x: &VectorField, coords: Option<(&Canon, &Canon)>, rho: &Symbol, theta: &Symbol) -> Result<Quadrature> {
    if eq.order() != 1 {
        return Err(Error::InvalidInput("quadrature needs a first-order equation".into()));
    }
    if !vfield::is_symmetry(x, eq)? {
        return Err(Error::NotSymmetry(x.to_string()));
    }
    let c = coordinates_for(x, coords)?;
    let chart = &eq.chart;
    let top: Subst = [(eq.top(), eq.rhs.clone())].into();
    let dr = chart.total_derivative(&c.r, 0).substitute(&top)?;
    let ds = chart.total_derivative(&c.s, 0).substitute(&top)?;
    let slope = ds.div(&dr)?;
    let (xv, yv) = invert_coordinates(&c.r, &c.s, chart, rho, theta)?;
    let inv: Subst = [(chart.independent.clone(), xv), (chart.dependent.clone(), yv)].into();
    let g = slope.substitute(&inv)?;
    if g.contains_symbol(theta) {
        return Err(Error::Internal(format!("dθ/dρ = {} still depends on θ", g.to_expr())));
    }
    let c1 = Canon::symbol(&constant(1));
    let theta_expr = Canon::integral(&g, rho).add(&c1);
    let closed = integrate(&g, rho).map(|f| f.add(&c1));
    let solution = match &closed {
        Some(f) => {
            // S(x, y) = F(R(x, y))
            let at_r = f.substitute(&[(rho.clone(), c.r.clone())].into())?;
            solve_for(&c.s.sub(&at_r), &chart.dependent)
        }
        None => None,
    };
    Ok(Quadrature { coords: c, rho: rho.clone(), theta: theta.clone(), g, theta_expr, closed, solution })
}

/// Back-substitutes `y = solution` and checks that the equation holds.
pub fn verify_solution(eq: &OdeEquation, solution: &Canon) -> Result<bool> {
    let chart = &eq.chart;
    let mut b = Subst::new();
    let mut cur = solution.clone();
    b.insert(chart.dependent.clone(), cur.clone());
    for k in 1..=eq.order() {
        cur = cur.diff(&chart.independent);
        b.insert(chart.derivative(k), cur.clone());
    }
    let lhs = Canon::symbol(&eq.top()).sub(&eq.rhs);
    Ok(lhs.substitute(&b)?.is_zero())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Warn,
    Mismatch,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub level: Level,
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictionReport {
    pub generator: String,
    pub xi: String,
    pub eta: String,
    #[serde(flatten)]
    pub status: Status,
    /// `is_symmetry` against the step's outgoing equation, for point fields.
    pub verified: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionStep {
    pub index: usize,
    pub generator: String,
    pub chart_in: Chart,
    pub chart_out: Chart,
    pub r: String,
    pub s: String,
    pub method: CoordinateMethod,
    pub strategy: Strategy,
    /// New jet variables in terms of the incoming chart.
    pub substitutions: Vec<(String, String)>,
    pub eliminated: String,
    pub equation_in: String,
    pub equation_out: String,
    pub restrictions: Vec<RestrictionReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureReport {
    pub generator: String,
    pub rho: String,
    pub theta: String,
    pub coordinates: (String, String),
    pub slope: String,
    pub theta_expr: String,
    pub closed_form: Option<String>,
    pub solution: Option<String>,
    pub solution_verified: Option<bool>,
    /// `d/dρ` of the closed form (or the integral) equals the slope.
    pub differentiates_back: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub id: String,
    pub equation: String,
    pub steps: Vec<ReductionStep>,
    pub final_equation: String,
    pub quadrature: Option<QuadratureReport>,
    /// Whether the generators close into a Lie algebra (constant structure
    /// constants), which enables the predictor cross-check.
    pub algebra_verified: bool,
    pub predictor_agrees: Option<bool>,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip)]
    pub equations: Vec<OdeEquation>,
    #[serde(skip)]
    pub restricted: Vec<BTreeMap<String, Restricted>>,
    #[serde(skip)]
    pub chain: Option<Chain>,
    #[serde(skip)]
    pub quadrature_data: Option<Quadrature>,
}

impl ReductionReport {
    /// No internal inconsistency was found; warnings are allowed.
    pub fn ok(&self) -> bool {
        self.diagnostics.iter().all(|d| d.level == Level::Warn)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.level == Level::Warn)
    }
}

fn field_strings(f: &VectorField) -> (String, String) {
    let c = f.coefficient_strings();
    (c[0].1.clone(), c[1].1.clone())
}

fn equation_string(eq: &OdeEquation) -> String {
    eq.display()
}

/// Runs the reduction path of a problem, tracking every generator.
pub fn run_path(p: &OdeProblem) -> Result<ReductionReport> {
    let eq0 = p.equation.clone();
    let n = eq0.order();
    let mut diagnostics = Vec::new();
    for g in &p.generators {
        if !vfield::is_symmetry(&g.field, &eq0)? {
            let res = vfield::symmetry_residue(&g.field, &eq0)?;
            return Err(Error::NotSymmetry(format!("{}: residue {}", g.name, res.to_expr())));
        }
    }
    let names = p.names();
    let algebra = LieAlgebra::from_fields(names.clone(), &p.fields()).ok().filter(|l| l.jacobi_check());
    let prediction = match &algebra {
        Some(l) => Some(hidden::predict_path(l, &p.path)?),
        None => None,
    };
    let mut chain = Chain::new(eq0.chart.clone());
    let mut equations = vec![eq0.clone()];
    let mut restricted: Vec<BTreeMap<String, Restricted>> = vec![p
        .generators
        .iter()
        .map(|g| (g.name.clone(), Restricted { field: g.field.clone(), display: g.field.clone(), status: Status::Point }))
        .collect()];
    let mut steps = Vec::new();
    let mut agrees = prediction.as_ref().map(|_| true);
    for (j, gname) in p.path.iter().enumerate() {
        let eq = equations[j].clone();
        let here = &restricted[j][gname];
        if here.status != Status::Point {
            return Err(Error::NotSymmetry(format!("{gname} is not a point symmetry after {j} reductions")));
        }
        let field = here.field.clone();
        let user = p.coordinates.get(gname).map(|(r, s)| (r, s));
        let coords = coordinates_for(&field, user)?;
        let to = p.charts[j].clone();
        let step = build_step(&eq.chart, &to, &coords, j, n - j)?;
        let next = transform_equation(&eq, &step)?;
        chain.push(step.clone())?;
        let m = j + 1;
        let mut now = BTreeMap::new();
        let mut reports = Vec::new();
        for g in &p.generators {
            let used = p.path[..m].contains(&g.name);
            let rz = if used {
                let f = VectorField::zero(to.base());
                Restricted { field: f.clone(), display: f, status: Status::Used }
            } else {
                chain.restrict(&g.field, m)?
            };
            let verified = if rz.status == Status::Point { Some(vfield::is_symmetry(&rz.field, &next)?) } else { None };
            if verified == Some(false) {
                diagnostics.push(Diagnostic {
                    level: Level::Error,
                    code: "restriction-not-symmetry".into(),
                    message: format!("{} after {m} reductions is point but not a symmetry: {}", g.name, rz.display),
                });
            }
            if let Some(pred) = &prediction {
                let want = pred.statuses[m][&g.name];
                if want.label() != rz.status.label() {
                    agrees = Some(false);
                    diagnostics.push(Diagnostic {
                        level: Level::Mismatch,
                        code: "predictor-mismatch".into(),
                        message: format!("{} after {m} reductions: predicted {}, computed {}", g.name, want.label(), rz.status.label()),
                    });
                }
            }
            let (xi, eta) = field_strings(&rz.display);
            reports.push(RestrictionReport { generator: g.name.clone(), xi, eta, status: rz.status.clone(), verified });
            now.insert(g.name.clone(), rz);
        }
        steps.push(ReductionStep {
            index: m,
            generator: gname.clone(),
            chart_in: eq.chart.clone(),
            chart_out: next.chart.clone(),
            r: coords.r.to_expr().to_string(),
            s: coords.s.to_expr().to_string(),
            method: coords.method,
            strategy: step.strategy,
            substitutions: step.forward.iter().map(|(k, v)| (k.to_string(), v.to_expr().to_string())).collect(),
            eliminated: step.eliminated.to_string(),
            equation_in: equation_string(&eq),
            equation_out: equation_string(&next),
            restrictions: reports,
        });
        restricted.push(now);
        equations.push(next);
    }
    let last = equations.last().unwrap().clone();
    let mut quadrature = None;
    let mut quadrature_data = None;
    if last.order() == 1 {
        let pick = match &p.quadrature {
            Some(q) => Some(q.clone()),
            None => p
                .generators
                .iter()
                .find(|g| !p.path.contains(&g.name) && restricted.last().unwrap()[&g.name].status == Status::Point)
                .map(|g| crate::problem::QuadratureWire { generator: g.name.clone(), rho: "rho".into(), theta: "theta".into() }),
        };
        if let Some(q) = pick {
            let rz = &restricted.last().unwrap()[&q.generator];
            if rz.status != Status::Point {
                return Err(Error::NotSymmetry(format!("{} is not point on the first-order equation", q.generator)));
            }
            let user = p.coordinates.get(&q.generator).map(|(r, s)| (r, s));
            let (rho, theta) = (Symbol::new(&q.rho), Symbol::new(&q.theta));
            match finish_quadrature(&last, &rz.field, user, &rho, &theta) {
                Ok(qd) => {
                    let back = match &qd.closed {
                        Some(f) => f.diff(&rho) == qd.g,
                        None => qd.theta_expr.diff(&rho) == qd.g,
                    };
                    let solution_verified = match &qd.solution {
                        Some(sol) => Some(verify_solution(&last, sol)?),
                        None => None,
                    };
                    if solution_verified == Some(false) {
                        diagnostics.push(Diagnostic { level: Level::Error, code: "solution-check".into(), message: "closed-form solution does not satisfy the equation".into() });
                    }
                    quadrature = Some(QuadratureReport {
                        generator: q.generator.clone(),
                        rho: q.rho.clone(),
                        theta: q.theta.clone(),
                        coordinates: (qd.coords.r.to_expr().to_string(), qd.coords.s.to_expr().to_string()),
                        slope: qd.g.to_expr().to_string(),
                        theta_expr: qd.theta_expr.to_expr().to_string(),
                        closed_form: qd.closed.as_ref().map(|c| c.to_expr().to_string()),
                        solution: qd.solution.as_ref().map(|c| c.to_expr().to_string()),
                        solution_verified,
                        differentiates_back: back,
                    });
                    quadrature_data = Some(qd);
                }
                Err(e) => diagnostics.push(Diagnostic { level: Level::Warn, code: "quadrature".into(), message: e.to_string() }),
            }
        }
    }
    let mut report = ReductionReport {
        id: p.id.clone(),
        equation: equation_string(&eq0),
        steps,
        final_equation: equation_string(&last),
        quadrature,
        algebra_verified: algebra.is_some(),
        predictor_agrees: agrees,
        diagnostics,
        equations,
        restricted,
        chain: Some(chain),
        quadrature_data,
    };
    compare_displays(p, &mut report)?;
    Ok(report)
}

/// Compares engine output with the problem's reference displays; every
/// mismatch becomes a warning.
fn compare_displays(p: &OdeProblem, report: &mut ReductionReport) -> Result<()> {
    let mut warns = Vec::new();
    for d in &p.displays {
        match d {
            Display::Equation { label, step, equation } => {
                let Some(eq) = report.equations.get(*step) else { continue };
                let expected = match problem::parse_equation(&eq.chart, equation) {
                    Ok(e) => e,
                    Err(e) => {
                        warns.push((label.clone(), format!("reference does not parse as an equation: {e}")));
                        continue;
                    }
                };
                if expected.rhs != eq.rhs {
                    warns.push((label.clone(), format!("engine {} vs reference {}", eq.display(), expected.display())));
                }
            }
            Display::Restriction { label, step, generator, xi, eta } => {
                let Some(level) = report.restricted.get(*step) else { continue };
                let Some(rz) = level.get(generator) else { continue };
                let chart = report.equations[*step].chart.clone();
                let expected = VectorField::parse_planar(&chart, xi, eta)?;
                if expected != rz.display {
                    warns.push((label.clone(), format!("engine {} vs reference {}", rz.display, expected)));
                }
            }
            Display::Slope { label, slope } => {
                let Some(q) = &report.quadrature_data else { continue };
                let expected = problem::canon(slope)?;
                if expected != q.g {
                    warns.push((label.clone(), format!("engine dθ/dρ = {} vs reference {}", q.g.to_expr(), expected.to_expr())));
                }
            }
        }
    }
    for (label, message) in warns {
        report.diagnostics.push(Diagnostic { level: Level::Warn, code: format!("display: {label}"), message });
    }
    Ok(())
}
