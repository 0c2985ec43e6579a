//! Hidden and convertible symmetries: point/nonlocal prediction from
//! structure constants, reduction-path planning, the `Z = Z⁰ + Z*`
//! decomposition for canonical pairs and the determining systems of the
//! four canonical cases.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Symbol, Q};
use crate::liealg::LieAlgebra;
use crate::poly::{Canon, Mono, Poly};
use crate::reduce::{build_step, coordinates_for, eliminated_symbol, Chain, Restricted, Status};
use crate::vfield::{commutator, span_coefficients, Chart, VectorField};

pub const DEFAULT_MAX_DIM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    Used,
    Point,
    Nonlocal,
}

impl StepStatus {
    pub fn label(self) -> &'static str {
        match self {
            StepStatus::Used => "used",
            StepStatus::Point => "point",
            StepStatus::Nonlocal => "nonlocal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "order", rename_all = "kebab-case")]
pub enum ConvertibleOrder {
    NotHidden,
    Order(usize),
    NeverWithinPath,
}

impl std::fmt::Display for ConvertibleOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConvertibleOrder::NotHidden => write!(f, "not-hidden"),
            ConvertibleOrder::Order(k) => write!(f, "order {k}"),
            ConvertibleOrder::NeverWithinPath => write!(f, "never-within-path"),
        }
    }
}

fn check_path(l: &LieAlgebra, path: &[String]) -> Result<Vec<usize>> {
    let idx = path.iter().map(|p| l.index(p)).collect::<Result<Vec<_>>>()?;
    for (i, a) in idx.iter().enumerate() {
        if idx[..i].contains(a) {
            return Err(Error::InvalidInput(format!("label {} repeated in path", path[i])));
        }
    }
    Ok(idx)
}

/// Whether `g` is point after reducing by the first `k` path generators:
/// every bracket `[X_i, g]`, `i < k`, lies in their span.
fn point_after(l: &LieAlgebra, path: &[usize], g: usize, k: usize) -> bool {
    let gv = l.basis_vector(g);
    path[..k].iter().all(|&i| {
        let b = l.bracket(&l.basis_vector(i), &gv);
        l.span_membership(&b, &path[..k]).is_some()
    })
}

/// Status of `g` after `k = 0..=len(path)` reductions.
pub fn predict_status(l: &LieAlgebra, path: &[String], g: &str) -> Result<Vec<StepStatus>> {
    let idx = check_path(l, path)?;
    let gi = l.index(g)?;
    let used_at = idx.iter().position(|&i| i == gi);
    Ok((0..=idx.len())
        .map(|k| match used_at {
            Some(p) if k > p => StepStatus::Used,
            _ if point_after(l, &idx, gi, k) => StepStatus::Point,
            _ => StepStatus::Nonlocal,
        })
        .collect())
}

pub fn convertible_order(l: &LieAlgebra, path: &[String], g: &str) -> Result<ConvertibleOrder> {
    if path.iter().any(|p| p == g) {
        return Err(Error::InvalidInput(format!("{g} is part of the path")));
    }
    let st = predict_status(l, path, g)?;
    Ok(order_from_statuses(&st))
}

fn order_from_statuses(st: &[StepStatus]) -> ConvertibleOrder {
    if st.len() < 2 || st[1] != StepStatus::Nonlocal {
        return ConvertibleOrder::NotHidden;
    }
    match (2..st.len()).find(|&k| st[k] == StepStatus::Point) {
        Some(k) => ConvertibleOrder::Order(k - 1),
        None => ConvertibleOrder::NeverWithinPath,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PathPrediction {
    pub path: Vec<String>,
    /// `statuses[k][g]` is the status of `g` after `k` reductions.
    pub statuses: Vec<BTreeMap<String, StepStatus>>,
    pub feasible: bool,
    /// Number of leading steps whose generator was point when used.
    pub feasible_steps: usize,
    /// Convertible order of each generator relative to the part of the
    /// path that precedes it.
    pub orders: BTreeMap<String, ConvertibleOrder>,
}

pub fn predict_path(l: &LieAlgebra, path: &[String]) -> Result<PathPrediction> {
    let idx = check_path(l, path)?;
    let mut statuses = vec![BTreeMap::new(); idx.len() + 1];
    for lab in &l.labels {
        for (k, s) in predict_status(l, path, lab)?.into_iter().enumerate() {
            statuses[k].insert(lab.clone(), s);
        }
    }
    let feasible_steps = (0..path.len()).take_while(|&j| statuses[j][&path[j]] == StepStatus::Point).count();
    let mut orders = BTreeMap::new();
    for lab in &l.labels {
        let prefix = match path.iter().position(|p| p == lab) {
            Some(p) => &path[..p],
            None => path,
        };
        orders.insert(lab.clone(), convertible_order(l, prefix, lab)?);
    }
    Ok(PathPrediction { path: path.to_vec(), statuses, feasible: feasible_steps == path.len(), feasible_steps, orders })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            cur.push(v);
            go(cur, left, out);
            cur.pop();
            left.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

/// All orderings of the basis, feasible ones first, then by labels.
pub fn plan_paths(l: &LieAlgebra) -> Result<Vec<PathPrediction>> {
    plan_paths_bounded(l, DEFAULT_MAX_DIM)
}

pub fn plan_paths_bounded(l: &LieAlgebra, max_dim: usize) -> Result<Vec<PathPrediction>> {
    if l.dim() > max_dim {
        return Err(Error::InvalidInput(format!("dimension {} exceeds the planning bound {max_dim}", l.dim())));
    }
    let mut out = permutations(l.dim())
        .into_iter()
        .map(|p| predict_path(l, &p.iter().map(|&i| l.labels[i].clone()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| b.feasible.cmp(&a.feasible).then_with(|| a.path.cmp(&b.path)));
    Ok(out)
}

/// Canonical configurations `X = ∂s` together with `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Case {
    /// `Y = r∂s`, type I pair.
    Case1,
    /// `Y = ∂r`, type II pair.
    Case2,
    /// `Y = r∂r`.
    Case3,
    /// `Y = s∂s`.
    Case4,
}

impl Case {
    pub fn from_number(n: u32) -> Result<Case> {
        Ok(match n {
            1 => Case::Case1,
            2 => Case::Case2,
            3 => Case::Case3,
            4 => Case::Case4,
            _ => return Err(Error::InvalidInput(format!("no case {n}"))),
        })
    }

    pub fn number(self) -> u32 {
        match self {
            Case::Case1 => 1,
            Case::Case2 => 2,
            Case::Case3 => 3,
            Case::Case4 => 4,
        }
    }

    /// `(ξ_Y, η_Y)` on the chart `(r, s)`.
    pub fn second(self) -> (&'static str, &'static str) {
        match self {
            Case::Case1 => ("0", "r"),
            Case::Case2 => ("1", "0"),
            Case::Case3 => ("r", "0"),
            Case::Case4 => ("0", "s"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub case: Case,
    pub z0: VectorField,
    pub zstar: VectorField,
    /// Raw parameters read off `Z` (`c1...`, `b`, or `alpha...`).
    pub params: BTreeMap<String, Canon>,
    /// Normalized `alpha, beta, gamma` where they are defined.
    pub normalized: BTreeMap<String, Canon>,
}

fn free_of(c: &Canon, vars: &[&Symbol]) -> bool {
    vars.iter().all(|v| !c.contains_symbol(v))
}

fn shape_error(case: Case, what: &str, residual: &Canon) -> Error {
    Error::Shape(format!("case {}: {what}; residual {}", case.number(), residual.to_expr()))
}

fn is_field(f: &VectorField, r: &Symbol, s: &Symbol, xi: &Canon, eta: &Canon) -> bool {
    f.coeff(r) == *xi && f.coeff(s) == *eta
}

/// Detects the canonical case of `(X, Y)` on the chart `(r, s) = X.vars`.
pub fn detect_case(x: &VectorField, y: &VectorField) -> Result<Case> {
    if x.vars.len() != 2 || y.vars != x.vars {
        return Err(Error::ChartMismatch("decomposition needs planar fields on one chart".into()));
    }
    let (r, s) = (&x.vars[0], &x.vars[1]);
    if !is_field(x, r, s, &Canon::zero(), &Canon::one()) {
        return Err(Error::Shape(format!("X = {x} is not ∂{s}")));
    }
    let (rc, sc) = (Canon::symbol(r), Canon::symbol(s));
    let z = Canon::zero();
    let one = Canon::one();
    for (case, xi, eta) in [
        (Case::Case1, &z, &rc),
        (Case::Case2, &one, &z),
        (Case::Case3, &rc, &z),
        (Case::Case4, &z, &sc),
    ] {
        if is_field(y, r, s, xi, eta) {
            return Ok(case);
        }
    }
    Err(Error::Shape(format!("Y = {y} is not one of r∂s, ∂r, r∂r, s∂s")))
}

/// Splits `Z` for the canonical pair `(X, Y)`.
pub fn decompose(x: &VectorField, y: &VectorField, zf: &VectorField) -> Result<Decomposition> {
    let case = detect_case(x, y)?;
    if zf.vars != x.vars {
        return Err(Error::ChartMismatch("Z lives on another chart".into()));
    }
    let (r, s) = (&x.vars[0], &x.vars[1]);
    let rs = [r, s];
    let (a, b) = (zf.coeff(r), zf.coeff(s));
    let (rc, sc) = (Canon::symbol(r), Canon::symbol(s));
    let zero_field = VectorField::zero(x.vars.clone());
    let mut params = BTreeMap::new();
    let mut normalized = BTreeMap::new();
    let zstar = match case {
        Case::Case1 => {
            if a.contains_symbol(s) {
                return Err(shape_error(case, "A depends on s", &a.diff(s)));
            }
            let a2 = a.diff(r).diff(r);
            if !a2.diff(r).is_zero() {
                return Err(shape_error(case, "A is not quadratic in r", &a2.diff(r)));
            }
            let c1 = a2.scale(&Q::new(1.into(), 2.into()));
            let c3 = a.diff(r).sub(&c1.mul(&rc).scale(&Q::from_integer(2.into())));
            let c4 = a.sub(&c1.mul(&rc).mul(&rc)).sub(&c3.mul(&rc));
            let bs = b.diff(s);
            if !bs.diff(s).is_zero() {
                return Err(shape_error(case, "B is not affine in s", &bs.diff(s)));
            }
            let c2 = bs.sub(&c1.mul(&rc));
            if !free_of(&c2, &rs) {
                return Err(shape_error(case, "B_s is not c1 r + c2", &c2));
            }
            let bfun = b.sub(&bs.mul(&sc));
            for (k, v) in [("c1", &c1), ("c2", &c2), ("c3", &c3), ("c4", &c4), ("b", &bfun)] {
                params.insert(k.to_string(), v.clone());
            }
            for (k, v) in [("alpha", &c3), ("beta", &c4), ("gamma", &c2)] {
                normalized.insert(k.to_string(), v.clone());
            }
            VectorField::new(x.vars.clone(), [(r.clone(), c1.mul(&rc).mul(&rc)), (s.clone(), c1.mul(&rc).mul(&sc))])?
        }
        Case::Case2 => {
            for (name, c) in [("A", &a), ("B", &b)] {
                for (u, v) in [(r, r), (r, s), (s, s)] {
                    let d = c.diff(u).diff(v);
                    if !d.is_zero() {
                        return Err(shape_error(case, &format!("{name} is not affine"), &d));
                    }
                }
            }
            let c1 = a.diff(s);
            let c2 = a.diff(r);
            let c3 = a.sub(&c1.mul(&sc)).sub(&c2.mul(&rc));
            let c4 = c1.sub(&b.diff(r));
            let c5 = b.diff(s);
            let c6 = b.sub(&b.diff(r).mul(&rc)).sub(&c5.mul(&sc));
            for (k, v) in [("c1", &c1), ("c2", &c2), ("c3", &c3), ("c4", &c4), ("c5", &c5), ("c6", &c6)] {
                params.insert(k.to_string(), v.clone());
            }
            if let Some(q) = c1.as_constant() {
                if !q.is_zero() {
                    let inv = Canon::constant(Q::one() / q);
                    normalized.insert("alpha".into(), c2.mul(&inv));
                    normalized.insert("beta".into(), b.diff(r).mul(&inv));
                    normalized.insert("gamma".into(), c5.mul(&inv));
                }
            }
            VectorField::new(x.vars.clone(), [(r.clone(), c1.mul(&sc))])?
        }
        Case::Case3 => {
            // (αr + β)∂s, up to multiples of Y = r∂r.
            let kappa = a.diff(r);
            let ra = a.sub(&kappa.mul(&rc));
            if !ra.is_zero() || !free_of(&kappa, &rs) {
                return Err(shape_error(case, "A is not a multiple of r", &a));
            }
            if b.contains_symbol(s) || !b.diff(r).diff(r).is_zero() {
                return Err(shape_error(case, "B is not αr + β", &b.diff(s).add(&b.diff(r).diff(r))));
            }
            let alpha = b.diff(r);
            let beta = b.sub(&alpha.mul(&rc));
            for (k, v) in [("alpha", &alpha), ("beta", &beta), ("kappa", &kappa)] {
                params.insert(k.to_string(), v.clone());
                normalized.insert(k.to_string(), v.clone());
            }
            zero_field
        }
        Case::Case4 => {
            // α∂r + (βr + γ)∂s, up to multiples of Y = s∂s.
            if !free_of(&a, &rs) {
                return Err(shape_error(case, "A is not constant", &a));
            }
            let kappa = b.diff(s);
            let rest = b.sub(&kappa.mul(&sc));
            if !free_of(&kappa, &rs) || rest.contains_symbol(s) || !rest.diff(r).diff(r).is_zero() {
                return Err(shape_error(case, "B is not βr + γ + κs", &b));
            }
            let beta = rest.diff(r);
            let gamma = rest.sub(&beta.mul(&rc));
            for (k, v) in [("alpha", &a), ("beta", &beta), ("gamma", &gamma), ("kappa", &kappa)] {
                params.insert(k.to_string(), v.clone());
                normalized.insert(k.to_string(), v.clone());
            }
            zero_field
        }
    };
    let z0 = zf.sub(&zstar)?;
    Ok(Decomposition { case, z0, zstar, params, normalized })
}

#[derive(Clone, Debug, Serialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvertibleReport {
    pub conditions: Vec<Condition>,
    /// `γ` from `[X,Z] = γX + Y`.
    #[serde(serialize_with = "ser_opt_q")]
    pub gamma: Option<Q>,
    /// `(β, α)` from `[Y,Z] = βX + αY`.
    #[serde(serialize_with = "ser_opt_pair")]
    pub beta_alpha: Option<(Q, Q)>,
    pub jacobi_obstruction: JacobiObstruction,
}

fn ser_opt_q<S: serde::Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(|q| q.to_string()).serialize(s)
}

fn ser_opt_pair<S: serde::Serializer>(v: &Option<(Q, Q)>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(|(a, b)| [a.to_string(), b.to_string()]).serialize(s)
}

fn span_detail(v: &Option<Vec<Q>>) -> String {
    match v {
        Some(c) => c.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", "),
        None => "not in span".into(),
    }
}

/// Commutator relations for a triple and, when `(X, Y)` is canonical, the
/// membership properties of `Z⁰` and `Z*`.
pub fn verify_convertible_conditions(x: &VectorField, y: &VectorField, z: &VectorField) -> Result<ConvertibleReport> {
    let mut conditions = Vec::new();
    let xy = commutator(x, y)?;
    conditions.push(Condition { name: "[X,Y] = 0".into(), holds: xy.is_zero(), detail: xy.to_string() });
    let pair = [x.clone(), y.clone()];
    let xz = span_coefficients(&commutator(x, z)?, &pair)?;
    let gamma = xz.as_ref().filter(|c| c[1].is_one()).map(|c| c[0].clone());
    conditions.push(Condition { name: "[X,Z] = γX + Y".into(), holds: gamma.is_some(), detail: span_detail(&xz) });
    let yz = span_coefficients(&commutator(y, z)?, &pair)?;
    let beta_alpha = yz.as_ref().map(|c| (c[0].clone(), c[1].clone()));
    conditions.push(Condition { name: "[Y,Z] = βX + αY".into(), holds: yz.is_some(), detail: span_detail(&yz) });
    match decompose(x, y, z) {
        Ok(d) => {
            let one_x = [x.clone()];
            let one_y = [y.clone()];
            let checks: [(&str, &VectorField, &VectorField, &[VectorField], bool); 4] = [
                ("[X,Z0] in span{X}", x, &d.z0, &one_x, true),
                ("[X,Z*] not in span{X}", x, &d.zstar, &one_x, false),
                ("[Y,Z0] in span{Y}", y, &d.z0, &one_y, true),
                ("[Y,Z*] not in span{Y}", y, &d.zstar, &one_y, false),
            ];
            for (name, u, w, basis, want) in checks {
                let c = commutator(u, w)?;
                let sp = span_coefficients(&c, basis)?;
                conditions.push(Condition { name: name.into(), holds: sp.is_some() == want, detail: c.to_string() });
            }
        }
        Err(e) => conditions.push(Condition { name: "decomposition".into(), holds: false, detail: e.to_string() }),
    }
    Ok(ConvertibleReport { conditions, gamma, beta_alpha, jacobi_obstruction: jacobi_obstruction() })
}

/// Jacobi identity for `[X,Y] = λX`, `[X,Z] = bX + Y`, `[Y,Z] = cX + dY`
/// evaluated with symbolic `λ, b, c, d`.
#[derive(Clone, Debug, Serialize)]
pub struct JacobiObstruction {
    /// Residue components on `(X, Y, Z)`.
    pub residue: Vec<String>,
    /// The residue vanishes identically once `λ = 0`.
    pub vanishes_at_lambda_zero: bool,
    /// Some component is a nonzero rational multiple of `λ`.
    pub forces_lambda_zero: bool,
}

type SymVec = [Canon; 3];

fn sym_bracket(table: &[[SymVec; 3]; 3], u: &SymVec, v: &SymVec) -> SymVec {
    let mut out: SymVec = [Canon::zero(), Canon::zero(), Canon::zero()];
    for i in 0..3 {
        for j in 0..3 {
            let w = u[i].mul(&v[j]);
            if w.is_zero() {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o = o.add(&w.mul(&table[i][j][k]));
            }
        }
    }
    out
}

/// Jacobi residue for given bracket coefficients `(λ, b, c, d)`.
pub fn jacobi_obstruction_residue(lambda: &Canon, b: &Canon, c: &Canon, d: &Canon) -> [Canon; 3] {
    let z = Canon::zero;
    let one = Canon::one();
    let mut t: [[SymVec; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| [z(), z(), z()]));
    let mut set = |i: usize, j: usize, v: SymVec| {
        t[j][i] = [v[0].neg(), v[1].neg(), v[2].neg()];
        t[i][j] = v;
    };
    set(0, 1, [lambda.clone(), z(), z()]);
    set(0, 2, [b.clone(), one.clone(), z()]);
    set(1, 2, [c.clone(), d.clone(), z()]);
    let e = |i: usize| -> SymVec {
        let mut v = [z(), z(), z()];
        v[i] = Canon::one();
        v
    };
    let (x, y, zz) = (e(0), e(1), e(2));
    let a1 = sym_bracket(&t, &x, &sym_bracket(&t, &y, &zz));
    let a2 = sym_bracket(&t, &y, &sym_bracket(&t, &zz, &x));
    let a3 = sym_bracket(&t, &zz, &sym_bracket(&t, &x, &y));
    [0, 1, 2].map(|k| a1[k].add(&a2[k]).add(&a3[k]))
}

pub fn jacobi_obstruction() -> JacobiObstruction {
    let sym = |n: &str| Canon::symbol(&Symbol::new(n));
    let lambda = Symbol::new("lambda");
    let res = jacobi_obstruction_residue(&sym("lambda"), &sym("b"), &sym("c"), &sym("d"));
    let at_zero: BTreeMap<Symbol, Canon> = [(lambda.clone(), Canon::zero())].into();
    let vanishes = res.iter().all(|r| r.substitute(&at_zero).map(|v| v.is_zero()).unwrap_or(false));
    let forces = res.iter().any(|r| {
        r.div(&Canon::symbol(&lambda)).ok().and_then(|q| q.as_constant()).is_some_and(|q| !q.is_zero())
    });
    JacobiObstruction { residue: res.iter().map(|r| r.to_expr().to_string()).collect(), vanishes_at_lambda_zero: vanishes, forces_lambda_zero: forces }
}

/// Solution family of the determining system for one canonical case.
#[derive(Clone, Debug)]
pub struct DeterminingFamily {
    pub case: Case,
    pub degree: usize,
    /// Total-degree monomials `r^i s^j` of the ansatz, for `A` then `B`.
    pub monomials: Vec<(usize, usize, usize)>,
    /// Linear conditions on the ansatz coefficients.
    pub conditions: Vec<Vec<Q>>,
    /// Polynomial part of the family.
    pub basis: Vec<VectorField>,
    /// `b(r)∂s` is admissible on top of the basis.
    pub free_function: bool,
    pub chain: Chain,
}

const ANSATZ_CHART: (&str, &str) = ("r", "s");

fn chart_names(case: Case) -> [(&'static str, &'static str); 3] {
    match case {
        Case::Case1 => [ANSATZ_CHART, ("r", "v"), ("r", "w")],
        _ => [ANSATZ_CHART, ("r", "v"), ("rho", "w")],
    }
}

/// Two reductions for the case: by `X = ∂s`, then by the restriction of `Y`.
pub fn case_chain(case: Case) -> Result<Chain> {
    let [c0, c1, c2] = chart_names(case);
    let chart0 = Chart::new(c0.0, c0.1, 3);
    let chart1 = Chart::new(c1.0, c1.1, 2);
    let chart2 = Chart::new(c2.0, c2.1, 1);
    let x = VectorField::parse_planar(&chart0, "0", "1")?;
    let (yi, ye) = case.second();
    let y = VectorField::parse_planar(&chart0, yi, ye)?;
    let mut chain = Chain::new(chart0.clone());
    let k0 = coordinates_for(&x, None)?;
    chain.push(build_step(&chart0, &chart1, &k0, 0, 3)?)?;
    let ry = chain.restrict(&y, 1)?;
    if ry.status != Status::Point {
        return Err(Error::Internal(format!("Y does not restrict to a point field: {}", ry.display)));
    }
    let k1 = coordinates_for(&ry.field, None)?;
    chain.push(build_step(&chart1, &chart2, &k1, 1, 2)?)?;
    Ok(chain)
}

/// Rows of `sum_k u_k c_k = 0` over the rationals, from the numerators of
/// the `c_k` over a common denominator.
fn linear_rows(cs: &[Canon]) -> Result<Vec<Vec<Q>>> {
    let mut dens: Vec<&Poly> = Vec::new();
    for c in cs.iter().filter(|c| !c.is_zero()) {
        if !dens.contains(&&c.den) {
            dens.push(&c.den);
        }
    }
    if dens.is_empty() {
        return Ok(vec![]);
    }
    let common = Canon::reduce(dens.iter().fold(Poly::one(), |acc, d| acc.mul(d)), Poly::one());
    let mut grouped: BTreeMap<Mono, Vec<Q>> = BTreeMap::new();
    for (k, c) in cs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let t = c.mul(&common);
        if !t.has_unit_denominator() {
            return Err(Error::Internal("common denominator did not clear".into()));
        }
        let scale = Q::one() / t.den.as_constant().unwrap_or_else(Q::one);
        for (mono, coef) in &t.num.terms {
            grouped.entry(mono.clone()).or_insert_with(|| vec![Q::zero(); cs.len()])[k] += coef * &scale;
        }
    }
    Ok(grouped.into_values().collect())
}

impl DeterminingFamily {
    fn ansatz(&self, u: &[Canon], with_b: bool) -> Result<VectorField> {
        let chart = &self.chain.charts[0];
        let (r, s) = (Canon::symbol(&chart.independent), Canon::symbol(&chart.dependent));
        let mut a = Canon::zero();
        let mut b = Canon::zero();
        for ((which, i, j), coeff) in self.monomials.iter().zip(u) {
            let t = r.powi(*i as i64)?.mul(&s.powi(*j as i64)?).mul(coeff);
            if *which == 0 {
                a = a.add(&t);
            } else {
                b = b.add(&t);
            }
        }
        if with_b {
            b = b.add(&Canon::func("b", &[0], vec![r.clone()]));
        }
        VectorField::new(chart.base(), [(chart.independent.clone(), a), (chart.dependent.clone(), b)])
    }

    /// Family member with basis coefficients `k` and, in Case 1, a
    /// polynomial or symbolic `b(r)`.
    pub fn instantiate(&self, k: &[Q], b: Option<&Canon>) -> Result<VectorField> {
        let mut z = VectorField::zero(self.chain.charts[0].base());
        for (kk, f) in k.iter().zip(&self.basis) {
            z = z.add(&f.scale_q(kk))?;
        }
        if let (true, Some(b)) = (self.free_function, b) {
            let add = VectorField::new(z.vars.clone(), [(self.chain.charts[0].dependent.clone(), b.clone())])?;
            z = z.add(&add)?;
        }
        Ok(z)
    }

    /// General member with parameters `k1, k2, ...` (and `b(r)` when free).
    pub fn general(&self) -> Result<VectorField> {
        let mut z = VectorField::zero(self.chain.charts[0].base());
        for (i, f) in self.basis.iter().enumerate() {
            z = z.add(&f.scale(&Canon::symbol(&Symbol::new(format!("k{}", i + 1)))))?;
        }
        if self.free_function {
            let r = Canon::symbol(&self.chain.charts[0].independent);
            let add = VectorField::new(z.vars.clone(), [(self.chain.charts[0].dependent.clone(), Canon::func("b", &[0], vec![r]))])?;
            z = z.add(&add)?;
        }
        Ok(z)
    }

    /// Whether `Z` (possibly with symbolic parameters) belongs to the family.
    pub fn contains(&self, z: &VectorField) -> Result<bool> {
        let chart = &self.chain.charts[0];
        let (r, s) = (&chart.independent, &chart.dependent);
        if z.vars != chart.base() {
            return Err(Error::ChartMismatch(format!("family lives on ({r}, {s})")));
        }
        let mut coeffs = vec![Canon::zero(); self.monomials.len()];
        for (which, var) in [(0usize, r), (1usize, s)] {
            let mut c = z.coeff(var);
            if which == 1 && self.free_function {
                let at0 = c.substitute(&[(s.clone(), Canon::zero())].into())?;
                if at0.contains_symbol(s) {
                    return Ok(false);
                }
                c = c.sub(&at0);
            }
            if !c.den.as_constant().is_some() && (c.den.atoms().iter().any(|a| a.contains_symbol(r) || a.contains_symbol(s))) {
                return Ok(false);
            }
            let Some(by_r) = c.num.coefficients_in(r) else { return Ok(false) };
            let den = Canon::reduce(Poly::one(), c.den.clone());
            for (er, pr) in by_r {
                let Some(by_s) = pr.coefficients_in(s) else { return Ok(false) };
                for (es, ps) in by_s {
                    let Some(k) = self.monomials.iter().position(|m| {
                        m.0 == which && Q::from_integer(m.1.into()) == er && Q::from_integer(m.2.into()) == es
                    }) else {
                        return Ok(false);
                    };
                    coeffs[k] = Canon::from_poly(ps).mul(&den);
                }
            }
        }
        for row in &self.conditions {
            let mut acc = Canon::zero();
            for (q, c) in row.iter().zip(&coeffs) {
                acc = acc.add(&c.scale(q));
            }
            if !acc.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Restriction of `Z` to the chart after both reductions.
    pub fn restrict(&self, z: &VectorField) -> Result<Restricted> {
        self.chain.restrict(z, 2)
    }
}

/// Solves the determining system of a canonical case with a polynomial
/// ansatz of total degree `d` and, in Case 1, a free function `b(r)`.
pub fn solve_determining(case: Case, d: usize) -> Result<DeterminingFamily> {
    if d < 1 {
        return Err(Error::InvalidInput("degree bound must be positive".into()));
    }
    let chain = case_chain(case)?;
    let free_function = case == Case::Case1;
    let mut monomials = Vec::new();
    for which in 0..2 {
        for tot in 0..=d {
            for j in 0..=tot {
                if which == 1 && free_function && j == 0 {
                    continue;
                }
                monomials.push((which, tot - j, j));
            }
        }
    }
    let mut fam = DeterminingFamily { case, degree: d, monomials, conditions: vec![], basis: vec![], free_function, chain };
    let n = fam.monomials.len();
    // Restriction is linear in Z, so each ansatz monomial is restricted on
    // its own and the conditions are assembled column by column.
    let chart2 = fam.chain.charts[2].clone();
    let mut watched: Vec<Symbol> = (0..2).map(eliminated_symbol).collect();
    watched.extend(chart2.with_order(4).derivative_symbols());
    let mut columns: Vec<Vec<Canon>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut e = vec![Canon::zero(); n];
        e[k] = Canon::one();
        let rz = fam.restrict(&fam.ansatz(&e, false)?)?;
        let mut col = Vec::new();
        for v in chart2.base() {
            let c = rz.field.coeff(&v);
            col.extend(watched.iter().map(|w| c.diff(w)));
        }
        columns.push(col);
    }
    if free_function {
        let rb = fam.restrict(&fam.ansatz(&vec![Canon::zero(); n], true)?)?;
        if rb.status != Status::Point {
            return Err(Error::Internal(format!("free function does not restrict to a point field: {}", rb.display)));
        }
    }
    let mut rows = Vec::new();
    for i in 0..columns.first().map(Vec::len).unwrap_or(0) {
        rows.extend(linear_rows(&columns.iter().map(|c| c[i].clone()).collect::<Vec<_>>())?);
    }
    let mut m = rows;
    crate::linalg::rref(&mut m);
    let basis = crate::linalg::nullspace(&m, n)
        .iter()
        .map(|v| fam.ansatz(&v.iter().map(|q| Canon::constant(q.clone())).collect::<Vec<_>>(), false))
        .collect::<Result<Vec<_>>>()?;
    fam.conditions = m;
    fam.basis = basis;
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::qi;
    use crate::liealg::{standard, NamedAlgebra};
    use crate::parse::parse;

    fn c(t: &str) -> Canon {
        Canon::from_expr(&parse(t).unwrap()).unwrap()
    }

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// `[U,Y] = X`, `[U,Z] = 2Y`.
    fn a41() -> LieAlgebra {
        LieAlgebra::new(labels(&["U", "X", "Y", "Z"]), &[(0, 2, 1, qi(1)), (0, 3, 2, qi(2))]).unwrap()
    }

    #[test]
    fn a36_path() {
        let l = standard(&NamedAlgebra::A3_6).unwrap();
        let path = labels(&["e1", "e2"]);
        let st = predict_status(&l, &path, "e3").unwrap();
        assert_eq!(st, vec![StepStatus::Point, StepStatus::Nonlocal, StepStatus::Point]);
        assert_eq!(convertible_order(&l, &path, "e3").unwrap(), ConvertibleOrder::Order(1));
        assert!(convertible_order(&l, &path, "e1").is_err());
        let plans = plan_paths(&l).unwrap();
        assert!(plans[0].feasible);
        let p = plans.iter().find(|p| p.path == labels(&["e1", "e2", "e3"])).unwrap();
        assert!(p.feasible);
        assert_eq!(p.statuses[3]["e1"], StepStatus::Used);
    }

    #[test]
    fn a41_orders() {
        let l = a41();
        let path = labels(&["e4"]);
        assert!(predict_status(&l, &path, "e1").is_err());
        let st = predict_status(&l, &labels(&["U", "X", "Y"]), "Z").unwrap();
        assert_eq!(st[1], StepStatus::Nonlocal);
        assert_eq!(st[3], StepStatus::Point);
        let p = predict_path(&l, &labels(&["U", "X", "Y", "Z"])).unwrap();
        assert!(p.feasible);
        assert_eq!(p.orders["Z"], ConvertibleOrder::Order(2));
        assert_eq!(p.orders["Y"], ConvertibleOrder::Order(1));
    }

    #[test]
    fn abelian_has_no_hidden() {
        let l = LieAlgebra::new(labels(&["a", "b"]), &[]).unwrap();
        let plans = plan_paths(&l).unwrap();
        assert_eq!(plans.len(), 2);
        assert!(plans.iter().all(|p| p.feasible && p.orders.values().all(|o| *o == ConvertibleOrder::NotHidden)));
        assert_eq!(predict_status(&l, &[], "a").unwrap(), vec![StepStatus::Point]);
    }

    fn rs() -> Chart {
        Chart::new("r", "s", 0)
    }

    fn f(xi: &str, eta: &str) -> VectorField {
        VectorField::parse_planar(&rs(), xi, eta).unwrap()
    }

    #[test]
    fn case1_decomposition() {
        let (x, y) = (f("0", "1"), f("0", "r"));
        let z = f("c1*r^2 + c3*r + c4", "(c1*r + c2)*s + b(r)");
        let d = decompose(&x, &y, &z).unwrap();
        assert_eq!(d.case, Case::Case1);
        assert_eq!(d.zstar, f("c1*r^2", "c1*r*s"));
        assert_eq!(d.z0, f("c3*r + c4", "c2*s + b(r)"));
        assert_eq!(d.params["b"], c("b(r)"));
        let z = f("r^2", "r*s");
        let d = decompose(&x, &y, &z).unwrap();
        assert!(d.z0.is_zero());
        assert!(decompose(&x, &y, &f("r^3", "0")).is_err());
    }

    #[test]
    fn cases_2_to_4() {
        let x = f("0", "1");
        let d = decompose(&x, &f("1", "0"), &f("s + 2*r", "3*r + s")).unwrap();
        assert_eq!(d.zstar, f("s", "0"));
        assert_eq!(d.normalized["alpha"], c("2"));
        let d = decompose(&x, &f("r", "0"), &f("0", "a*r + b")).unwrap();
        assert!(d.zstar.is_zero());
        let d = decompose(&x, &f("0", "s"), &f("a", "b*r + g")).unwrap();
        assert!(d.zstar.is_zero());
        assert!(decompose(&x, &f("r", "0"), &f("0", "s")).is_err());
    }

    #[test]
    fn jacobi_obstruction_forces_lambda() {
        let a = jacobi_obstruction();
        assert!(a.vanishes_at_lambda_zero);
        assert!(a.forces_lambda_zero);
        let r = jacobi_obstruction_residue(&c("lambda"), &c("b"), &c("c"), &c("d"));
        assert_eq!(r[0], c("lambda*d"));
        assert_eq!(r[1], c("-lambda"));
        assert!(r[2].is_zero());
    }

    #[test]
    fn case1_determining_family() {
        let fam = solve_determining(Case::Case1, 2).unwrap();
        assert!(fam.free_function);
        assert_eq!(fam.basis.len(), 4);
        assert!(fam.contains(&f("c1*r^2 + c3*r + c4", "(c1*r + c2)*s + b(r)")).unwrap());
        assert!(!fam.contains(&f("r^2", "0")).unwrap());
        let z = f("c1*r^2 + c3*r + c4", "(c1*r + c2)*s + b(r)");
        let rz = fam.restrict(&z).unwrap();
        assert_eq!(rz.status, Status::Point);
        let w = Symbol::new("w");
        assert_eq!(rz.field.coeff(&w), c("b''(r) + (c2 - 2*c3 - 3*c1*r)*w"));
        let wider = solve_determining(Case::Case1, 4).unwrap();
        assert_eq!(wider.basis.len(), 4);
    }

    #[test]
    fn cases_2_to_4_determining() {
        let fam = solve_determining(Case::Case2, 1).unwrap();
        assert!(fam.contains(&f("c1*s + c2*r + c3", "(c1 - c4)*r + c5*s + c6")).unwrap());
        // (∂s, r∂r) commute with a nonzero pseudo-scalar product, so rs∂r
        // plays the part of s∂r in the second case; r∂s loses point
        // character after the second reduction.
        let fam = solve_determining(Case::Case3, 2).unwrap();
        assert!(fam.contains(&f("a*r*s + k*r", "b + g*s")).unwrap());
        assert!(!fam.contains(&f("0", "r")).unwrap());
        let fam = solve_determining(Case::Case4, 2).unwrap();
        assert!(fam.contains(&f("a + k*r^2", "g")).unwrap());
        assert!(!fam.contains(&f("0", "r")).unwrap());
    }

    #[test]
    fn second_worked_triple() {
        let x = f("0", "1");
        let y = f("0", "r");
        let z = f("r^2", "r*s");
        let rep = verify_convertible_conditions(&x, &y, &z).unwrap();
        assert_eq!(rep.gamma, Some(qi(0)));
        assert_eq!(rep.beta_alpha, Some((qi(0), qi(0))));
        assert!(rep.conditions[..3].iter().all(|c| c.holds));
    }
}
