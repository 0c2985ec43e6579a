//! Vector fields on coordinate charts: commutators, prolongation, symmetry
//! tests, span solving, pair classification and canonical coordinates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::calculus::{exp_of, integrate};
use crate::error::{Error, Result};
use crate::expr::{Expr, Symbol, Q};
use crate::linalg;
use crate::poly::{Atom, Canon};

/// An independent variable, a dependent variable and its derivative
/// symbols `y', y'', ...` up to `order`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Chart {
    pub independent: Symbol,
    pub dependent: Symbol,
    #[serde(default)]
    pub order: usize,
}

impl Chart {
    pub fn new(independent: &str, dependent: &str, order: usize) -> Self {
        Chart { independent: Symbol::new(independent), dependent: Symbol::new(dependent), order }
    }

    pub fn with_order(&self, order: usize) -> Chart {
        Chart { order, ..self.clone() }
    }

    /// `y^(k)`; `k = 0` is the dependent variable itself.
    pub fn derivative(&self, k: usize) -> Symbol {
        self.dependent.derivative(k)
    }

    pub fn derivative_symbols(&self) -> Vec<Symbol> {
        (1..=self.order).map(|k| self.derivative(k)).collect()
    }

    pub fn base(&self) -> Vec<Symbol> {
        vec![self.independent.clone(), self.dependent.clone()]
    }

    /// Base symbols followed by derivative symbols.
    pub fn jet(&self) -> Vec<Symbol> {
        let mut v = self.base();
        v.extend(self.derivative_symbols());
        v
    }

    /// Total derivative `D_x f` for `f` depending on jet variables up to
    /// order `upto`.
    pub fn total_derivative(&self, f: &Canon, upto: usize) -> Canon {
        let mut acc = f.diff(&self.independent);
        for k in 0..=upto {
            let yk = self.derivative(k);
            if !f.contains_symbol(&yk) {
                continue;
            }
            let next = Canon::symbol(&self.derivative(k + 1));
            acc = acc.add(&f.diff(&yk).mul(&next));
        }
        acc
    }

    /// Highest derivative order of the dependent variable appearing in `f`.
    pub fn jet_order_of(&self, f: &Canon) -> usize {
        let mut k = 0;
        let names: BTreeSet<Symbol> = f.to_expr().free_symbols().symbols;
        for s in names {
            if let Some(rest) = s.as_str().strip_prefix(self.dependent.as_str()) {
                if !rest.is_empty() && rest.chars().all(|c| c == '\'') {
                    k = k.max(rest.len());
                }
            }
        }
        k
    }
}

/// `y^(n) = rhs` on a chart whose order is `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeEquation {
    pub chart: Chart,
    pub rhs: Canon,
}

impl OdeEquation {
    pub fn new(chart: Chart, rhs: Canon) -> Result<Self> {
        let n = chart.order;
        if n == 0 {
            return Err(Error::InvalidInput("equation order must be positive".into()));
        }
        if chart.jet_order_of(&rhs) >= n {
            return Err(Error::InvalidInput(format!("right-hand side involves derivatives of order >= {n}")));
        }
        Ok(OdeEquation { chart, rhs })
    }

    pub fn order(&self) -> usize {
        self.chart.order
    }

    pub fn top(&self) -> Symbol {
        self.chart.derivative(self.chart.order)
    }

    /// `lhs = rhs` as a display string.
    pub fn display(&self) -> String {
        format!("{} = {}", self.top(), self.rhs.to_expr())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorField {
    pub vars: Vec<Symbol>,
    pub coeffs: BTreeMap<Symbol, Canon>,
}

impl VectorField {
    pub fn new(vars: Vec<Symbol>, coeffs: impl IntoIterator<Item = (Symbol, Canon)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (s, c) in coeffs {
            if !vars.contains(&s) {
                return Err(Error::ChartMismatch(format!("`{s}` is not a chart coordinate")));
            }
            if !c.is_zero() {
                map.insert(s, c);
            }
        }
        Ok(VectorField { vars, coeffs: map })
    }

    /// `xi ∂_x + eta ∂_y` on a chart's base.
    pub fn planar(chart: &Chart, xi: Canon, eta: Canon) -> VectorField {
        VectorField::new(chart.base(), [(chart.independent.clone(), xi), (chart.dependent.clone(), eta)]).unwrap()
    }

    /// Parses `xi` and `eta` strings.
    pub fn parse_planar(chart: &Chart, xi: &str, eta: &str) -> Result<VectorField> {
        let xi = Canon::from_expr(&crate::parse::parse(xi)?)?;
        let eta = Canon::from_expr(&crate::parse::parse(eta)?)?;
        Ok(VectorField::planar(chart, xi, eta))
    }

    pub fn zero(vars: Vec<Symbol>) -> Self {
        VectorField { vars, coeffs: BTreeMap::new() }
    }

    pub fn coeff(&self, s: &Symbol) -> Canon {
        self.coeffs.get(s).cloned().unwrap_or_else(Canon::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `X(f) = sum coeff_s * df/ds`.
    pub fn apply(&self, f: &Canon) -> Canon {
        let mut acc = Canon::zero();
        for (s, c) in &self.coeffs {
            if f.contains_symbol(s) {
                acc = acc.add(&c.mul(&f.diff(s)));
            }
        }
        acc
    }

    fn check_same(&self, o: &VectorField) -> Result<()> {
        if self.vars != o.vars {
            return Err(Error::ChartMismatch(format!("{:?} vs {:?}", names(&self.vars), names(&o.vars))));
        }
        Ok(())
    }

    pub fn add(&self, o: &VectorField) -> Result<VectorField> {
        self.check_same(o)?;
        let mut out = self.clone();
        for (s, c) in &o.coeffs {
            let v = out.coeff(s).add(c);
            if v.is_zero() {
                out.coeffs.remove(s);
            } else {
                out.coeffs.insert(s.clone(), v);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Canon) -> VectorField {
        let coeffs = self.coeffs.iter().map(|(s, c)| (s.clone(), c.mul(k))).filter(|(_, c)| !c.is_zero()).collect();
        VectorField { vars: self.vars.clone(), coeffs }
    }

    pub fn scale_q(&self, k: &Q) -> VectorField {
        self.scale(&Canon::constant(k.clone()))
    }

    pub fn sub(&self, o: &VectorField) -> Result<VectorField> {
        self.add(&o.scale_q(&-Q::one()))
    }

    /// Whether every coefficient depends only on chart coordinates and no
    /// integral atoms occur.
    pub fn is_point(&self) -> bool {
        self.coeffs.values().all(|c| {
            let fs = c.to_expr().free_symbols();
            !fs.has_integral && fs.symbols.iter().all(|s| self.vars.contains(s) || !looks_like_coordinate(s))
        })
    }

    /// Drops all coordinates beyond the first `n`.
    pub fn truncate(&self, n: usize) -> VectorField {
        let vars: Vec<Symbol> = self.vars[..n].to_vec();
        let coeffs = self.coeffs.iter().filter(|(s, _)| vars.contains(s)).map(|(s, c)| (s.clone(), c.clone())).collect();
        VectorField { vars, coeffs }
    }

    /// Coefficients as grammar strings, in chart order.
    pub fn coefficient_strings(&self) -> Vec<(String, String)> {
        self.vars.iter().map(|s| (s.to_string(), self.coeff(s).to_expr().to_string())).collect()
    }
}

/// Symbols with a leading underscore are engine-generated coordinates.
fn looks_like_coordinate(s: &Symbol) -> bool {
    s.as_str().starts_with('_')
}

fn names(v: &[Symbol]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for s in &self.vars {
            let Some(c) = self.coeffs.get(s) else { continue };
            let e = c.to_expr();
            let t = match &e {
                Expr::Num(v) if v.is_one() => format!("D[{s}]"),
                Expr::Num(v) if (-v).is_one() => format!("-D[{s}]"),
                Expr::Add(_) => format!("({e})*D[{s}]"),
                _ => format!("{e}*D[{s}]"),
            };
            match (first, t.strip_prefix('-')) {
                (true, _) => f.write_str(&t)?,
                (false, Some(rest)) => write!(f, " - {rest}")?,
                (false, None) => write!(f, " + {t}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// `[X, Y]` with components `X(eta_Y) - Y(eta_X)`.
pub fn commutator(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    x.check_same(y)?;
    let mut coeffs = Vec::new();
    for s in &x.vars {
        let c = x.apply(&y.coeff(s)).sub(&y.apply(&x.coeff(s)));
        coeffs.push((s.clone(), c));
    }
    VectorField::new(x.vars.clone(), coeffs)
}

/// `X ∨ Y = xi1 eta2 - xi2 eta1` for planar fields.
pub fn pseudo_scalar(x: &VectorField, y: &VectorField) -> Result<Canon> {
    x.check_same(y)?;
    if x.vars.len() != 2 {
        return Err(Error::ChartMismatch("pseudo-scalar product needs a two-dimensional chart".into()));
    }
    let (a, b) = (&x.vars[0], &x.vars[1]);
    Ok(x.coeff(a).mul(&y.coeff(b)).sub(&x.coeff(b).mul(&y.coeff(a))))
}

/// Linear system from `target - sum a_j basis_j = 0` after clearing
/// denominators componentwise; each row is one monomial coefficient.
fn span_system(target: &VectorField, basis: &[VectorField]) -> Result<(linalg::Matrix, Vec<Q>)> {
    for b in basis {
        target.check_same(b)?;
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for s in &target.vars {
        let mut comps = vec![target.coeff(s)];
        comps.extend(basis.iter().map(|b| b.coeff(s)));
        if comps.iter().all(Canon::is_zero) {
            continue;
        }
        let dens: BTreeSet<_> = comps.iter().map(|c| c.den.clone()).collect();
        let mut l = Canon::one();
        for d in dens {
            l = l.mul(&Canon::from_poly(d));
        }
        let polys: Vec<Canon> = comps.iter().map(|c| c.mul(&l)).collect();
        let monos: BTreeSet<_> = polys.iter().flat_map(|p| p.num.terms.keys().cloned()).collect();
        for m in monos {
            let get = |p: &Canon| {
                debug_assert!(p.has_unit_denominator());
                p.num.terms.get(&m).cloned().unwrap_or_else(Q::zero)
            };
            rows.push(polys[1..].iter().map(get).collect());
            rhs.push(get(&polys[0]));
        }
    }
    Ok((rows, rhs))
}

/// Rational constants `a` with `target = sum a_j basis_j`, if they exist.
pub fn span_coefficients(target: &VectorField, basis: &[VectorField]) -> Result<Option<Vec<Q>>> {
    if target.is_zero() {
        return Ok(Some(vec![Q::zero(); basis.len()]));
    }
    if basis.is_empty() {
        return Ok(None);
    }
    let (rows, rhs) = span_system(target, basis)?;
    Ok(linalg::solve(&rows, &rhs, basis.len()))
}

/// Prolongation to order `k` on `chart`:
/// `eta^(j) = D_x eta^(j-1) - y^(j) D_x xi`.
pub fn prolong(x: &VectorField, chart: &Chart, k: usize) -> Result<VectorField> {
    let base = chart.base();
    if x.vars[..2.min(x.vars.len())] != base[..] {
        return Err(Error::ChartMismatch(format!("field on {:?}, chart {:?}", names(&x.vars), names(&base))));
    }
    let jet = chart.with_order(k).jet();
    let xi = x.coeff(&chart.independent);
    let dxi = chart.total_derivative(&xi, 0);
    let mut coeffs = vec![(chart.independent.clone(), xi), (chart.dependent.clone(), x.coeff(&chart.dependent))];
    let mut prev = x.coeff(&chart.dependent);
    for j in 1..=k {
        let yj = Canon::symbol(&chart.derivative(j));
        let next = chart.total_derivative(&prev, j - 1).sub(&yj.mul(&dxi));
        coeffs.push((chart.derivative(j), next.clone()));
        prev = next;
    }
    VectorField::new(jet, coeffs)
}

/// Linearized symmetry condition on the solution manifold.
pub fn is_symmetry(x: &VectorField, eq: &OdeEquation) -> Result<bool> {
    Ok(symmetry_residue(x, eq)?.is_zero())
}

/// `X^(n)(y^(n) - rhs)` with `y^(n) = rhs` substituted.
pub fn symmetry_residue(x: &VectorField, eq: &OdeEquation) -> Result<Canon> {
    let n = eq.order();
    let p = prolong(x, &eq.chart, n)?;
    let top = eq.top();
    let f = Canon::symbol(&top).sub(&eq.rhs);
    let r = p.apply(&f);
    r.substitute(&[(top, eq.rhs.clone())].into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairType {
    I,
    II,
    III,
    IV,
    NotL2,
}

impl fmt::Display for PairType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PairType::I => "I",
            PairType::II => "II",
            PairType::III => "III",
            PairType::IV => "IV",
            PairType::NotL2 => "NotL2",
        };
        write!(f, "{s}")
    }
}

/// Table of two-dimensional algebras: keyed by whether the pair commutes
/// and whether the pseudo-scalar product vanishes. Closure is tested with
/// constant coefficients.
pub fn classify_pair(x: &VectorField, y: &VectorField) -> Result<PairType> {
    if x.is_zero() || y.is_zero() {
        return Err(Error::InvalidInput("zero field in pair".into()));
    }
    let c = commutator(x, y)?;
    let abelian = c.is_zero();
    if !abelian && span_coefficients(&c, &[x.clone(), y.clone()])?.is_none() {
        return Ok(PairType::NotL2);
    }
    let degenerate = pseudo_scalar(x, y)?.is_zero();
    Ok(match (abelian, degenerate) {
        (true, true) => PairType::I,
        (true, false) => PairType::II,
        (false, true) => PairType::III,
        (false, false) => PairType::IV,
    })
}

/// How the canonical coordinates were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordinateMethod {
    /// `xi = 0`: `r = x`, `s = ∫dy/eta`.
    Vertical,
    /// `eta = 0`: `r = y`, `s = ∫dx/xi`; the roles of the variables swap.
    Swap,
    /// Characteristic equation linear in the dependent variable.
    Linear,
    User,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Coordinates {
    pub r: Canon,
    pub s: Canon,
    pub method: CoordinateMethod,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CanonicalCoordinates {
    Found(Coordinates),
    NeedsUserInput(String),
}

/// Checks `X r = 0` and `X s = 1`.
pub fn verify_coordinates(x: &VectorField, r: &Canon, s: &Canon) -> Result<()> {
    let xr = x.apply(r);
    if !xr.is_zero() {
        return Err(Error::Coordinates(format!("X({}) = {} instead of 0", r.to_expr(), xr.to_expr())));
    }
    let xs = x.apply(s);
    if xs != Canon::one() {
        return Err(Error::Coordinates(format!("X({}) = {} instead of 1", s.to_expr(), xs.to_expr())));
    }
    if r.diff(&x.vars[0]).mul(&s.diff(&x.vars[1])).sub(&r.diff(&x.vars[1]).mul(&s.diff(&x.vars[0]))).is_zero() {
        return Err(Error::Coordinates("coordinates are functionally dependent".into()));
    }
    Ok(())
}

/// Canonical coordinates for a planar point field, from the integration
/// catalog; the result is verified before it is returned.
pub fn canonical_coordinates(x: &VectorField) -> Result<CanonicalCoordinates> {
    if x.vars.len() != 2 || x.is_zero() {
        return Err(Error::InvalidInput("canonical coordinates need a nonzero planar field".into()));
    }
    let (xs, ys) = (&x.vars[0], &x.vars[1]);
    let xi = x.coeff(xs);
    let eta = x.coeff(ys);
    let need = |m: &str| Ok(CanonicalCoordinates::NeedsUserInput(m.to_string()));
    let found = if xi.is_zero() {
        let inv = eta.recip()?;
        let Some(s) = integrate(&inv, ys) else { return need("cannot integrate dy/eta") };
        Coordinates { r: Canon::symbol(xs), s, method: CoordinateMethod::Vertical }
    } else if eta.is_zero() {
        let inv = xi.recip()?;
        let Some(s) = integrate(&inv, xs) else { return need("cannot integrate dx/xi") };
        Coordinates { r: Canon::symbol(ys), s, method: CoordinateMethod::Swap }
    } else {
        if xi.contains_symbol(ys) {
            return need("xi depends on the dependent variable");
        }
        let ratio = eta.div(&xi)?;
        // ratio = a(x) y + b(x)
        let a = ratio.diff(ys);
        if a.contains_symbol(ys) {
            return need("characteristic equation is not linear");
        }
        let b = ratio.sub(&a.mul(&Canon::symbol(ys)));
        let Some(big_a) = integrate(&a, xs) else { return need("cannot integrate the linear coefficient") };
        let e = exp_of(&big_a.neg());
        let mut r = Canon::symbol(ys).mul(&e);
        if b.is_zero() {
            r = normalize_power(&r, &big_a)?;
        } else {
            let Some(t) = integrate(&b.mul(&e), xs) else { return need("cannot integrate the inhomogeneous term") };
            r = r.sub(&t);
        }
        let Some(s) = integrate(&xi.recip()?, xs) else { return need("cannot integrate dx/xi") };
        Coordinates { r, s, method: CoordinateMethod::Linear }
    };
    verify_coordinates(x, &found.r, &found.s)?;
    Ok(CanonicalCoordinates::Found(found))
}

/// For a product invariant `y * prod u_i^(c_i)`, raises it to `1/g` where
/// `g` is the gcd of the fractional exponents on non-monomial factors, so
/// `w (1+r^2)^(3/2)` becomes `w^(2/3) (1+r^2)`.
fn normalize_power(r: &Canon, a: &Canon) -> Result<Canon> {
    let mut fracs: Vec<Q> = Vec::new();
    for (m, c) in &a.num.terms {
        if let Some((Atom::Func(f), e)) = (m.len() == 1).then(|| m.iter().next().unwrap()) {
            if f.name == "ln" && e.is_one() {
                let u = Canon::from_expr(&f.args[0])?;
                if !u.num.is_single_term() && !c.is_integer() {
                    fracs.push(c.clone());
                }
            }
        }
    }
    if fracs.is_empty() || !a.has_unit_denominator() {
        return Ok(r.clone());
    }
    let g = fracs.iter().skip(1).fold(fracs[0].clone(), |g, v| rational_gcd(&g, v));
    r.pow(&(Q::one() / g.abs()))
}

fn rational_gcd(a: &Q, b: &Q) -> Q {
    use num_integer::Integer;
    let n = a.numer().gcd(b.numer());
    let d = a.denom().lcm(b.denom());
    Q::new(n, d)
}

/// `(F(r), s + G(r))` for a function `F` with nonzero derivative; `F` and
/// `G` are given as expressions in `var`.
pub fn recanonicalize(
    x: &VectorField,
    coords: &Coordinates,
    var: &Symbol,
    f: &Canon,
    g: &Canon,
) -> Result<Coordinates> {
    if f.diff(var).is_zero() {
        return Err(Error::Coordinates("F'(r) vanishes identically".into()));
    }
    let bind: BTreeMap<Symbol, Canon> = [(var.clone(), coords.r.clone())].into();
    let r = f.substitute(&bind)?;
    let s = coords.s.add(&g.substitute(&bind)?);
    verify_coordinates(x, &r, &s)?;
    Ok(Coordinates { r, s, method: coords.method })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn c(t: &str) -> Canon {
        Canon::from_expr(&parse(t).unwrap()).unwrap()
    }
    fn f(chart: &Chart, xi: &str, eta: &str) -> VectorField {
        VectorField::parse_planar(chart, xi, eta).unwrap()
    }
    fn rs() -> Chart {
        Chart::new("r", "s", 0)
    }
    fn xy() -> Chart {
        Chart::new("x", "y", 0)
    }

    #[test]
    fn commutators() {
        let ch = rs();
        assert!(commutator(&f(&ch, "0", "1"), &f(&ch, "0", "r")).unwrap().is_zero());
        let z = f(&ch, "r^2+1", "r*s");
        assert_eq!(commutator(&f(&ch, "0", "1"), &z).unwrap(), f(&ch, "0", "r"));
        let ch = xy();
        assert_eq!(commutator(&f(&ch, "0", "x"), &f(&ch, "1", "0")).unwrap(), f(&ch, "0", "-1"));
    }

    #[test]
    fn pseudo_scalar_products() {
        let ch = rs();
        assert!(pseudo_scalar(&f(&ch, "0", "1"), &f(&ch, "0", "r")).unwrap().is_zero());
        assert_eq!(pseudo_scalar(&f(&ch, "0", "1"), &f(&ch, "1", "0")).unwrap(), Canon::int(-1));
        assert!(pseudo_scalar(&f(&ch, "0", "1"), &f(&ch, "0", "s")).unwrap().is_zero());
    }

    #[test]
    fn table_rows() {
        let ch = rs();
        let x = f(&ch, "0", "1");
        assert_eq!(classify_pair(&x, &f(&ch, "0", "r")).unwrap(), PairType::I);
        assert_eq!(classify_pair(&x, &f(&ch, "1", "0")).unwrap(), PairType::II);
        assert_eq!(classify_pair(&x, &f(&ch, "0", "s")).unwrap(), PairType::III);
        assert_eq!(classify_pair(&x, &f(&ch, "r", "s")).unwrap(), PairType::IV);
        let ch = xy();
        assert_eq!(classify_pair(&f(&ch, "0", "1"), &f(&ch, "0", "x")).unwrap(), PairType::I);
        assert_eq!(classify_pair(&f(&ch, "1", "0"), &f(&ch, "0", "x^2")).unwrap(), PairType::NotL2);
    }

    #[test]
    fn first_prolongations() {
        let ch = Chart::new("r", "s", 1);
        let z = VectorField::planar(&ch, Canon::func("A", &[0, 0], vec![c("r"), c("s")]), Canon::func("B", &[0, 0], vec![c("r"), c("s")]));
        let p = prolong(&z, &ch, 1).unwrap();
        let expect = "B{1,0}(r,s) + (B{0,1}(r,s) - A{1,0}(r,s))*s' - A{0,1}(r,s)*s'^2";
        assert_eq!(p.coeff(&Symbol::new("s'")), c(expect));
        let xy1 = Chart::new("x", "y", 1);
        let p = prolong(&f(&xy1, "x^2", "x*y"), &xy1, 1).unwrap();
        assert_eq!(p.coeff(&Symbol::new("y'")), c("y - x*y'"));
        let p = prolong(&f(&xy1, "0", "1"), &xy1, 3).unwrap();
        assert_eq!(p.coeffs.len(), 1);
    }

    #[test]
    fn symmetry_checks() {
        let ch = Chart::new("r", "w", 1);
        let eq = OdeEquation::new(ch.clone(), c("-3*w/r - r*w^2")).unwrap();
        assert!(is_symmetry(&f(&ch, "r^2", "-3*r*w"), &eq).unwrap());
        assert!(!is_symmetry(&f(&ch, "1", "0"), &eq).unwrap());
        let ch = Chart::new("x", "y", 3);
        let eq = OdeEquation::new(ch.clone(), c("-3*y''/x - x*y''^2")).unwrap();
        assert!(is_symmetry(&f(&ch, "x^2", "x*y"), &eq).unwrap());
        assert!(is_symmetry(&f(&ch, "0", "x"), &eq).unwrap());
    }

    #[test]
    fn coordinates_from_catalog() {
        let ch = xy();
        let get = |x: &VectorField| match canonical_coordinates(x).unwrap() {
            CanonicalCoordinates::Found(k) => k,
            other => panic!("{other:?}"),
        };
        let k = get(&f(&ch, "0", "x"));
        assert_eq!((k.r, k.s), (c("x"), c("y/x")));
        let k = get(&f(&ch, "0", "1"));
        assert_eq!((k.r, k.s), (c("x"), c("y")));
        let ch = Chart::new("r", "w", 0);
        let k = get(&f(&ch, "r^2", "-3*r*w"));
        assert_eq!((k.r, k.s), (c("r^3*w"), c("-1/r")));
        let k = get(&f(&ch, "r^2+1", "-3*r*w"));
        assert_eq!((k.r, k.s), (c("w^(2/3)*(1+r^2)"), c("arctan(r)")));
        let k = get(&f(&Chart::new("x", "y", 0), "1", "0"));
        assert_eq!(k.method, CoordinateMethod::Swap);
    }

    #[test]
    fn recanonicalization() {
        let ch = Chart::new("r", "s", 0);
        let x = f(&ch, "0", "1");
        let base = Coordinates { r: c("r"), s: c("s"), method: CoordinateMethod::User };
        let v = Symbol::new("t");
        let k = recanonicalize(&x, &base, &v, &c("arctan(t)"), &Canon::zero()).unwrap();
        assert_eq!(k.r, c("arctan(r)"));
        let k = recanonicalize(&x, &base, &v, &c("-1/t"), &Canon::zero()).unwrap();
        assert_eq!(k.r, c("-1/r"));
        assert!(recanonicalize(&x, &base, &v, &c("5"), &Canon::zero()).is_err());
    }
}
