//! Canonical normal form: rational functions over the rationals in opaque
//! atoms.
//!
//! Atoms are symbols, function applications (with normalized arguments),
//! unevaluated integrals and radicals of polynomials. Monomials carry exact
//! rational exponents, so `w^(2/3) * w = w^(5/3)` is plain monomial
//! arithmetic. A [`Canon`] is `num / den` with
//!
//! * no atom dividing every term of both `num` and `den` (monomial content
//!   cleared, all exponents non-negative),
//! * `gcd(num, den) = 1`,
//! * `den` monic under the monomial order,
//! * radical exponents reduced into `(0, 1)`.
//!
//! These make the form unique, so structural equality of two `Canon`s is
//! equality of the expressions they denote.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expr::{qi, Expr, Func, Symbol, Q};
use crate::gcd::{self, IPoly};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Sym(Symbol),
    Func(Func),
    Int(Box<Expr>, Symbol),
    /// Radical base: a monic squarefree polynomial with at least two terms,
    /// or a rational constant that is not an exact power.
    Root(Box<Expr>),
}

impl Atom {
    pub fn to_expr(&self) -> Expr {
        match self {
            Atom::Sym(s) => Expr::Sym(s.clone()),
            Atom::Func(f) => Expr::Func(f.clone()),
            Atom::Int(g, v) => Expr::Int(g.clone(), v.clone()),
            Atom::Root(b) => (**b).clone(),
        }
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.to_expr().contains_symbol(s)
    }
}

pub type Mono = BTreeMap<Atom, Q>;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Q>,
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut m = a.clone();
    for (at, e) in b {
        let entry = m.entry(at.clone()).or_insert_with(Q::zero);
        *entry += e;
        if entry.is_zero() {
            m.remove(at);
        }
    }
    m
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Poly::zero();
        p.add_term(Mono::new(), c);
        p
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn atom(a: Atom, e: Q) -> Self {
        let mut m = Mono::new();
        if !e.is_zero() {
            m.insert(a, e);
        }
        let mut p = Poly::zero();
        p.add_term(m, Q::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul_mono(&self, m: &Mono, c: &Q) -> Poly {
        let mut r = Poly::zero();
        for (m2, c2) in &self.terms {
            r.add_term(mono_mul(m, m2), c * c2);
        }
        r
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(mono_mul(m1, m2), c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut r = Poly::one();
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms.keys().flat_map(|m| m.keys().cloned()).collect()
    }

    /// Leading rational coefficient (greatest monomial).
    pub fn lead_coeff(&self) -> Q {
        self.terms.values().next_back().cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_single_term(&self) -> bool {
        self.terms.len() == 1
    }

    fn min_exponent(&self, a: &Atom) -> Q {
        self.terms.keys().map(|m| m.get(a).cloned().unwrap_or_else(Q::zero)).min().unwrap_or_else(Q::zero)
    }

    fn to_expr(&self) -> Expr {
        let terms: Vec<Expr> = self.terms.iter().rev().map(|(m, c)| term_expr(m, c)).collect();
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => Expr::Add(terms),
        }
    }

    /// Coefficients with respect to symbol `x`, as a map from the exponent of
    /// `x` to the remaining polynomial. Fails when some other atom involves
    /// `x` (a function of `x`, say).
    pub fn coefficients_in(&self, x: &Symbol) -> Option<BTreeMap<Q, Poly>> {
        let xa = Atom::Sym(x.clone());
        let mut out: BTreeMap<Q, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let e = rest.remove(&xa).unwrap_or_else(Q::zero);
            if rest.keys().any(|a| a.contains_symbol(x)) {
                return None;
            }
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        Some(out)
    }
}

fn factor_expr(a: &Atom, e: &Q) -> Expr {
    match a {
        Atom::Root(_) => a.to_expr().pow(e.clone()),
        _ if e.is_one() => a.to_expr(),
        _ => a.to_expr().pow(e.clone()),
    }
}

fn term_expr(m: &Mono, c: &Q) -> Expr {
    let mut fs = Vec::new();
    if !c.is_one() || m.is_empty() {
        fs.push(Expr::Num(c.clone()));
    }
    for (a, e) in m {
        fs.push(factor_expr(a, e));
    }
    if fs.len() == 1 {
        fs.pop().unwrap()
    } else {
        Expr::Mul(fs)
    }
}

/// Canonical rational function. See the module docs for the invariants.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Canon {
    pub num: Poly,
    pub den: Poly,
}

impl Canon {
    pub fn zero() -> Self {
        Canon { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Canon::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Canon { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn int(n: i64) -> Self {
        Canon::constant(qi(n))
    }

    pub fn symbol(s: &Symbol) -> Self {
        Canon { num: Poly::atom(Atom::Sym(s.clone()), Q::one()), den: Poly::one() }
    }

    fn from_atom(a: Atom, e: Q) -> Canon {
        Canon::reduce(Poly::atom(a, e), Poly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn has_unit_denominator(&self) -> bool {
        self.den.is_one()
    }

    pub fn from_expr(e: &Expr) -> Result<Canon> {
        match e {
            Expr::Num(v) => Ok(Canon::constant(v.clone())),
            Expr::Sym(s) => Ok(Canon::symbol(s)),
            Expr::Add(xs) => {
                let mut acc = Canon::zero();
                for x in xs {
                    acc = acc.add(&Canon::from_expr(x)?);
                }
                Ok(acc)
            }
            Expr::Mul(xs) => {
                let mut acc = Canon::one();
                for x in xs {
                    acc = acc.mul(&Canon::from_expr(x)?);
                    if acc.is_zero() {
                        return Ok(acc);
                    }
                }
                Ok(acc)
            }
            Expr::Pow(b, ex) => Canon::from_expr(b)?.pow(ex),
            Expr::Func(f) => {
                let mut args = Vec::with_capacity(f.args.len());
                for a in &f.args {
                    args.push(Canon::from_expr(a)?);
                }
                Ok(Canon::func(&f.name, &f.derivs, args))
            }
            Expr::Int(g, v) => Ok(Canon::integral(&Canon::from_expr(g)?, v)),
        }
    }

    pub fn to_expr(&self) -> Expr {
        let num = self.num.to_expr();
        if self.den.is_one() {
            return num;
        }
        let mut fs = match &num {
            Expr::Mul(xs) => xs.clone(),
            Expr::Num(v) if v.is_one() => vec![],
            _ => vec![num.clone()],
        };
        if self.den.is_single_term() {
            let (m, _) = self.den.terms.iter().next().unwrap();
            for (a, e) in m {
                fs.push(a.to_expr().pow(-e.clone()));
            }
        } else {
            fs.push(self.den.to_expr().recip());
        }
        if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Expr::Mul(fs)
        }
    }

    pub fn add(&self, o: &Canon) -> Canon {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Canon::reduce(self.num.add(&o.num), self.den.clone());
        }
        Canon::reduce(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Canon {
        Canon { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Canon) -> Canon {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Q) -> Canon {
        if c.is_zero() {
            return Canon::zero();
        }
        Canon { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Canon) -> Canon {
        if self.is_zero() || o.is_zero() {
            return Canon::zero();
        }
        if let Some(c) = o.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return o.scale(&c);
        }
        Canon::reduce(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn recip(&self) -> Result<Canon> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Canon::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &Canon) -> Result<Canon> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn powi(&self, n: i64) -> Result<Canon> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let n = n as u32;
        if n == 0 {
            return Ok(Canon::one());
        }
        Ok(Canon::reduce(self.num.pow(n), self.den.pow(n)))
    }

    pub fn pow(&self, e: &Q) -> Result<Canon> {
        if e.is_integer() {
            let n = e.to_integer().to_i64().ok_or_else(|| Error::InvalidInput("exponent too large".into()))?;
            return self.powi(n);
        }
        if self.is_zero() {
            return if e.is_positive() { Ok(Canon::zero()) } else { Err(Error::DivisionByZero) };
        }
        let n = poly_pow(&self.num, e);
        let d = poly_pow(&self.den, e);
        n.div(&d)
    }

    /// Function application with the inverse-pair and zero-argument rules.
    pub fn func(name: &str, derivs: &[u32], args: Vec<Canon>) -> Canon {
        let plain = derivs.iter().all(|&d| d == 0);
        if plain && args.len() == 1 {
            let a = &args[0];
            if a.is_zero() {
                match name {
                    "ln" => {}
                    "exp" | "cos" => return Canon::one(),
                    "sin" | "tan" | "arctan" => return Canon::zero(),
                    _ => {}
                }
            }
            if name == "ln" && a.as_constant().map(|c| c.is_one()).unwrap_or(false) {
                return Canon::zero();
            }
            if let Some((inner, iarg)) = a.as_single_func() {
                let inverse = matches!(
                    (name, inner.name.as_str()),
                    ("ln", "exp") | ("exp", "ln") | ("tan", "arctan")
                );
                if inverse && inner.derivs.iter().all(|&d| d == 0) {
                    return iarg;
                }
            }
        }
        let f = Func {
            name: name.to_string(),
            derivs: derivs.to_vec(),
            args: args.iter().map(Canon::to_expr).collect(),
        };
        Canon::from_atom(Atom::Func(f), Q::one())
    }

    /// Returns the function and its (single) argument when `self` is exactly
    /// one function atom to the first power.
    fn as_single_func(&self) -> Option<(Func, Canon)> {
        if !self.den.is_one() || !self.num.is_single_term() {
            return None;
        }
        let (m, c) = self.num.terms.iter().next().unwrap();
        if !c.is_one() || m.len() != 1 {
            return None;
        }
        let (a, e) = m.iter().next().unwrap();
        match a {
            Atom::Func(f) if e.is_one() && f.args.len() == 1 => {
                Canon::from_expr(&f.args[0]).ok().map(|arg| (f.clone(), arg))
            }
            _ => None,
        }
    }

    /// Unevaluated antiderivative, linear over rational constants.
    pub fn integral(g: &Canon, v: &Symbol) -> Canon {
        if g.is_zero() {
            return Canon::zero();
        }
        if g.den.is_one() {
            let mut acc = Canon::zero();
            for (m, c) in &g.num.terms {
                let mut t = Poly::zero();
                t.add_term(m.clone(), Q::one());
                let inner = Canon { num: t, den: Poly::one() };
                let at = Atom::Int(Box::new(inner.to_expr()), v.clone());
                acc = acc.add(&Canon::from_atom(at, Q::one()).scale(c));
            }
            return acc;
        }
        let lc = g.num.lead_coeff();
        let inner = g.scale(&(Q::one() / &lc));
        Canon::from_atom(Atom::Int(Box::new(inner.to_expr()), v.clone()), Q::one()).scale(&lc)
    }

    /// The canonicalization pipeline.
    pub fn reduce(num: Poly, den: Poly) -> Canon {
        if num.is_zero() {
            return Canon::zero();
        }
        assert!(!den.is_zero(), "zero denominator reached reduce");
        let (mut num, mut den) = clear_monomial_content(num, den);
        loop {
            let (n2, changed_n) = expand_roots(&num);
            let (d2, changed_d) = expand_roots(&den);
            if !changed_n && !changed_d {
                break;
            }
            let (a, b) = clear_monomial_content(n2, d2);
            num = a;
            den = b;
        }
        if den.as_constant().is_none() {
            let (n2, d2) = cancel_gcd(&num, &den);
            num = n2;
            den = d2;
        }
        let lc = den.lead_coeff();
        if !lc.is_one() {
            let inv = Q::one() / lc;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Canon { num, den }
    }

    /// Derivative with respect to a symbol.
    pub fn diff(&self, x: &Symbol) -> Canon {
        let dn = poly_diff(&self.num, x);
        if self.den.is_one() {
            return dn;
        }
        let dd = poly_diff(&self.den, x);
        let num = Canon::from_poly(self.num.clone());
        let den = Canon::from_poly(self.den.clone());
        let top = dn.mul(&den).sub(&num.mul(&dd));
        top.div(&den.mul(&den)).expect("denominator is nonzero")
    }

    pub fn from_poly(p: Poly) -> Canon {
        Canon::reduce(p, Poly::one())
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = self.num.atoms();
        s.extend(self.den.atoms());
        s
    }

    pub fn contains_symbol(&self, x: &Symbol) -> bool {
        self.atoms().iter().any(|a| a.contains_symbol(x))
    }

    /// Simultaneous substitution of symbols, renormalized.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Canon>) -> Result<Canon> {
        if bindings.is_empty() || !bindings.keys().any(|s| self.contains_symbol(s)) {
            return Ok(self.clone());
        }
        let exprs: BTreeMap<Symbol, Expr> = bindings.iter().map(|(k, v)| (k.clone(), v.to_expr())).collect();
        let e = self.to_expr().map_symbols(&|s| exprs.get(s).cloned());
        Canon::from_expr(&e)
    }
}

fn clear_monomial_content(num: Poly, den: Poly) -> (Poly, Poly) {
    let mut atoms = num.atoms();
    atoms.extend(den.atoms());
    let mut shift_n = Mono::new();
    let mut shift_d = Mono::new();
    let mut net = Mono::new();
    for a in atoms {
        let mn = num.min_exponent(&a);
        let md = den.min_exponent(&a);
        if !mn.is_zero() {
            shift_n.insert(a.clone(), -mn.clone());
        }
        if !md.is_zero() {
            shift_d.insert(a.clone(), -md.clone());
        }
        let k = &mn - &md;
        if !k.is_zero() {
            net.insert(a, k);
        }
    }
    if shift_n.is_empty() && shift_d.is_empty() && net.values().all(|k| k.is_positive()) {
        return (num, den);
    }
    let mut up = Mono::new();
    let mut down = Mono::new();
    let mut den_factor = Poly::one();
    for (a, k) in net {
        if k.is_positive() {
            up.insert(a, k);
        } else if let Atom::Root(b) = &a {
            // keep radicals out of the denominator
            let m = (-k.clone()).ceil();
            let rest = &m + &k;
            let base = root_base_poly(b);
            den_factor = den_factor.mul(&base.pow(m.to_integer().to_u32().expect("small exponent")));
            if !rest.is_zero() {
                up.insert(a, rest);
            }
        } else {
            down.insert(a, -k);
        }
    }
    let n = num.mul_mono(&mono_mul(&shift_n, &up), &Q::one());
    let d = den.mul_mono(&mono_mul(&shift_d, &down), &Q::one()).mul(&den_factor);
    (n, d)
}

fn root_base_poly(b: &Expr) -> Poly {
    match b {
        Expr::Num(c) => Poly::constant(c.clone()),
        _ => Canon::from_expr(b).expect("radical base normalizes").num,
    }
}

/// Replaces radical exponents `e >= 1` by `base^floor(e) * root^frac(e)`.
fn expand_roots(p: &Poly) -> (Poly, bool) {
    let needs = p.terms.keys().any(|m| m.iter().any(|(a, e)| matches!(a, Atom::Root(_)) && *e >= Q::one()));
    if !needs {
        return (p.clone(), false);
    }
    let mut out = Poly::zero();
    for (m, c) in &p.terms {
        let mut rest = Mono::new();
        let mut factor = Poly::one();
        for (a, e) in m {
            match a {
                Atom::Root(b) if *e >= Q::one() => {
                    let whole = e.floor();
                    let frac = e - &whole;
                    let base = Canon::from_expr(b).expect("radical base normalizes");
                    // radical bases are polynomials by construction
                    let n = whole.to_integer().to_u32().expect("small exponent");
                    factor = factor.mul(&base.num.pow(n));
                    if !frac.is_zero() {
                        rest.insert(a.clone(), frac);
                    }
                }
                _ => {
                    rest.insert(a.clone(), e.clone());
                }
            }
        }
        out = out.add(&factor.mul_mono(&rest, c));
    }
    (out, true)
}

/// Conversion between [`Poly`] (rational exponents over atoms) and
/// [`IPoly`] (integer exponents over indices). Each atom's exponents are
/// scaled by the lcm of their denominators.
struct VarMap {
    atoms: Vec<Atom>,
    scale: Vec<BigInt>,
}

impl VarMap {
    fn new(polys: &[&Poly]) -> VarMap {
        let mut lcm: BTreeMap<Atom, BigInt> = BTreeMap::new();
        for p in polys {
            for m in p.terms.keys() {
                for (a, e) in m {
                    let l = lcm.entry(a.clone()).or_insert_with(BigInt::one);
                    *l = l.lcm(e.denom());
                }
            }
        }
        let (atoms, scale) = lcm.into_iter().unzip();
        VarMap { atoms, scale }
    }

    fn to_ipoly(&self, p: &Poly) -> IPoly {
        let n = self.atoms.len();
        let mut out = IPoly::zero(n);
        for (m, c) in &p.terms {
            let mut ex = vec![0u32; n];
            for (a, e) in m {
                let i = self.atoms.binary_search(a).unwrap();
                let v = e * Q::from_integer(self.scale[i].clone());
                ex[i] = v.to_integer().to_u32().expect("non-negative exponent");
            }
            out.terms.insert(ex, c.clone());
        }
        out
    }

    fn from_ipoly(&self, p: &IPoly) -> Poly {
        let mut out = Poly::zero();
        for (ex, c) in &p.terms {
            let mut m = Mono::new();
            for (i, &k) in ex.iter().enumerate() {
                if k > 0 {
                    m.insert(self.atoms[i].clone(), Q::new(BigInt::from(k), self.scale[i].clone()));
                }
            }
            out.add_term(m, c.clone());
        }
        out
    }
}

fn cancel_gcd(num: &Poly, den: &Poly) -> (Poly, Poly) {
    let vm = VarMap::new(&[num, den]);
    let a = vm.to_ipoly(num);
    let b = vm.to_ipoly(den);
    let g = gcd::gcd(&a, &b);
    if g.is_constant() {
        return (num.clone(), den.clone());
    }
    let a2 = a.div_exact(&g).expect("gcd divides numerator");
    let b2 = b.div_exact(&g).expect("gcd divides denominator");
    (vm.from_ipoly(&a2), vm.from_ipoly(&b2))
}

/// `c^e` for a rational constant and a non-integer exponent.
fn rational_pow(c: &Q, e: &Q) -> Canon {
    let p = e.numer().clone();
    let qd = e.denom().to_u32().expect("small root index");
    let mut c = c.clone();
    let mut sign = Q::one();
    if c.is_negative() {
        if qd % 2 == 1 {
            if p.is_odd() {
                sign = -sign;
            }
            c = -c;
        } else {
            return root_atom_pow(Expr::Num(c), e);
        }
    }
    let rn = c.numer().nth_root(qd);
    let rd = c.denom().nth_root(qd);
    let exact = num_traits::pow(rn.clone(), qd as usize) == *c.numer() && num_traits::pow(rd.clone(), qd as usize) == *c.denom();
    if exact {
        let root = Q::new(rn, rd);
        let pi = p.to_i64().expect("small exponent");
        let v = Canon::constant(root).powi(pi).expect("nonzero root");
        return v.scale(&sign);
    }
    root_atom_pow(Expr::Num(c), e).scale(&sign)
}

fn root_atom_pow(base: Expr, e: &Q) -> Canon {
    Canon::reduce(Poly::atom(Atom::Root(Box::new(base)), e.clone()), Poly::one())
}

/// `p^e` for a polynomial and a non-integer exponent.
fn poly_pow(p: &Poly, e: &Q) -> Canon {
    if p.is_single_term() {
        let (m, c) = p.terms.iter().next().unwrap();
        let mut out = rational_pow(c, e);
        let mut mm = Mono::new();
        for (a, k) in m {
            mm.insert(a.clone(), k * e);
        }
        let mut mp = Poly::zero();
        mp.add_term(mm, Q::one());
        out = out.mul(&Canon::reduce(mp, Poly::one()));
        return out;
    }
    let vm = VarMap::new(&[p]);
    let ip = vm.to_ipoly(p);
    let (c, factors) = gcd::squarefree(&ip);
    let mut out = if c.is_one() { Canon::one() } else { rational_pow(&c, e) };
    for (f, mult) in factors {
        let fp = vm.from_ipoly(&f);
        let k = e * qi(mult as i64);
        let part = if fp.is_single_term() {
            poly_pow(&fp, &k)
        } else {
            let base = Canon { num: fp.clone(), den: Poly::one() };
            if k.is_integer() {
                Canon::reduce(fp.pow(k.to_integer().to_u32().unwrap()), Poly::one())
            } else {
                root_atom_pow(base.to_expr(), &k)
            }
        };
        out = out.mul(&part);
    }
    out
}

fn atom_diff(a: &Atom, x: &Symbol) -> Canon {
    match a {
        Atom::Sym(s) => {
            if s == x {
                Canon::one()
            } else {
                Canon::zero()
            }
        }
        Atom::Root(b) => Canon::from_expr(b).expect("radical base").diff(x),
        Atom::Int(g, v) => {
            let gc = Canon::from_expr(g).expect("integrand normalizes");
            if v == x {
                gc
            } else if !gc.contains_symbol(x) {
                Canon::zero()
            } else {
                Canon::integral(&gc.diff(x), v)
            }
        }
        Atom::Func(f) => {
            let args: Vec<Canon> = f.args.iter().map(|a| Canon::from_expr(a).expect("argument normalizes")).collect();
            let mut acc = Canon::zero();
            for (i, arg) in args.iter().enumerate() {
                let da = arg.diff(x);
                if da.is_zero() {
                    continue;
                }
                let outer = func_partial(f, &args, i);
                acc = acc.add(&outer.mul(&da));
            }
            acc
        }
    }
}

/// Partial derivative of `f(args)` with respect to argument `i`.
fn func_partial(f: &Func, args: &[Canon], i: usize) -> Canon {
    let plain = f.derivs.iter().all(|&d| d == 0);
    if plain && args.len() == 1 && f.is_known_kernel() {
        let u = &args[0];
        return match f.name.as_str() {
            "ln" => u.recip().expect("ln of zero"),
            "exp" => Canon::func("exp", &[0], vec![u.clone()]),
            "sin" => Canon::func("cos", &[0], vec![u.clone()]),
            "cos" => Canon::func("sin", &[0], vec![u.clone()]).neg(),
            "tan" => {
                let t = Canon::func("tan", &[0], vec![u.clone()]);
                Canon::one().add(&t.mul(&t))
            }
            "arctan" => Canon::one().add(&u.mul(u)).recip().expect("1+u^2 nonzero"),
            _ => unreachable!(),
        };
    }
    let mut derivs = f.derivs.clone();
    derivs[i] += 1;
    Canon::func(&f.name, &derivs, args.to_vec())
}

fn poly_diff(p: &Poly, x: &Symbol) -> Canon {
    let mut acc = Canon::zero();
    let mut poly_part = Poly::zero();
    for (m, c) in &p.terms {
        for (a, e) in m {
            let da = atom_diff(a, x);
            if da.is_zero() {
                continue;
            }
            let mut rest = m.clone();
            let ne = e - Q::one();
            if ne.is_zero() {
                rest.remove(a);
            } else {
                rest.insert(a.clone(), ne.clone());
            }
            let coeff = c * e;
            match (&da.as_constant(), ne.is_negative()) {
                (Some(k), false) => poly_part.add_term(rest, &coeff * k),
                _ => {
                    let mut t = Poly::zero();
                    t.add_term(rest, coeff);
                    acc = acc.add(&Canon::reduce(t, Poly::one()).mul(&da));
                }
            }
        }
    }
    if !poly_part.is_zero() {
        acc = acc.add(&Canon::reduce(poly_part, Poly::one()));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::q;

    fn c(e: &Expr) -> Canon {
        Canon::from_expr(e).unwrap()
    }
    fn s(n: &str) -> Expr {
        Expr::sym(n)
    }

    #[test]
    fn cancels_common_factor() {
        // (x^2 - 1)/(x - 1) = x + 1
        let e = (s("x").powi(2) - Expr::int(1)) / (s("x") - Expr::int(1));
        assert_eq!(c(&e), c(&(s("x") + Expr::int(1))));
    }

    #[test]
    fn x_minus_x_is_zero() {
        assert!(c(&(s("x") - s("x"))).is_zero());
    }

    #[test]
    fn fractional_powers_combine() {
        let e = (s("w").pow(q(2, 3)) * (Expr::int(1) + s("r").powi(2))).powi(3);
        let f = s("w").powi(2) * (Expr::int(1) + s("r").powi(2)).powi(3);
        assert_eq!(c(&e), c(&f));
        let g = s("w").pow(q(2, 3)) * s("w");
        assert_eq!(c(&g), c(&s("w").pow(q(5, 3))));
    }

    #[test]
    fn radical_of_square_collapses() {
        let p = Expr::int(1) + s("r").powi(2);
        let e = (p.clone().powi(2)).pow(q(1, 2));
        assert_eq!(c(&e), c(&p));
        let h = p.clone().pow(q(1, 2)) * p.clone().pow(q(1, 2));
        assert_eq!(c(&h), c(&p));
        let k = p.clone().pow(q(-3, 2)).pow(q(2, 3));
        assert_eq!(c(&k), c(&p.recip()));
    }

    #[test]
    fn rational_constant_roots() {
        assert_eq!(c(&Expr::num(q(4, 9)).pow(q(1, 2))), Canon::constant(q(2, 3)));
        assert_eq!(c(&Expr::int(-8).pow(q(1, 3))), Canon::int(-2));
        let two = c(&Expr::int(2).pow(q(1, 2)));
        assert_eq!(two.mul(&two), Canon::int(2));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let e = Expr::int(1) / (s("x") - s("x"));
        assert_eq!(Canon::from_expr(&e), Err(Error::DivisionByZero));
    }

    #[test]
    fn derivative_of_uninterpreted_function_and_integral() {
        let f = Expr::func("f", vec![s("w").pow(q(2, 3)) * (Expr::int(1) + s("r").powi(2))]);
        let d = c(&f).diff(&Symbol::new("r"));
        let arg = s("w").pow(q(2, 3)) * (Expr::int(1) + s("r").powi(2));
        let fp = Expr::Func(Func { name: "f".into(), derivs: vec![1], args: vec![arg] });
        let expect = fp * s("w").pow(q(2, 3)) * Expr::int(2) * s("r");
        assert_eq!(d, c(&expect));
        let i = Expr::integral(s("v"), &Symbol::new("r"));
        assert_eq!(c(&i).diff(&Symbol::new("r")), c(&s("v")));
    }

    #[test]
    fn integral_is_linear_over_rationals() {
        let r = Symbol::new("r");
        let a = Expr::integral(Expr::int(3) * s("v") + s("u"), &r);
        let b = Expr::int(3) * Expr::integral(s("v"), &r) + Expr::integral(s("u"), &r);
        assert_eq!(c(&a), c(&b));
    }

    #[test]
    fn inverse_kernels_cancel() {
        let e = Expr::func("exp", vec![Expr::func("ln", vec![s("r")])]);
        assert_eq!(c(&e), c(&s("r")));
    }

    #[test]
    fn to_expr_round_trips() {
        let e = (s("x") * s("y") + Expr::int(2)) / (s("x").powi(2) + Expr::int(1)) + s("x").pow(q(1, 3));
        let n = c(&e);
        assert_eq!(c(&n.to_expr()), n);
    }
}
