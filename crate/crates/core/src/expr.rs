//! Expression trees.
//!
//! An [`Expr`] is an exact symbolic tree. Numbers are arbitrary precision
//! rationals, there are no floats anywhere. Trees built by the parser or by
//! hand are *unnormalized*; [`Expr::normalize`] maps them to the canonical
//! rational-function form implemented in [`crate::poly`].

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational number.
pub type Q = BigRational;

/// Builds a rational from an integer numerator and denominator.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Builds an integer rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// A symbol name. Derivative symbols of a dependent variable `y` are spelled
/// with primes (`y'`, `y''`, ...); the prime is not an identifier character,
/// so these never collide with user identifiers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(pub String);

impl Symbol {
    pub fn new(name: impl Into<String>) -> Self {
        Symbol(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The `k`-th derivative symbol of this (dependent) symbol.
    pub fn derivative(&self, k: usize) -> Symbol {
        Symbol(format!("{}{}", self.0, "'".repeat(k)))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol(s.to_string())
    }
}

/// Known kernels with built-in derivative rules. Anything else is an
/// uninterpreted function.
pub const KNOWN_KERNELS: &[&str] = &["ln", "exp", "sin", "cos", "tan", "arctan"];

/// Function application. `derivs[i]` counts how many times the function has
/// been differentiated with respect to its `i`-th argument; for known
/// kernels it is always all zeros.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Func {
    pub name: String,
    pub derivs: Vec<u32>,
    pub args: Vec<Expr>,
}

impl Func {
    pub fn new(name: impl Into<String>, args: Vec<Expr>) -> Self {
        let derivs = vec![0; args.len()];
        Func { name: name.into(), derivs, args }
    }

    pub fn is_known_kernel(&self) -> bool {
        KNOWN_KERNELS.contains(&self.name.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Num(Q),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    /// Base raised to an exact rational exponent.
    Pow(Box<Expr>, Q),
    Func(Func),
    /// Unevaluated antiderivative of the integrand with respect to the
    /// variable.
    Int(Box<Expr>, Symbol),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(Q::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Q::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Num(qi(n))
    }

    pub fn num(v: Q) -> Expr {
        Expr::Num(v)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(Symbol::new(name))
    }

    pub fn func(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Func(Func::new(name, args))
    }

    pub fn integral(integrand: Expr, var: &Symbol) -> Expr {
        Expr::Int(Box::new(integrand), var.clone())
    }

    pub fn pow(self, e: Q) -> Expr {
        Expr::Pow(Box::new(self), e)
    }

    pub fn powi(self, e: i64) -> Expr {
        self.pow(qi(e))
    }

    pub fn recip(self) -> Expr {
        self.powi(-1)
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(v) if v.is_zero())
    }

    /// All symbols occurring in the tree, integral variables included.
    pub fn free_symbols(&self) -> FreeSymbols {
        let mut out = FreeSymbols::default();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut FreeSymbols) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.symbols.insert(s.clone());
            }
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| x.collect_symbols(out)),
            Expr::Pow(b, _) => b.collect_symbols(out),
            Expr::Func(f) => f.args.iter().for_each(|x| x.collect_symbols(out)),
            Expr::Int(g, v) => {
                out.has_integral = true;
                out.integral_vars.insert(v.clone());
                out.symbols.insert(v.clone());
                g.collect_symbols(out);
            }
        }
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Sym(t) => t == s,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().any(|x| x.contains_symbol(s)),
            Expr::Pow(b, _) => b.contains_symbol(s),
            Expr::Func(f) => f.args.iter().any(|x| x.contains_symbol(s)),
            Expr::Int(g, v) => v == s || g.contains_symbol(s),
        }
    }

    pub fn contains_integral(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Sym(_) => false,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().any(Expr::contains_integral),
            Expr::Pow(b, _) => b.contains_integral(),
            Expr::Func(f) => f.args.iter().any(Expr::contains_integral),
            Expr::Int(..) => true,
        }
    }

    /// Replaces every `Sym` node by `f(sym)` where that returns `Some`.
    /// Integral variables are renamed only when replaced by a plain symbol.
    pub fn map_symbols(&self, f: &dyn Fn(&Symbol) -> Option<Expr>) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Sym(s) => f(s).unwrap_or_else(|| self.clone()),
            Expr::Add(xs) => Expr::Add(xs.iter().map(|x| x.map_symbols(f)).collect()),
            Expr::Mul(xs) => Expr::Mul(xs.iter().map(|x| x.map_symbols(f)).collect()),
            Expr::Pow(b, e) => Expr::Pow(Box::new(b.map_symbols(f)), e.clone()),
            Expr::Func(func) => Expr::Func(Func {
                name: func.name.clone(),
                derivs: func.derivs.clone(),
                args: func.args.iter().map(|x| x.map_symbols(f)).collect(),
            }),
            Expr::Int(g, v) => {
                let var = match f(v) {
                    Some(Expr::Sym(t)) => t,
                    _ => v.clone(),
                };
                Expr::Int(Box::new(g.map_symbols(f)), var)
            }
        }
    }
}

/// Result of [`Expr::free_symbols`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeSymbols {
    pub symbols: BTreeSet<Symbol>,
    pub has_integral: bool,
    pub integral_vars: BTreeSet<Symbol>,
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, Expr::Mul(vec![Expr::int(-1), rhs])])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs.recip()])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Mul(vec![Expr::int(-1), self])
    }
}

// Printing. The output always reparses to an equal tree.

fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(_) => 1,
        Expr::Mul(_) => 2,
        Expr::Num(v) if v.is_negative() || !v.is_integer() => 2,
        Expr::Pow(..) => 3,
        _ => 4,
    }
}

/// `-x` as a positive term, when `x` prints with a leading minus.
fn negated(x: &Expr) -> Option<Expr> {
    match x {
        Expr::Num(v) if v.is_negative() => Some(Expr::Num(-v)),
        Expr::Mul(xs) => match xs.first() {
            Some(Expr::Num(v)) if v.is_negative() => {
                let c = -v;
                let mut rest: Vec<Expr> = xs[1..].to_vec();
                if !c.is_one() || rest.is_empty() {
                    rest.insert(0, Expr::Num(c));
                }
                Some(if rest.len() == 1 { rest.pop().unwrap() } else { Expr::Mul(rest) })
            }
            _ => None,
        },
        _ => None,
    }
}

fn inverted(b: &Expr, e: &Q) -> Expr {
    if (-e).is_one() {
        b.clone()
    } else {
        Expr::Pow(Box::new(b.clone()), -e)
    }
}

fn write_denominator(f: &mut fmt::Formatter<'_>, den: &[Expr]) -> fmt::Result {
    match den {
        [] => Ok(()),
        [one] if prec(one) >= 3 => {
            f.write_str("/")?;
            write_child(f, one, 3)
        }
        _ => {
            f.write_str("/(")?;
            for (i, d) in den.iter().enumerate() {
                if i > 0 {
                    f.write_str("*")?;
                }
                write_child(f, d, if den.len() == 1 { 0 } else { 3 })?;
            }
            f.write_str(")")
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({})", e)
    } else {
        write!(f, "{}", e)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => f.write_str(&fmt_q(v)),
            Expr::Sym(s) => f.write_str(&s.0),
            Expr::Add(xs) => {
                if xs.is_empty() {
                    return f.write_str("0");
                }
                for (i, x) in xs.iter().enumerate() {
                    match (i, negated(x)) {
                        (0, _) => write_child(f, x, 2)?,
                        (_, Some(p)) => {
                            f.write_str(" - ")?;
                            write_child(f, &p, 2)?;
                        }
                        _ => {
                            f.write_str(" + ")?;
                            write_child(f, x, 2)?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Mul(xs) => {
                if xs.is_empty() {
                    return f.write_str("1");
                }
                let mut coef = Q::one();
                let mut num: Vec<&Expr> = Vec::new();
                let mut den: Vec<Expr> = Vec::new();
                for x in xs {
                    match x {
                        Expr::Num(v) => coef *= v,
                        Expr::Pow(b, e) if e.is_negative() => den.push(inverted(b, e)),
                        _ => num.push(x),
                    }
                }
                if coef.is_negative() {
                    f.write_str("-")?;
                    coef = -coef;
                }
                let mut first = true;
                if !coef.numer().is_one() || num.is_empty() {
                    write!(f, "{}", coef.numer())?;
                    first = false;
                }
                for x in num {
                    if !first {
                        f.write_str("*")?;
                    }
                    write_child(f, x, 3)?;
                    first = false;
                }
                if !coef.denom().is_one() {
                    den.insert(0, Expr::Num(Q::from_integer(coef.denom().clone())));
                }
                write_denominator(f, &den)
            }
            Expr::Pow(b, e) if e.is_negative() => {
                f.write_str("1")?;
                write_denominator(f, &[inverted(b, e)])
            }
            Expr::Pow(b, e) => {
                write_child(f, b, 4)?;
                if e.is_integer() {
                    write!(f, "^{}", e.numer())
                } else {
                    write!(f, "^({})", fmt_q(e))
                }
            }
            Expr::Func(func) => {
                let all_zero = func.derivs.iter().all(|&d| d == 0);
                f.write_str(&func.name)?;
                if !all_zero {
                    if func.derivs.len() == 1 {
                        f.write_str(&"'".repeat(func.derivs[0] as usize))?;
                    } else {
                        let ds: Vec<String> = func.derivs.iter().map(|d| d.to_string()).collect();
                        write!(f, "{{{}}}", ds.join(","))?;
                    }
                }
                f.write_str("(")?;
                for (i, a) in func.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                f.write_str(")")
            }
            Expr::Int(g, v) => write!(f, "Int({}, {})", g, v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_symbols_use_primes() {
        let y = Symbol::new("y");
        assert_eq!(y.derivative(0).as_str(), "y");
        assert_eq!(y.derivative(3).as_str(), "y'''");
    }

    #[test]
    fn free_symbols_flags_integrals() {
        let e = Expr::integral(Expr::sym("v"), &Symbol::new("r")) - Expr::sym("r") * Expr::sym("v");
        let fs = e.free_symbols();
        assert!(fs.has_integral);
        assert_eq!(fs.symbols.len(), 2);
        assert!(Expr::int(5).free_symbols().symbols.is_empty());
    }

    #[test]
    fn printing_parenthesizes_sums_in_products() {
        let e = Expr::sym("a") * (Expr::sym("b") + Expr::int(1));
        assert_eq!(e.to_string(), "a*(b + 1)");
        let p = Expr::sym("w").pow(q(2, 3));
        assert_eq!(p.to_string(), "w^(2/3)");
    }
}
