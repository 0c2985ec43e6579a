//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := '-' factor | base ('^' exponent)?
//! base     := number | ident primes? | ident primes? '(' args ')'
//!           | ident '{' ints '}' '(' args ')' | '(' expr ')'
//! exponent := ['-'] number | '(' expr ')'      -- must be a rational constant
//! ```
//!
//! `Int(g, v)`, `D(y, x, k)` and `sqrt(e)` are special forms.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::{Expr, Func, Symbol, Q};
use crate::poly::Canon;

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

impl Parser {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(negate(self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Add(terms) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut fs = vec![self.factor()?];
        loop {
            if self.eat('*') {
                fs.push(self.factor()?);
            } else if self.eat('/') {
                let d = self.factor()?;
                fs.push(match d {
                    Expr::Num(v) if !v.is_zero() => Expr::Num(Q::one() / v),
                    other => other.recip(),
                });
            } else {
                break;
            }
        }
        if fs.len() == 2 {
            if let (Expr::Num(a), Expr::Num(b)) = (&fs[0], &fs[1]) {
                return Ok(Expr::Num(a * b));
            }
        }
        Ok(if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Mul(fs) })
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(negate(self.factor()?));
        }
        let base = self.base()?;
        if self.eat('^') {
            let e = self.exponent()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Q> {
        let start = self.pos;
        let neg = self.eat('-');
        let e = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                e
            }
            Some(c) if c.is_ascii_digit() => Expr::Num(self.number()?),
            Some(c) if is_ident_start(c) => {
                let id = self.ident();
                return Err(Error::NonRationalExponent(id));
            }
            _ => return Err(self.err("expected exponent")),
        };
        let c = Canon::from_expr(&e)?;
        match c.as_constant() {
            Some(v) => Ok(if neg { -v } else { v }),
            None => {
                let text: String = self.chars[start..self.pos].iter().collect();
                Err(Error::NonRationalExponent(text.trim().to_string()))
            }
        }
    }

    fn number(&mut self) -> Result<Q> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int: String = self.chars[start..self.pos].iter().collect();
        let mut value = Q::from_integer(int.parse::<BigInt>().map_err(|_| self.err("bad number"))?);
        if self.pos < self.chars.len() && self.chars[self.pos] == '.' {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let frac: String = self.chars[fs..self.pos].iter().collect();
            if !frac.is_empty() {
                let n: BigInt = frac.parse().map_err(|_| self.err("bad number"))?;
                let d = num_traits::pow(BigInt::from(10), frac.len());
                value += Q::new(n, d);
            }
        }
        Ok(value)
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && is_ident_char(self.chars[self.pos]) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn primes(&mut self) -> usize {
        let mut k = 0;
        while self.pos < self.chars.len() && self.chars[self.pos] == '\'' {
            self.pos += 1;
            k += 1;
        }
        k
    }

    fn args(&mut self) -> Result<Vec<Expr>> {
        self.expect('(')?;
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(args)
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Num(self.number()?)),
            Some(c) if is_ident_start(c) => self.named(),
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn named(&mut self) -> Result<Expr> {
        let start = self.pos;
        let name = self.ident();
        let k = self.primes();
        if k == 0 && self.peek() == Some('{') {
            self.pos += 1;
            let mut derivs = Vec::new();
            loop {
                let n = self.number()?;
                if !n.is_integer() || n < Q::zero() {
                    return Err(self.err("derivative orders must be non-negative integers"));
                }
                derivs.push(n.to_integer().try_into().map_err(|_| self.err("order too large"))?);
                if !self.eat(',') {
                    break;
                }
            }
            self.expect('}')?;
            let args = self.args()?;
            if args.len() != derivs.len() {
                return Err(self.err("derivative orders do not match the argument count"));
            }
            return Ok(Expr::Func(Func { name, derivs, args }));
        }
        // primes bind to the identifier; a following `(` makes it a function
        let call = self.pos < self.chars.len() && {
            let save = self.pos;
            let open = self.peek() == Some('(');
            self.pos = save;
            open
        };
        if !call {
            return Ok(Expr::Sym(Symbol::new(name).derivative(k)));
        }
        let args = self.args()?;
        if k > 0 {
            let mut f = Func::new(name, args);
            if f.args.len() != 1 {
                self.pos = start;
                return Err(self.err("prime notation needs exactly one argument"));
            }
            f.derivs = vec![k as u32];
            return Ok(Expr::Func(f));
        }
        match name.as_str() {
            "Int" => {
                if args.len() != 2 {
                    return Err(self.err("Int takes an integrand and a variable"));
                }
                match &args[1] {
                    Expr::Sym(v) => Ok(Expr::integral(args[0].clone(), v)),
                    _ => Err(self.err("Int variable must be a symbol")),
                }
            }
            "D" => {
                if args.len() != 3 {
                    return Err(self.err("D takes a variable, an independent variable and an order"));
                }
                let order = match &args[2] {
                    Expr::Num(n) if n.is_integer() && *n >= Q::zero() => n.to_integer(),
                    _ => return Err(self.err("D order must be a non-negative integer")),
                };
                match (&args[0], &args[1]) {
                    (Expr::Sym(y), Expr::Sym(_)) => {
                        let k: usize = order.try_into().map_err(|_| self.err("order too large"))?;
                        Ok(Expr::Sym(y.derivative(k)))
                    }
                    _ => Err(self.err("D arguments must be symbols")),
                }
            }
            "sqrt" => {
                if args.len() != 1 {
                    return Err(self.err("sqrt takes one argument"));
                }
                Ok(args[0].clone().pow(Q::new(1.into(), 2.into())))
            }
            _ => Ok(Expr::Func(Func::new(name, args))),
        }
    }
}

fn negate(e: Expr) -> Expr {
    match e {
        Expr::Num(v) => Expr::Num(-v),
        Expr::Mul(mut fs) => {
            if let Some(Expr::Num(v)) = fs.first_mut() {
                *v = -v.clone();
                return Expr::Mul(fs);
            }
            fs.insert(0, Expr::int(-1));
            Expr::Mul(fs)
        }
        other => Expr::Mul(vec![Expr::int(-1), other]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::q;

    #[test]
    fn parses_zero() {
        assert_eq!(parse("0").unwrap(), Expr::int(0));
    }

    #[test]
    fn parses_radical_times_function() {
        let e = parse("w^(5/3) * f(w^(2/3)*(1+r^2))").unwrap();
        let arg = Expr::Mul(vec![
            Expr::sym("w").pow(q(2, 3)),
            Expr::Add(vec![Expr::int(1), Expr::sym("r").powi(2)]),
        ]);
        assert_eq!(e, Expr::Mul(vec![Expr::sym("w").pow(q(5, 3)), Expr::func("f", vec![arg])]));
    }

    #[test]
    fn parses_integral_difference() {
        let e = parse("Int(v, r) - r*v").unwrap();
        let expect = Expr::Add(vec![
            Expr::integral(Expr::sym("v"), &Symbol::new("r")),
            Expr::Mul(vec![Expr::int(-1), Expr::sym("r"), Expr::sym("v")]),
        ]);
        assert_eq!(e, expect);
    }

    #[test]
    fn primes_and_d_notation_agree() {
        assert_eq!(parse("y'''").unwrap(), parse("D(y, x, 3)").unwrap());
        assert_eq!(parse("y''").unwrap(), Expr::sym("y''"));
    }

    #[test]
    fn function_derivatives() {
        let e = parse("f'(x)").unwrap();
        assert_eq!(e, Expr::Func(Func { name: "f".into(), derivs: vec![1], args: vec![Expr::sym("x")] }));
        let g = parse("F{1,0}(a, b)").unwrap();
        assert!(matches!(g, Expr::Func(ref f) if f.derivs == vec![1, 0]));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse("x + * y") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("x^y"), Err(Error::NonRationalExponent(_))));
        assert!(matches!(parse("(x"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn unary_minus_and_negative_exponent() {
        let e = parse("-x^2").unwrap();
        assert_eq!(e, Expr::Mul(vec![Expr::int(-1), Expr::sym("x").powi(2)]));
        assert_eq!(parse("x^-1").unwrap(), Expr::sym("x").pow(q(-1, 1)));
        assert_eq!(parse("3/4").unwrap(), Expr::num(q(3, 4)));
    }

    #[test]
    fn print_reparses() {
        for t in ["Int(v, r) - r*v", "w^(5/3)*f(w^(2/3)*(1+r^2))", "-3*y''/x - x*y''^2", "F{0,1}(x, y'')"] {
            let e = parse(t).unwrap();
            let again = parse(&e.to_string()).unwrap();
            assert_eq!(again, e, "{t} printed as {e}");
        }
    }
}
