//! Closed-form antiderivatives from a small catalog (power rule, logarithm,
//! arctangent, logarithmic derivative) and solving `e = 0` for one symbol.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::expr::{q, qi, Symbol, Q};
use crate::poly::{Atom, Canon, Mono, Poly};

fn ln(u: Canon) -> Canon {
    Canon::func("ln", &[0], vec![u])
}

fn mono_poly(m: Mono, c: Q) -> Poly {
    let mut p = Poly::zero();
    p.add_term(m, c);
    p
}

/// Univariate view of a polynomial in `x` with integer exponents.
fn univariate(p: &Poly, x: &Symbol) -> Option<Vec<Canon>> {
    let cs = p.coefficients_in(x)?;
    let mut out: Vec<Canon> = Vec::new();
    for (e, c) in cs {
        if !e.is_integer() || e.is_negative() {
            return None;
        }
        let k = e.to_integer().to_usize()?;
        if out.len() <= k {
            out.resize(k + 1, Canon::zero());
        }
        out[k] = Canon::from_poly(c);
    }
    Some(out)
}

fn from_univariate(cs: &[Canon], x: &Symbol) -> Canon {
    let xs = Canon::symbol(x);
    let mut acc = Canon::zero();
    for c in cs.iter().rev() {
        acc = acc.mul(&xs).add(c);
    }
    acc
}

fn trim(cs: &mut Vec<Canon>) {
    while cs.len() > 1 && cs.last().map(Canon::is_zero).unwrap_or(false) {
        cs.pop();
    }
}

/// Division with remainder of univariate polynomials.
fn divrem(n: &[Canon], d: &[Canon]) -> (Vec<Canon>, Vec<Canon>) {
    let mut r = n.to_vec();
    trim(&mut r);
    let dl = d.last().unwrap();
    let dd = d.len() - 1;
    let mut quot = vec![Canon::zero(); r.len().saturating_sub(dd).max(1)];
    while r.len() > dd && !(r.len() == 1 && r[0].is_zero()) {
        let k = r.len() - 1 - dd;
        let c = r.last().unwrap().div(dl).expect("nonzero leading coefficient");
        quot[k] = quot[k].add(&c);
        for (i, di) in d.iter().enumerate() {
            r[i + k] = r[i + k].sub(&c.mul(di));
        }
        r.pop();
        trim(&mut r);
        if r.len() <= dd {
            break;
        }
    }
    (quot, r)
}

/// Power-rule antiderivative of a Laurent polynomial (single-term or
/// constant denominator). Returns `None` when some atom other than `x`
/// depends on `x`.
fn integrate_laurent(g: &Canon, x: &Symbol) -> Option<Canon> {
    let (m0, c0) = g.den.terms.iter().next()?;
    let mut inv = Mono::new();
    for (a, e) in m0 {
        inv.insert(a.clone(), -e.clone());
    }
    let num = g.num.mul_mono(&inv, &(Q::one() / c0));
    let xa = Atom::Sym(x.clone());
    let mut acc = Canon::zero();
    for (m, c) in &num.terms {
        let mut rest = m.clone();
        let e = rest.remove(&xa).unwrap_or_else(Q::zero);
        if rest.keys().any(|a| a.contains_symbol(x)) {
            return None;
        }
        let coeff = Canon::reduce(mono_poly(rest, c.clone()), Poly::one());
        let part = if e == qi(-1) {
            ln(Canon::symbol(x))
        } else {
            let e1 = &e + Q::one();
            Canon::symbol(x).pow(&e1).ok()?.scale(&(Q::one() / e1))
        };
        acc = acc.add(&coeff.mul(&part));
    }
    Some(acc)
}

/// `∫ 1/(a x^2 + b x + c) dx` for constants a, b, c.
fn integrate_inverse_quadratic(d: &[Canon], x: &Symbol) -> Option<Canon> {
    let c = &d[0];
    let b = &d[1];
    let a = &d[2];
    let disc = b.mul(b).sub(&a.mul(c).scale(&qi(4)));
    let lin = Canon::symbol(x).mul(a).scale(&qi(2)).add(b);
    let dv = disc.as_constant()?;
    if dv.is_negative() {
        let s = Canon::constant(-dv).pow(&q(1, 2)).ok()?;
        let arg = lin.div(&s).ok()?;
        let outer = Canon::int(2).div(&s).ok()?;
        return Some(outer.mul(&Canon::func("arctan", &[0], vec![arg])));
    }
    if dv.is_zero() {
        // -2/(2ax+b)
        return Some(Canon::int(-2).div(&lin).ok()?);
    }
    let s = Canon::constant(dv).pow(&q(1, 2)).ok()?;
    let p = lin.sub(&s);
    let m = lin.add(&s);
    let l = ln(p).sub(&ln(m));
    Some(l.div(&s).ok()?)
}

/// Closed-form antiderivative of `g` in `x`, or `None` outside the catalog.
pub fn integrate(g: &Canon, x: &Symbol) -> Option<Canon> {
    if g.is_zero() {
        return Some(Canon::zero());
    }
    if !g.contains_symbol(x) {
        return Some(g.mul(&Canon::symbol(x)));
    }
    if g.den.is_single_term() {
        if let Some(r) = integrate_laurent(g, x) {
            return Some(r);
        }
    }
    // logarithmic derivative: g = k D'/D
    let dc = Canon::from_poly(g.den.clone());
    let ddx = dc.diff(x);
    if !ddx.is_zero() {
        let k = Canon::from_poly(g.num.clone()).div(&ddx).ok()?;
        if !k.contains_symbol(x) {
            return Some(k.mul(&ln(dc)));
        }
    }
    let n = univariate(&g.num, x)?;
    let mut d = univariate(&g.den, x)?;
    trim(&mut d);
    let (quot, rem) = divrem(&n, &d);
    let mut acc = integrate(&from_univariate(&quot, x), x)?;
    let rem_c = from_univariate(&rem, x);
    if rem_c.is_zero() {
        return Some(acc);
    }
    match d.len() - 1 {
        1 => {
            let part = rem_c.div(&d[1]).ok()?;
            if part.contains_symbol(x) {
                return None;
            }
            acc = acc.add(&part.mul(&ln(from_univariate(&d, x))));
        }
        2 => {
            // rem = alpha D' + beta
            let dp = [d[1].clone(), d[2].scale(&qi(2))];
            let mut r = rem.clone();
            r.resize(2, Canon::zero());
            let alpha = r[1].div(&dp[1]).ok()?;
            let beta = r[0].sub(&alpha.mul(&dp[0]));
            if !alpha.is_zero() {
                acc = acc.add(&alpha.mul(&ln(from_univariate(&d, x))));
            }
            if !beta.is_zero() {
                acc = acc.add(&beta.mul(&integrate_inverse_quadratic(&d, x)?));
            }
        }
        _ => return None,
    }
    Some(acc)
}

/// `exp(a)`, turning rational multiples of logarithms into powers.
pub fn exp_of(a: &Canon) -> Canon {
    if !a.has_unit_denominator() {
        return Canon::func("exp", &[0], vec![a.clone()]);
    }
    let mut product = Canon::one();
    let mut rest = Poly::zero();
    for (m, c) in &a.num.terms {
        let single = (m.len() == 1).then(|| m.iter().next().unwrap());
        match single {
            Some((Atom::Func(f), e)) if f.name == "ln" && e.is_one() && f.derivs == [0] => {
                let u = Canon::from_expr(&f.args[0]).expect("ln argument");
                match u.pow(c) {
                    Ok(p) => product = product.mul(&p),
                    Err(_) => rest.add_term(m.clone(), c.clone()),
                }
            }
            _ => rest.add_term(m.clone(), c.clone()),
        }
    }
    if !rest.is_zero() {
        product = product.mul(&Canon::func("exp", &[0], vec![Canon::from_poly(rest)]));
    }
    product
}

/// Solves `e = 0` for `x`. Handles equations linear in `x`, two-term power
/// equations `a x^p + b x^q = 0`, and inversion through a single `ln`,
/// `exp`, `tan`, `arctan` or radical atom containing `x`.
pub fn solve_for(e: &Canon, x: &Symbol) -> Option<Canon> {
    if !e.contains_symbol(x) {
        return None;
    }
    if let Some(cs) = e.num.coefficients_in(x) {
        if cs.len() == 1 && cs.keys().all(|k| k > &Q::zero()) {
            return Some(Canon::zero());
        }
        if cs.len() == 2 {
            let mut it = cs.into_iter();
            let (e0, c0) = it.next().unwrap();
            let (e1, c1) = it.next().unwrap();
            let ratio = Canon::from_poly(c0).neg().div(&Canon::from_poly(c1)).ok()?;
            let k = &e1 - &e0;
            return ratio.pow(&(Q::one() / k)).ok();
        }
        return None;
    }
    // x sits inside exactly one non-symbol atom
    let inner: Vec<Atom> = e
        .num
        .atoms()
        .into_iter()
        .filter(|a| !matches!(a, Atom::Sym(_)) && a.contains_symbol(x))
        .collect();
    if inner.len() != 1 {
        return None;
    }
    let atom = &inner[0];
    if e.num.atoms().contains(&Atom::Sym(x.clone())) {
        return None;
    }
    if matches!(atom, Atom::Root(_)) {
        return solve_root(e, atom, x);
    }
    let t = Symbol::new("_solve_t");
    let replaced = replace_atom(&e.num, atom, &t);
    let tv = solve_for(&Canon::from_poly(replaced), &t)?;
    let (u, value) = match atom {
        Atom::Func(f) if f.args.len() == 1 && f.derivs == [0] => {
            let u = Canon::from_expr(&f.args[0]).ok()?;
            let v = match f.name.as_str() {
                "ln" => exp_of(&tv),
                "exp" => ln(tv),
                "arctan" => Canon::func("tan", &[0], vec![tv]),
                "tan" => Canon::func("arctan", &[0], vec![tv]),
                _ => return None,
            };
            (u, v)
        }
        _ => return None,
    };
    solve_for(&u.sub(&value), x)
}

/// Radical case: rewrite `B^e` occurrences by a fresh `T = B^g` where `g`
/// is the common exponent, solve for `T` and then `B = T^(1/g)`.
fn solve_root(e: &Canon, atom: &Atom, x: &Symbol) -> Option<Canon> {
    let Atom::Root(b) = atom else { return None };
    let exps: Vec<Q> = e.num.terms.keys().filter_map(|m| m.get(atom).cloned()).collect();
    let g = exps.first()?.clone();
    if exps.iter().any(|k| !(k / &g).is_integer()) {
        return None;
    }
    let t = Symbol::new("_solve_t");
    let mut p = Poly::zero();
    for (m, c) in &e.num.terms {
        let mut m2 = m.clone();
        if let Some(k) = m2.remove(atom) {
            m2.insert(Atom::Sym(t.clone()), (k / &g).clone());
        }
        p.add_term(m2, c.clone());
    }
    let tv = solve_for(&Canon::from_poly(p), &t)?;
    let base = Canon::from_expr(b).ok()?;
    let bv = tv.pow(&(Q::one() / g)).ok()?;
    solve_for(&base.sub(&bv), x)
}

fn replace_atom(p: &Poly, atom: &Atom, t: &Symbol) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in &p.terms {
        let mut m2 = m.clone();
        if let Some(k) = m2.remove(atom) {
            m2.insert(Atom::Sym(t.clone()), k);
        }
        out.add_term(m2, c.clone());
    }
    out
}
