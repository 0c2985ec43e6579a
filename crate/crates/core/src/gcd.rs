//! Multivariate polynomials with integer exponents over the rationals:
//! exact division, gcd by primitive pseudo-remainder sequences, and Yun's
//! squarefree decomposition. Variables are plain indices; the mapping to
//! atoms lives in [`crate::poly`].

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::expr::Q;

pub type Exps = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Exps, Q>,
}

impl IPoly {
    pub fn zero(nvars: usize) -> Self {
        IPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = IPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    fn add_term(&mut self, e: Exps, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &IPoly) -> IPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &IPoly) -> IPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), -c.clone());
        }
        r
    }

    pub fn scale(&self, c: &Q) -> IPoly {
        if c.is_zero() {
            return IPoly::zero(self.nvars);
        }
        IPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, o: &IPoly) -> IPoly {
        let mut r = IPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    /// Coefficients with respect to variable `v`.
    pub fn coeffs(&self, v: usize) -> BTreeMap<u32, IPoly> {
        let mut out: BTreeMap<u32, IPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[v];
            e2[v] = 0;
            out.entry(k).or_insert_with(|| IPoly::zero(self.nvars)).add_term(e2, c.clone());
        }
        out
    }

    fn shift(&self, v: usize, k: u32) -> IPoly {
        IPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[v] += k;
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    fn lc(&self, v: usize) -> IPoly {
        let d = self.degree(v);
        self.coeffs(v).remove(&d).unwrap_or_else(|| IPoly::zero(self.nvars))
    }

    pub fn derivative(&self, v: usize) -> IPoly {
        let mut r = IPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] > 0 {
                let mut e2 = e.clone();
                e2[v] -= 1;
                r.add_term(e2, c * Q::from_integer(e[v].into()));
            }
        }
        r
    }

    /// Leading rational coefficient under lexicographic order.
    pub fn lead_coeff(&self) -> Q {
        self.terms.values().next_back().cloned().unwrap_or_else(Q::zero)
    }

    pub fn monic(&self) -> IPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Q::one() / self.lead_coeff()))
    }

    fn main_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.degree(v) > 0)
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &IPoly) -> Option<IPoly> {
        if d.is_zero() {
            return None;
        }
        let (dl_e, dl_c) = d.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = IPoly::zero(self.nvars);
        while let Some((re, rc)) = rem.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&dl_e).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exps = re.iter().zip(&dl_e).map(|(a, b)| a - b).collect();
            let qc = rc / &dl_c;
            for (de, dc) in &d.terms {
                let e: Exps = qe.iter().zip(de).map(|(a, b)| a + b).collect();
                rem.add_term(e, -(&qc * dc));
            }
            quot.terms.insert(qe, qc);
        }
        Some(quot)
    }

    /// Pseudo-remainder of `self` by `b` in variable `v`.
    fn prem(&self, b: &IPoly, v: usize) -> IPoly {
        let db = b.degree(v);
        let lb = b.lc(v);
        let mut r = self.clone();
        while !r.is_zero() && r.degree(v) >= db {
            let dr = r.degree(v);
            let lr = r.lc(v);
            r = r.mul(&lb).sub(&b.mul(&lr).shift(v, dr - db));
        }
        r
    }

    /// Univariate image in `v` with every other variable set to a fixed
    /// integer.
    fn image(&self, v: usize) -> IPoly {
        let mut out = IPoly::zero(1);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if i != v && k > 0 {
                    t *= Q::from_integer((3 + 2 * i as i64).into()).pow(k as i32);
                }
            }
            out.add_term(vec![e[v]], t);
        }
        out
    }

    /// Gcd of the coefficients with respect to `v`.
    pub fn content(&self, v: usize) -> IPoly {
        let mut g = IPoly::zero(self.nvars);
        for c in self.coeffs(v).into_values() {
            g = gcd(&g, &c);
            if g.is_constant() {
                return IPoly::constant(self.nvars, Q::one());
            }
        }
        g
    }

    fn primitive(&self, v: usize) -> IPoly {
        let c = self.content(v);
        self.div_exact(&c).expect("content divides").monic()
    }
}

/// Monic greatest common divisor (lex leading coefficient 1).
pub fn gcd(a: &IPoly, b: &IPoly) -> IPoly {
    let n = a.nvars;
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return IPoly::constant(n, Q::one());
    }
    // deg_w gcd = 0 whenever the images in w are coprime with both
    // leading coefficients surviving the evaluation.
    let coprime_in = |w: usize| {
        if a.degree(w) == 0 || b.degree(w) == 0 {
            return true;
        }
        let (ia, ib) = (a.image(w), b.image(w));
        ia.degree(0) == a.degree(w) && ib.degree(0) == b.degree(w) && gcd(&ia, &ib).is_constant()
    };
    if n > 1 && (0..n).all(coprime_in) {
        return IPoly::constant(n, Q::one());
    }
    if a.div_exact(b).is_some() {
        return b.monic();
    }
    if b.div_exact(a).is_some() {
        return a.monic();
    }
    let va = a.main_var().unwrap();
    let vb = b.main_var().unwrap();
    let v = va.max(vb);
    if a.degree(v) == 0 {
        return gcd(a, &b.content(v));
    }
    if b.degree(v) == 0 {
        return gcd(&a.content(v), b);
    }
    let ca = a.content(v);
    let cb = b.content(v);
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).unwrap();
    let mut r = b.div_exact(&cb).unwrap();
    if p.degree(v) < r.degree(v) {
        std::mem::swap(&mut p, &mut r);
    }
    // Primitive parts whose images at a point keeping both leading
    // coefficients are coprime have a gcd of degree zero in `v`.
    let (ip, ir) = if n > 1 { (p.image(v), r.image(v)) } else { (p.clone(), r.clone()) };
    if n > 1 && ip.degree(0) == p.degree(v) && ir.degree(0) == r.degree(v) && gcd(&ip, &ir).is_constant() {
        return c.monic();
    }
    loop {
        let rem = p.prem(&r, v);
        p = r;
        if rem.is_zero() {
            break;
        }
        if rem.degree(v) == 0 {
            // coprime in v
            return c.monic();
        }
        r = rem.primitive(v);
    }
    p.primitive(v).mul(&c).monic()
}

/// Squarefree decomposition: `p = constant * prod(f_i^m_i)` with each `f_i`
/// monic and pairwise coprime.
pub fn squarefree(p: &IPoly) -> (Q, Vec<(IPoly, u32)>) {
    if p.is_zero() {
        return (Q::zero(), vec![]);
    }
    if p.is_constant() {
        return (p.lead_coeff(), vec![]);
    }
    let v = p.main_var().unwrap();
    let cont = p.content(v);
    let pp = p.div_exact(&cont).unwrap();
    let lc = pp.lead_coeff();
    let f = pp.monic();
    let mut out = Vec::new();

    let fp = f.derivative(v);
    let a0 = gcd(&f, &fp);
    let mut b = f.div_exact(&a0).unwrap();
    let c = fp.div_exact(&a0).unwrap();
    let mut d = c.sub(&b.derivative(v));
    let mut i = 1;
    while !b.is_constant() {
        let a = gcd(&b, &d);
        b = b.div_exact(&a).unwrap();
        let c = d.div_exact(&a).unwrap();
        d = c.sub(&b.derivative(v));
        if !a.is_constant() {
            out.push((a.monic(), i));
        }
        i += 1;
    }
    // b is now a constant; fold leftover scale
    let mut scale = lc * b.lead_coeff();
    let (cc, cf) = squarefree(&cont);
    scale *= cc;
    out.extend(cf);
    (scale, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::qi;

    fn poly(n: usize, ts: &[(&[u32], i64)]) -> IPoly {
        let mut p = IPoly::zero(n);
        for (e, c) in ts {
            p.add_term(e.to_vec(), qi(*c));
        }
        p
    }

    #[test]
    fn gcd_of_shared_linear_factor() {
        // (x+y)(x-1) and (x+y)(y+2)
        let xy = poly(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let a = xy.mul(&poly(2, &[(&[1, 0], 1), (&[0, 0], -1)]));
        let b = xy.mul(&poly(2, &[(&[0, 1], 1), (&[0, 0], 2)]));
        assert_eq!(gcd(&a, &b), xy.monic());
    }

    #[test]
    fn coprime_gcd_is_one() {
        let a = poly(2, &[(&[2, 0], 1), (&[0, 0], 1)]);
        let b = poly(2, &[(&[1, 1], 1), (&[0, 0], 3)]);
        assert!(gcd(&a, &b).is_constant());
    }

    #[test]
    fn squarefree_detects_square() {
        // (1 + x^2)^2 * 3
        let base = poly(1, &[(&[2], 1), (&[0], 1)]);
        let p = base.mul(&base).scale(&qi(3));
        let (c, fs) = squarefree(&p);
        assert_eq!(c, qi(3));
        assert_eq!(fs, vec![(base, 2)]);
    }

    #[test]
    fn exact_division_rejects_non_divisor() {
        let a = poly(1, &[(&[2], 1), (&[0], 1)]);
        let b = poly(1, &[(&[1], 1), (&[0], 1)]);
        assert!(a.div_exact(&b).is_none());
        assert_eq!(a.mul(&b).div_exact(&b).unwrap(), a);
    }
}
