//! Seeded randomized property suites: commutator antisymmetry and Jacobi,
//! the prolongation homomorphism, and normal-form laws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::expr::{q, Expr};
use crate::parse::parse;
use crate::poly::Canon;
use crate::symexpr::{equal, normalize};
use crate::vfield::{commutator, prolong, Chart, VectorField};

#[derive(Clone, Debug, Serialize)]
pub struct PropertyCount {
    pub name: String,
    pub passed: usize,
    pub total: usize,
}

impl PropertyCount {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Sizes {
    /// Random polynomial fields; consecutive pairs and triples are tested.
    pub fields: usize,
    /// Field pairs for the prolongation homomorphism, orders 1 to 3.
    pub prolongation_pairs: usize,
    /// Random expression triples.
    pub expressions: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes { fields: 120, prolongation_pairs: 60, expressions: 520 }
    }
}

/// Polynomial of total degree at most 2 in `x, y` with small integer
/// coefficients.
pub fn random_polynomial(rng: &mut ChaCha8Rng, x: &str, y: &str) -> String {
    let mut terms = Vec::new();
    for (i, j) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
        let a: i64 = rng.gen_range(-3..=3);
        if a != 0 && rng.gen_bool(0.6) {
            terms.push(format!("({a})*{x}^{i}*{y}^{j}"));
        }
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn random_field(rng: &mut ChaCha8Rng, chart: &Chart) -> Result<VectorField> {
    let (x, y) = (chart.independent.as_str(), chart.dependent.as_str());
    let xi = random_polynomial(rng, x, y);
    let eta = random_polynomial(rng, x, y);
    VectorField::parse_planar(chart, &xi, &eta)
}

/// Random tree over `x, y, z` with rationals, sums, products, small powers,
/// denominators `x + k` or `y + k` with `k > 0`, and `sin`/`exp` atoms.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    let leaf = |rng: &mut ChaCha8Rng| match rng.gen_range(0..4) {
        0 => Expr::int(rng.gen_range(-4..=4)),
        1 => Expr::num(q(rng.gen_range(-5..=5), rng.gen_range(1..=4))),
        _ => Expr::sym(["x", "y", "z"][rng.gen_range(0..3)]),
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..7) {
        0 | 1 => Expr::Add((0..rng.gen_range(2..=3)).map(|_| random_expr(rng, depth - 1)).collect()),
        2 | 3 => Expr::Mul((0..2).map(|_| random_expr(rng, depth - 1)).collect()),
        4 => random_expr(rng, depth - 1).powi(rng.gen_range(0..=4 - depth as i64)),
        5 => {
            let den = Expr::Add(vec![Expr::sym(["x", "y"][rng.gen_range(0..2)]), Expr::int(rng.gen_range(1..=3))]);
            Expr::Mul(vec![random_expr(rng, depth - 1), den.recip()])
        }
        _ => Expr::func(["sin", "exp"][rng.gen_range(0..2)], vec![leaf(rng)]),
    }
}

#[derive(Default)]
struct Tally(Vec<PropertyCount>);

impl Tally {
    fn add(&mut self, name: &str, ok: bool) {
        let i = match self.0.iter().position(|p| p.name == name) {
            Some(i) => i,
            None => {
                self.0.push(PropertyCount { name: name.into(), passed: 0, total: 0 });
                self.0.len() - 1
            }
        };
        self.0[i].passed += ok as usize;
        self.0[i].total += 1;
    }
}

fn same(a: &VectorField, b: &VectorField) -> Result<bool> {
    Ok(a.sub(b)?.is_zero())
}

pub fn field_properties(rng: &mut ChaCha8Rng, sizes: &Sizes) -> Result<Vec<PropertyCount>> {
    let xy = Chart::new("x", "y", 0);
    let fields: Vec<VectorField> = (0..sizes.fields).map(|_| random_field(rng, &xy)).collect::<Result<_>>()?;
    let mut t = Tally::default();
    for w in fields.windows(3) {
        let (a, b, e) = (&w[0], &w[1], &w[2]);
        t.add("commutator antisymmetry", commutator(a, b)?.add(&commutator(b, a)?)?.is_zero());
        let j = commutator(a, &commutator(b, e)?)?
            .add(&commutator(b, &commutator(e, a)?)?)?
            .add(&commutator(e, &commutator(a, b)?)?)?;
        t.add("Jacobi identity", j.is_zero());
    }
    for i in 0..sizes.prolongation_pairs {
        let k = 1 + i % 3;
        let chart = Chart::new("x", "y", k);
        let (a, b) = (random_field(rng, &xy)?, random_field(rng, &xy)?);
        let lhs = prolong(&commutator(&a, &b)?, &chart, k)?;
        let rhs = commutator(&prolong(&a, &chart, k)?, &prolong(&b, &chart, k)?)?;
        t.add("prolongation homomorphism, orders 1..3", same(&lhs, &rhs)?);
    }
    Ok(t.0)
}

pub fn expression_properties(rng: &mut ChaCha8Rng, sizes: &Sizes) -> Result<Vec<PropertyCount>> {
    let mut t = Tally::default();
    for _ in 0..sizes.expressions {
        let (a, b, e) = (random_expr(rng, 3), random_expr(rng, 2), random_expr(rng, 2));
        let n = normalize(&a)?;
        t.add("normalize is idempotent", normalize(&n)? == n);
        t.add("printed form reparses to the same value", normalize(&parse(&n.to_string())?)? == n);
        let tree_sum = equal(&(a.clone() + b.clone()), &Canon::from_expr(&a)?.add(&Canon::from_expr(&b)?).to_expr())?;
        t.add("tree sum agrees with canonical sum", tree_sum);
        let (a, b, e) = (Canon::from_expr(&a)?, Canon::from_expr(&b)?, Canon::from_expr(&e)?);
        t.add("a + b = b + a", a.add(&b) == b.add(&a));
        t.add("(a + b) + e = a + (b + e)", a.add(&b).add(&e) == a.add(&b.add(&e)));
        t.add("a b = b a", a.mul(&b) == b.mul(&a));
        t.add("(a b) e = a (b e)", a.mul(&b).mul(&e) == a.mul(&b.mul(&e)));
        t.add("a (b + e) = a b + a e", a.mul(&b.add(&e)) == a.mul(&b).add(&a.mul(&e)));
        t.add("a - a = 0 and 1 a = a", a.sub(&a).is_zero() && Canon::one().mul(&a) == a);
    }
    Ok(t.0)
}

/// All suites from one seed.
pub fn run(seed: u64, sizes: &Sizes) -> Result<Vec<PropertyCount>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = field_properties(&mut rng, sizes)?;
    out.extend(expression_properties(&mut rng, sizes)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass_and_are_reproducible() {
        let sizes = Sizes { fields: 8, prolongation_pairs: 3, expressions: 10 };
        let a = run(5, &sizes).unwrap();
        assert!(a.iter().all(|p| p.ok()));
        assert_eq!(a[0].total, 6);
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(random_expr(&mut r1, 3), random_expr(&mut r2, 3));
    }
}
