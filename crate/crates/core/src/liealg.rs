//! Finite-dimensional Lie algebras given by rational structure constants.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{qi, Q};
use crate::linalg::{self, Matrix};
use crate::poly::Canon;
use crate::vfield::{self, PairType, VectorField};

/// `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    pub labels: Vec<String>,
    pub c: Vec<Vec<Vec<Q>>>,
}

/// Sparse wire form `{"basis": [...], "c": [[i, j, k, "p/q"], ...]}` with
/// zero-based indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraWire {
    pub basis: Vec<String>,
    pub c: Vec<(usize, usize, usize, String)>,
}

fn zero_tensor(n: usize) -> Vec<Vec<Vec<Q>>> {
    vec![vec![vec![Q::zero(); n]; n]; n]
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

impl LieAlgebra {
    /// Builds the tensor from `[e_i, e_j] = value e_k` triples, filling in
    /// antisymmetry. Fails if the triples contradict antisymmetry or the
    /// Jacobi identity.
    pub fn new(labels: Vec<String>, triples: &[(usize, usize, usize, Q)]) -> Result<Self> {
        let l = LieAlgebra::unchecked(labels, triples)?;
        if !l.jacobi_check() {
            return Err(Error::InvalidInput("structure constants violate the Jacobi identity".into()));
        }
        Ok(l)
    }

    /// Like [`LieAlgebra::new`] without the Jacobi check.
    pub fn unchecked(labels: Vec<String>, triples: &[(usize, usize, usize, Q)]) -> Result<Self> {
        let n = labels.len();
        let mut c = zero_tensor(n);
        let mut set = vec![vec![vec![false; n]; n]; n];
        for (i, j, k, v) in triples {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n {
                return Err(Error::InvalidInput(format!("index out of range in ({i}, {j}, {k})")));
            }
            if i == j && !v.is_zero() {
                return Err(Error::InvalidInput(format!("[{0}, {0}] must vanish", labels[i])));
            }
            for (a, b, val) in [(i, j, v.clone()), (j, i, -v.clone())] {
                if set[a][b][k] && c[a][b][k] != val {
                    return Err(Error::InvalidInput(format!("conflicting constants for [{}, {}]", labels[a], labels[b])));
                }
                set[a][b][k] = true;
                c[a][b][k] = val;
            }
        }
        Ok(LieAlgebra { labels, c })
    }

    pub fn from_wire(w: &AlgebraWire) -> Result<Self> {
        let mut triples = Vec::new();
        for (i, j, k, v) in &w.c {
            let e = crate::parse::parse(v)?;
            let val = Canon::from_expr(&e)?
                .as_constant()
                .ok_or_else(|| Error::InvalidInput(format!("structure constant `{v}` is not rational")))?;
            triples.push((*i, *j, *k, val));
        }
        LieAlgebra::new(w.basis.clone(), &triples)
    }

    pub fn to_wire(&self) -> AlgebraWire {
        let mut c = Vec::new();
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    if !self.c[i][j][k].is_zero() {
                        c.push((i, j, k, self.c[i][j][k].to_string()));
                    }
                }
            }
        }
        AlgebraWire { basis: self.labels.clone(), c }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Q> {
        unit(self.dim(), i)
    }

    /// Bracket of coefficient vectors.
    pub fn bracket(&self, u: &[Q], v: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if v[j].is_zero() {
                    continue;
                }
                let f = &u[i] * &v[j];
                for k in 0..n {
                    if !self.c[i][j][k].is_zero() {
                        out[k] += &f * &self.c[i][j][k];
                    }
                }
            }
        }
        out
    }

    /// Structure constants of a realization by vector fields. Each
    /// commutator must be a rational-constant combination of the fields.
    pub fn from_fields(labels: Vec<String>, fields: &[VectorField]) -> Result<Self> {
        let n = fields.len();
        if labels.len() != n {
            return Err(Error::InvalidInput("one label per field required".into()));
        }
        let mut triples = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let br = vfield::commutator(&fields[i], &fields[j])?;
                match vfield::span_coefficients(&br, fields)? {
                    Some(cs) => {
                        for (k, v) in cs.into_iter().enumerate() {
                            if !v.is_zero() {
                                triples.push((i, j, k, v));
                            }
                        }
                    }
                    None => {
                        return Err(Error::Closure {
                            left: labels[i].clone(),
                            right: labels[j].clone(),
                            residual: br.to_string(),
                        })
                    }
                }
            }
        }
        LieAlgebra::new(labels, &triples)
    }

    pub fn jacobi_check(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (self.basis_vector(i), self.basis_vector(j), self.basis_vector(k));
                    let t1 = self.bracket(&a, &self.bracket(&b, &c));
                    let t2 = self.bracket(&b, &self.bracket(&c, &a));
                    let t3 = self.bracket(&c, &self.bracket(&a, &b));
                    if t1.iter().zip(&t2).zip(&t3).any(|((x, y), z)| !(x + y + z).is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `[U, V]` for subspaces given by spanning rows, as an echelon basis.
    pub fn bracket_spaces(&self, u: &Matrix, v: &Matrix) -> Matrix {
        let mut rows = Vec::new();
        for a in u {
            for b in v {
                rows.push(self.bracket(a, b));
            }
        }
        echelon(rows, self.dim())
    }

    /// `L ⊇ [L,L] ⊇ ...` until the chain stabilizes.
    pub fn derived_series(&self) -> Vec<Matrix> {
        let n = self.dim();
        let mut cur = echelon((0..n).map(|i| unit(n, i)).collect(), n);
        let mut out = vec![cur.clone()];
        loop {
            let next = self.bracket_spaces(&cur, &cur);
            let done = next.len() == cur.len();
            if !done {
                out.push(next.clone());
            }
            if done || next.is_empty() {
                break;
            }
            cur = next;
        }
        out
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last().map(|m| m.is_empty()).unwrap_or(true)
    }

    /// Coefficients of `element` over the basis vectors indexed by `subset`.
    pub fn span_membership(&self, element: &[Q], subset: &[usize]) -> Option<Vec<Q>> {
        let n = self.dim();
        if element.iter().all(Q::is_zero) {
            return Some(vec![Q::zero(); subset.len()]);
        }
        // columns are the subset vectors
        let a: Matrix = (0..n).map(|r| subset.iter().map(|&i| if i == r { Q::one() } else { Q::zero() }).collect()).collect();
        linalg::solve(&a, element, subset.len())
    }

    pub fn is_subalgebra(&self, subset: &[usize]) -> bool {
        subset.iter().all(|&i| {
            subset.iter().all(|&j| {
                let br = self.bracket(&self.basis_vector(i), &self.basis_vector(j));
                self.span_membership(&br, subset).is_some()
            })
        })
    }

    pub fn is_ideal(&self, subset: &[usize]) -> bool {
        subset.iter().all(|&i| {
            (0..self.dim()).all(|j| {
                let br = self.bracket(&self.basis_vector(i), &self.basis_vector(j));
                self.span_membership(&br, subset).is_some()
            })
        })
    }

    /// Tensor in the basis `f_a = sum_i m[a][i] e_i`.
    pub fn change_basis(&self, m: &Matrix, labels: Option<Vec<String>>) -> Result<LieAlgebra> {
        let n = self.dim();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("basis change must be square".into()));
        }
        let inv = linalg::inverse(m).ok_or_else(|| Error::InvalidInput("basis change is singular".into()))?;
        let mut c = zero_tensor(n);
        for a in 0..n {
            for b in 0..n {
                let br = self.bracket(&m[a], &m[b]);
                for (cidx, slot) in c[a][b].iter_mut().enumerate() {
                    *slot = (0..n).map(|k| &br[k] * &inv[k][cidx]).sum();
                }
            }
        }
        Ok(LieAlgebra { labels: labels.unwrap_or_else(|| self.labels.clone()), c })
    }

    fn same_tensor(&self, other: &LieAlgebra) -> bool {
        self.c == other.c
    }
}

fn echelon(rows: Vec<Vec<Q>>, n: usize) -> Matrix {
    let mut m: Matrix = rows.into_iter().filter(|r| r.iter().any(|v| !v.is_zero())).collect();
    if m.is_empty() {
        return m;
    }
    for r in m.iter_mut() {
        r.resize(n, Q::zero());
    }
    linalg::rref(&mut m);
    m
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NamedAlgebra {
    A3_6,
    A3_7(String),
    A4_1,
    L2(PairType),
    L2Abelian,
    L2NonAbelian,
    Unknown,
}

impl fmt::Display for NamedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedAlgebra::A3_6 => write!(f, "A3_6"),
            NamedAlgebra::A3_7(l) => write!(f, "A3_7(l={l})"),
            NamedAlgebra::A4_1 => write!(f, "A4_1"),
            NamedAlgebra::L2(t) => write!(f, "L2_{t}"),
            NamedAlgebra::L2Abelian => write!(f, "L2_abelian"),
            NamedAlgebra::L2NonAbelian => write!(f, "L2_nonabelian"),
            NamedAlgebra::Unknown => write!(f, "Unknown"),
        }
    }
}

/// A named algebra with the basis change (rows = new basis vectors in the
/// old basis) that produces its standard relations.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedMatch {
    pub tag: NamedAlgebra,
    pub transform: Option<Matrix>,
}

/// Standard relations, Mubarakzyanov numbering, zero-based.
pub fn standard(tag: &NamedAlgebra) -> Option<LieAlgebra> {
    let lbl = |n: usize| (1..=n).map(|i| format!("e{i}")).collect::<Vec<_>>();
    match tag {
        NamedAlgebra::A3_6 => LieAlgebra::new(lbl(3), &[(0, 2, 1, qi(-1)), (1, 2, 0, qi(1))]).ok(),
        NamedAlgebra::A3_7(l) => {
            let l = Canon::from_expr(&crate::parse::parse(l).ok()?).ok()?.as_constant()?;
            LieAlgebra::new(
                lbl(3),
                &[(0, 2, 0, l.clone()), (0, 2, 1, qi(-1)), (1, 2, 0, qi(1)), (1, 2, 1, l)],
            )
            .ok()
        }
        NamedAlgebra::A4_1 => LieAlgebra::new(lbl(4), &[(1, 3, 0, qi(1)), (2, 3, 1, qi(1))]).ok(),
        NamedAlgebra::L2Abelian | NamedAlgebra::L2(PairType::I) | NamedAlgebra::L2(PairType::II) => {
            LieAlgebra::new(lbl(2), &[]).ok()
        }
        NamedAlgebra::L2NonAbelian | NamedAlgebra::L2(PairType::III) | NamedAlgebra::L2(PairType::IV) => {
            LieAlgebra::new(lbl(2), &[(0, 1, 0, qi(1))]).ok()
        }
        _ => None,
    }
}

fn combine(rows: &Matrix, coeffs: &[Q]) -> Vec<Q> {
    let n = rows.first().map(Vec::len).unwrap_or(0);
    let mut out = vec![Q::zero(); n];
    for (r, c) in rows.iter().zip(coeffs) {
        for (o, v) in out.iter_mut().zip(r) {
            *o += c * v;
        }
    }
    out
}

fn outside(space: &Matrix, n: usize) -> Option<Vec<Q>> {
    (0..n).map(|i| unit(n, i)).find(|e| {
        let mut rows = space.clone();
        rows.push(e.clone());
        linalg::rank(&rows) > space.len()
    })
}

fn scale(v: &[Q], k: &Q) -> Vec<Q> {
    v.iter().map(|x| x * k).collect()
}

fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn rational_sqrt(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    (&n * &n == *v.numer() && &d * &d == *v.denom()).then(|| Q::new(n, d))
}

/// Three dimensions with a two-dimensional abelian derived algebra on
/// which `ad z` has eigenvalues `l ± i`.
fn match_three(l: &LieAlgebra) -> Option<NamedMatch> {
    let series = l.derived_series();
    let d = series.get(1)?;
    if d.len() != 2 || !l.bracket_spaces(d, d).is_empty() {
        return None;
    }
    let z = outside(d, 3)?;
    // matrix of v -> [v, z] on the basis d
    let image = |v: &[Q]| -> Option<Vec<Q>> {
        let w = l.bracket(v, &z);
        let cols: Matrix = (0..3).map(|r| vec![d[0][r].clone(), d[1][r].clone()]).collect();
        linalg::solve(&cols, &w, 2)
    };
    let t0 = image(&d[0])?;
    let t1 = image(&d[1])?;
    let trace = &t0[0] + &t1[1];
    let det = &t0[0] * &t1[1] - &t1[0] * &t0[1];
    let im2 = &det - &trace * &trace / qi(4);
    if !im2.is_positive() {
        return None;
    }
    let k = Q::one() / rational_sqrt(&im2)?;
    let mut lval = &k * &trace / qi(2);
    let mut zz = scale(&z, &k);
    if lval.is_negative() {
        lval = -lval;
        zz = scale(&zz, &-Q::one());
    }
    let x = d[0].clone();
    let ax = l.bracket(&x, &zz);
    let y = sub(&scale(&x, &lval), &ax);
    let m = vec![x, y, zz];
    let tag = if lval.is_zero() { NamedAlgebra::A3_6 } else { NamedAlgebra::A3_7(lval.to_string()) };
    Some(NamedMatch { tag, transform: Some(m) })
}

/// Four dimensions: `[e2,e4] = e1`, `[e3,e4] = e2` with `span{e1,e2,e3}`
/// the abelian centralizer of the derived algebra.
fn match_a41(l: &LieAlgebra) -> Option<NamedMatch> {
    let n = 4;
    let series = l.derived_series();
    let d = series.get(1)?;
    if d.len() != 2 {
        return None;
    }
    // centralizer of d: x with [x, d_i] = 0
    let mut eqs: Matrix = Vec::new();
    for di in d {
        for k in 0..n {
            eqs.push((0..n).map(|a| l.bracket(&unit(n, a), di)[k].clone()).collect());
        }
    }
    let cent = echelon(linalg::nullspace(&eqs, n), n);
    if cent.len() != 3 || !l.bracket_spaces(&cent, &cent).is_empty() {
        return None;
    }
    let e4 = outside(&cent, n)?;
    let e3 = cent.iter().find(|a| {
        let once = l.bracket(a, &e4);
        l.bracket(&once, &e4).iter().any(|v| !v.is_zero())
    })?;
    let e2 = l.bracket(e3, &e4);
    let e1 = l.bracket(&e2, &e4);
    Some(NamedMatch { tag: NamedAlgebra::A4_1, transform: Some(vec![e1, e2, e3.clone(), e4]) })
}

fn match_two(l: &LieAlgebra, fields: Option<&[VectorField]>) -> Option<NamedMatch> {
    let d = l.derived_series();
    let abelian = d.len() == 1 || d[1].is_empty();
    let m = if abelian {
        vec![unit(2, 0), unit(2, 1)]
    } else {
        let x = l.bracket(&unit(2, 0), &unit(2, 1));
        let (yv, lam) = (0..2).find_map(|j| {
            let e = unit(2, j);
            let br = l.bracket(&x, &e);
            let idx = x.iter().position(|v| !v.is_zero())?;
            let lam = &br[idx] / &x[idx];
            (!lam.is_zero()).then_some((e, lam))
        })?;
        vec![x, scale(&yv, &(Q::one() / lam))]
    };
    let tag = match fields {
        Some(fs) if fs.len() == 2 => {
            let realize = |row: &Vec<Q>| -> Option<VectorField> {
                let a = fs[0].scale_q(&row[0]);
                let b = fs[1].scale_q(&row[1]);
                a.add(&b).ok()
            };
            let fx = realize(&m[0])?;
            let fy = realize(&m[1])?;
            NamedAlgebra::L2(vfield::classify_pair(&fx, &fy).ok()?)
        }
        _ if abelian => NamedAlgebra::L2Abelian,
        _ => NamedAlgebra::L2NonAbelian,
    };
    Some(NamedMatch { tag, transform: Some(m) })
}

/// Structural matching against the catalog of named algebras. Every
/// reported transform is checked to reproduce the standard relations.
pub fn match_named(l: &LieAlgebra, fields: Option<&[VectorField]>) -> NamedMatch {
    let found = match l.dim() {
        2 => match_two(l, fields),
        3 => match_three(l),
        4 => match_a41(l),
        _ => None,
    };
    let unknown = NamedMatch { tag: NamedAlgebra::Unknown, transform: None };
    let Some(found) = found else { return unknown };
    let Some(std) = standard(&found.tag) else { return unknown };
    match found.transform.as_ref().map(|m| l.change_basis(m, None)) {
        Some(Ok(t)) if t.same_tensor(&std) => found,
        _ => unknown,
    }
}

/// Reconstructs `[e_i, e_j]` as a vector field from the tensor.
pub fn realize_bracket(l: &LieAlgebra, fields: &[VectorField], i: usize, j: usize) -> Result<VectorField> {
    let mut acc = VectorField::zero(fields[0].vars.clone());
    for (k, f) in fields.iter().enumerate() {
        if !l.c[i][j][k].is_zero() {
            acc = acc.add(&f.scale_q(&l.c[i][j][k]))?;
        }
    }
    Ok(acc)
}

/// Applies the combination `coeffs` of the basis to fields.
pub fn combination(fields: &[VectorField], coeffs: &[Q]) -> Result<VectorField> {
    let mut acc = VectorField::zero(fields[0].vars.clone());
    for (f, c) in fields.iter().zip(coeffs) {
        if !c.is_zero() {
            acc = acc.add(&f.scale_q(c))?;
        }
    }
    Ok(acc)
}

/// Rows of the subspace spanned by the given basis indices.
pub fn subspace(l: &LieAlgebra, subset: &[usize]) -> Matrix {
    echelon(subset.iter().map(|&i| l.basis_vector(i)).collect(), l.dim())
}

pub fn in_subspace(space: &Matrix, v: &[Q]) -> bool {
    let mut rows = space.clone();
    rows.push(v.to_vec());
    linalg::rank(&rows) == linalg::rank(space)
}

pub fn combine_rows(rows: &Matrix, coeffs: &[Q]) -> Vec<Q> {
    combine(rows, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vfield::Chart;

    fn fields(chart: &Chart, specs: &[(&str, &str)]) -> Vec<VectorField> {
        specs.iter().map(|(a, b)| VectorField::parse_planar(chart, a, b).unwrap()).collect()
    }

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn a41() -> LieAlgebra {
        let ch = Chart::new("x", "y", 0);
        let fs = fields(&ch, &[("0", "1"), ("0", "x"), ("0", "x^2"), ("1", "0")]);
        LieAlgebra::from_fields(labels(&["X", "Y", "Z", "U"]), &fs).unwrap()
    }

    #[test]
    fn tensors_from_fields() {
        let l = a41();
        assert_eq!(l.c[1][3][0], qi(-1));
        assert_eq!(l.c[2][3][1], qi(-2));
        let ch = Chart::new("r", "s", 0);
        let fs = fields(&ch, &[("0", "1"), ("0", "r"), ("r^2+1", "r*s")]);
        let l = LieAlgebra::from_fields(labels(&["X", "Y", "Z"]), &fs).unwrap();
        assert_eq!(l.c[0][2][1], qi(1));
        assert_eq!(l.c[1][2][0], qi(-1));
        assert!(l.c[0][1].iter().all(Q::is_zero));
        let ch = Chart::new("x", "y", 0);
        let bad = fields(&ch, &[("1", "0"), ("0", "x^2")]);
        assert!(matches!(LieAlgebra::from_fields(labels(&["U", "Z"]), &bad), Err(Error::Closure { .. })));
    }

    #[test]
    fn jacobi() {
        assert!(a41().jacobi_check());
        let bad = LieAlgebra::unchecked(
            labels(&["X", "Y", "Z"]),
            &[(0, 1, 2, qi(1)), (1, 2, 0, qi(1)), (2, 0, 0, qi(1))],
        )
        .unwrap();
        assert!(!bad.jacobi_check());
        assert!(LieAlgebra::new(labels(&["a", "b"]), &[]).unwrap().jacobi_check());
    }

    #[test]
    fn series_and_subalgebras() {
        let l = a41();
        let s = l.derived_series();
        assert_eq!(s.iter().map(Vec::len).collect::<Vec<_>>(), vec![4, 2, 0]);
        assert!(l.is_solvable());
        assert!(l.is_subalgebra(&[3, 0, 1]));
        assert!(!l.is_subalgebra(&[3, 2, 0]));
        let minus_two_y = vec![qi(0), qi(-2), qi(0), qi(0)];
        assert!(l.span_membership(&minus_two_y, &[3, 0]).is_none());
        assert_eq!(l.span_membership(&minus_two_y, &[3, 0, 1]).unwrap(), vec![qi(0), qi(0), qi(-2)]);
    }

    #[test]
    fn named_matches() {
        let l = a41();
        assert_eq!(match_named(&l, None).tag, NamedAlgebra::A4_1);
        let ch = Chart::new("r", "s", 0);
        let fs = fields(&ch, &[("0", "1"), ("0", "r"), ("r^2+1", "r*s")]);
        let l3 = LieAlgebra::from_fields(labels(&["X", "Y", "Z"]), &fs).unwrap();
        assert_eq!(match_named(&l3, None).tag, NamedAlgebra::A3_6);
        let a37 = standard(&NamedAlgebra::A3_7("2".into())).unwrap();
        assert_eq!(match_named(&a37, None).tag, NamedAlgebra::A3_7("2".into()));
        let two = fields(&ch, &[("0", "1"), ("0", "s")]);
        let l2 = LieAlgebra::from_fields(labels(&["X", "Y"]), &two).unwrap();
        assert_eq!(match_named(&l2, Some(&two)).tag, NamedAlgebra::L2(PairType::III));
        assert_eq!(match_named(&l2, None).tag, NamedAlgebra::L2NonAbelian);
    }

    #[test]
    fn basis_changes() {
        let ch = Chart::new("r", "s", 0);
        let fs = fields(&ch, &[("0", "1"), ("0", "r"), ("r^2+1", "r*s")]);
        let l = LieAlgebra::from_fields(labels(&["X", "Y", "Z"]), &fs).unwrap();
        let id: Matrix = (0..3).map(|i| unit(3, i)).collect();
        assert_eq!(l.change_basis(&id, None).unwrap(), l);
        let flip = vec![unit(3, 0), scale(&unit(3, 1), &qi(-1)), unit(3, 2)];
        let t = l.change_basis(&flip, None).unwrap();
        assert_eq!(t.c, standard(&NamedAlgebra::A3_6).unwrap().c);
        let sing = vec![unit(3, 0), unit(3, 0), unit(3, 2)];
        assert!(l.change_basis(&sing, None).is_err());
    }

    #[test]
    fn ideals() {
        // [X,Z] = Y, [Y,Z] = 0
        let l = LieAlgebra::new(labels(&["X", "Y", "Z"]), &[(0, 2, 1, qi(1))]).unwrap();
        assert!(l.is_ideal(&[0, 1]));
        assert!(!l.is_ideal(&[0]));
    }
}
