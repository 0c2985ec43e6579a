//! Inputs shared by the benchmarks in `benches/`.

use hidsym::liealg::LieAlgebra;
use hidsym::Q;

/// Expressions of growing size for parsing and normalization.
pub const EXPRESSIONS: [(&str, &str); 3] = [
    ("rational", "(x^2 - 1)/(x - 1) + 1/(x + 1)"),
    ("nested", "((x + y)^4 - (x - y)^4)/(x*y) + sin(x)^2*(y + 1)/(y^2 - 1)"),
    ("radical", "(y''^(5/3)*f(y''^(2/3) + x^2*y''^(2/3)) - 3*x*y'')/(x^2 + 1)"),
];

/// The four-dimensional algebra with `[Y, U] = -X`, `[Z, U] = -2Y`.
pub fn a4_1() -> LieAlgebra {
    let labels = ["X", "Y", "Z", "U"].iter().map(|s| s.to_string()).collect();
    let m = |n: i64| Q::from_integer(n.into());
    LieAlgebra::new(labels, &[(1, 3, 0, m(-1)), (2, 3, 1, m(-2))]).expect("valid structure constants")
}
