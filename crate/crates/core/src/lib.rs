//! Symbolic engine for Lie point symmetries of ordinary differential
//! equations: exact expressions, vector fields and prolongation, Lie algebras
//! from structure constants, hidden-symmetry prediction and order reduction.

pub mod calculus;
pub mod error;
pub mod expr;
pub mod liealg;
pub mod linalg;
pub mod gcd;
pub mod hidden;
pub mod parse;
pub mod poly;
pub mod problem;
pub mod props;
pub mod reduce;
pub mod symexpr;
pub mod vfield;

pub use error::{Error, Result};
pub use expr::{Expr, Func, Symbol, Q};
pub use parse::parse;
pub use poly::Canon;
