//! Time-like surfaces in Minkowski space described through double numbers.

// NaN must fail range checks, which `!(x > lo)` expresses directly.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// `Expr::add` and friends are folding constructors, not operator impls.
#![allow(clippy::should_implement_trait)]

pub mod canon;
pub mod cli;
pub mod dnum;
pub mod exec;
pub mod family;
pub mod gallery;
pub mod geom;
pub mod holo;
pub mod mink;
pub mod quad;
pub mod sexpr;
