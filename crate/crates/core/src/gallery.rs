//! Reference surfaces with closed-form invariants.

use std::f64::consts::PI;

use crate::geom::{make_surface, Domain, SurfacePatch, UvBox};
use crate::holo::{HoloCurve, NullBox};
use crate::sexpr::parse;

#[derive(Debug, Clone, Copy)]
pub struct Entry {
    pub name: &'static str,
    pub psi: &'static [&'static str],
    pub domain: Domain,
}

fn uv(u: (f64, f64), v: (f64, f64)) -> Domain {
    Domain::from_uv(UvBox { u, v }).expect("gallery box")
}

/// `(t, sin t, −cos t)`: `Φ′² = 1`, `K = 1/sin⁴v`.
pub const S1_PSI: &[&str] = &["t", "sin(t)", "-cos(t)"];
/// `(sinh t, cosh t, sin t, −cos t)`: `Φ′² = 2`.
pub const S2_PSI: &[&str] = &["sinh(t)", "cosh(t)", "sin(t)", "-cos(t)"];
/// A plane with `E = −9`.
pub const S3_PSI: &[&str] = &["5*t", "4*t", "3*j*t"];
/// Mixed null curves with `Φ′² = q`.
pub const S4_PSI: &[&str] = &["t", "(1 - j)/2*sin(t) + (1 + j)/2*t", "-(1 - j)/2*cos(t)"];
/// Mixed null curves with `Φ′² = e^{2a} q + q̄`.
pub const S5_PSI: &[&str] = &[
    "(1 - j)/2*exp(t) + (1 + j)/2*t",
    "(1 - j)/2*exp(t)*(cos(t) + sin(t))/2 + (1 + j)/2*sin(t)",
    "(1 - j)/2*exp(t)*(sin(t) - cos(t))/2 + (1 + j)/2*cos(t)",
];

pub fn entries() -> [Entry; 5] {
    [
        Entry { name: "S1", psi: S1_PSI, domain: uv((-2.0, 2.0), (0.2, PI - 0.2)) },
        Entry { name: "S2", psi: S2_PSI, domain: uv((-1.0, 1.0), (0.2, 1.5)) },
        Entry { name: "S3", psi: S3_PSI, domain: uv((-1.0, 1.0), (-1.0, 1.0)) },
        Entry {
            name: "S4",
            psi: S4_PSI,
            domain: Domain::from_null(NullBox::new((0.5, 2.5), (-1.0, 1.0))).expect("gallery box"),
        },
        Entry { name: "S5", psi: S5_PSI, domain: uv((0.3, 2.8), (-1.0, 1.0)) },
    ]
}

pub fn build(entry: &Entry) -> SurfacePatch {
    let exprs: Vec<_> = entry.psi.iter().map(|s| parse(s).expect("gallery expression")).collect();
    let psi = HoloCurve::from_exprs(&exprs, entry.domain.null).expect("gallery curve");
    make_surface(psi, entry.domain).expect("gallery surface validates")
}

fn nth(i: usize) -> SurfacePatch {
    build(&entries()[i])
}

pub fn s1() -> SurfacePatch {
    nth(0)
}

pub fn s2() -> SurfacePatch {
    nth(1)
}

pub fn s3() -> SurfacePatch {
    nth(2)
}

pub fn s4() -> SurfacePatch {
    nth(3)
}

pub fn s5() -> SurfacePatch {
    nth(4)
}

/// Everything in the gallery, in order.
pub fn all() -> Vec<(&'static str, SurfacePatch)> {
    entries().iter().map(|e| (e.name, build(e))).collect()
}
