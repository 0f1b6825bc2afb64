//! Holomorphic maps 𝔻 → 𝔻 stored as a pair of real functions on the null axes.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dnum::{DNum, NullComponent};
use crate::mink::{DVec, MinkError};
use crate::quad::{CumulativeIntegral, Integrand, QuadError, DEFAULT_TOL};
use crate::sexpr::{self, Expr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HoloError {
    #[error("{axis} null coordinate {value} outside [{lo}, {hi}]")]
    OutOfDomain {
        axis: NullComponent,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("base point {0} outside the domain")]
    BaseOutOfDomain(DNum),
    #[error("primitive of a map on an unbounded axis needs a finite domain")]
    UnboundedDomain,
    #[error("grid needs at least 3 points per axis, got {0}x{1}")]
    GridTooSmall(usize, usize),
    #[error("sample count {got} does not match grid size {want}")]
    SampleCount { got: usize, want: usize },
    #[error("curve components disagree on their domain")]
    MixedDomains,
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Mink(#[from] MinkError),
}

/// A rectangle `[a₀,a₁]×[b₀,b₁]` in null coordinates `a = u−v`, `b = u+v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullBox {
    pub a: (f64, f64),
    pub b: (f64, f64),
}

impl NullBox {
    pub const ENTIRE: NullBox = NullBox {
        a: (f64::NEG_INFINITY, f64::INFINITY),
        b: (f64::NEG_INFINITY, f64::INFINITY),
    };

    pub fn new(a: (f64, f64), b: (f64, f64)) -> Self {
        NullBox { a, b }
    }

    pub fn is_bounded(&self) -> bool {
        [self.a.0, self.a.1, self.b.0, self.b.1].iter().all(|x| x.is_finite())
    }

    pub fn check(&self, t: DNum) -> Result<(), HoloError> {
        let (a, b) = t.null();
        let inside = |x: f64, r: (f64, f64)| x >= r.0 && x <= r.1;
        if !inside(a, self.a) {
            return Err(HoloError::OutOfDomain {
                axis: NullComponent::Minus,
                value: a,
                lo: self.a.0,
                hi: self.a.1,
            });
        }
        if !inside(b, self.b) {
            return Err(HoloError::OutOfDomain {
                axis: NullComponent::Plus,
                value: b,
                lo: self.b.0,
                hi: self.b.1,
            });
        }
        Ok(())
    }

    pub fn contains(&self, t: DNum) -> bool {
        self.check(t).is_ok()
    }

    /// Distance from `t` to the nearest edge, measured along the null axes.
    pub fn margin(&self, t: DNum) -> f64 {
        let (a, b) = t.null();
        (a - self.a.0)
            .min(self.a.1 - a)
            .min(b - self.b.0)
            .min(self.b.1 - b)
    }

    /// The box seen through `t ↦ t̄`, which swaps the null axes.
    pub fn conj(&self) -> NullBox {
        NullBox { a: self.b, b: self.a }
    }

    pub fn intersect(&self, other: &NullBox) -> NullBox {
        NullBox {
            a: (self.a.0.max(other.a.0), self.a.1.min(other.a.1)),
            b: (self.b.0.max(other.b.0), self.b.1.min(other.b.1)),
        }
    }
}

/// A real function of one variable with exact first and second derivatives.
#[derive(Clone)]
pub enum RealFn1 {
    /// An expression with `j` replaced by the real constant `j` (±1).
    Symbolic { expr: Arc<Expr>, j: f64 },
    /// `Σ c_k x^k`.
    Poly(Arc<Vec<f64>>),
    /// `∫_base^x integrand`, tabulated by adaptive quadrature.
    Primitive {
        integrand: Arc<RealFn1>,
        table: Arc<CumulativeIntegral>,
    },
}

impl fmt::Debug for RealFn1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealFn1::Symbolic { expr, j } => write!(f, "Symbolic({expr}, j={j})"),
            RealFn1::Poly(c) => write!(f, "Poly({c:?})"),
            RealFn1::Primitive { integrand, table } => {
                write!(f, "Primitive({integrand:?}, {table:?})")
            }
        }
    }
}

impl RealFn1 {
    pub fn symbolic(expr: Arc<Expr>, j: f64) -> Self {
        RealFn1::Symbolic { expr, j }
    }

    pub fn poly(coeffs: Vec<f64>) -> Self {
        RealFn1::Poly(Arc::new(coeffs))
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            RealFn1::Symbolic { expr, j } => expr.eval_real(x, *j),
            RealFn1::Poly(c) => c.iter().rev().fold(0.0, |acc, &k| acc * x + k),
            // out-of-table points are reported as NaN and caught by callers
            RealFn1::Primitive { table, .. } => table.value(x).unwrap_or(f64::NAN),
        }
    }

    pub fn derivative(&self) -> RealFn1 {
        match self {
            RealFn1::Symbolic { expr, j } => RealFn1::Symbolic {
                expr: Arc::new(sexpr::diff_t(expr)),
                j: *j,
            },
            RealFn1::Poly(c) => RealFn1::Poly(Arc::new(
                c.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect(),
            )),
            RealFn1::Primitive { integrand, .. } => (**integrand).clone(),
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        match self {
            RealFn1::Primitive { integrand, .. } => integrand.value(x),
            other => other.derivative().value(x),
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.derivative().derivative().value(x)
    }

    fn as_integrand(&self) -> Integrand {
        let f = self.clone();
        Arc::new(move |x| f.value(x))
    }
}

/// `t = aq + bq̄ ↦ fminus(a)·q + fplus(b)·q̄`.
#[derive(Debug, Clone)]
pub struct HoloMap {
    fminus: RealFn1,
    fplus: RealFn1,
    domain: NullBox,
    source: Option<Arc<Expr>>,
}

impl HoloMap {
    pub fn from_parts(
        fminus: RealFn1,
        fplus: RealFn1,
        domain: NullBox,
        source: Option<Arc<Expr>>,
    ) -> Self {
        HoloMap { fminus, fplus, domain, source }
    }

    pub fn new(fminus: RealFn1, fplus: RealFn1, domain: NullBox) -> Self {
        Self::from_parts(fminus, fplus, domain, None)
    }

    pub fn fminus(&self) -> &RealFn1 {
        &self.fminus
    }

    pub fn fplus(&self) -> &RealFn1 {
        &self.fplus
    }

    pub fn domain(&self) -> NullBox {
        self.domain
    }

    /// The expression this map was lowered from, if any.
    pub fn source(&self) -> Option<&Expr> {
        self.source.as_deref()
    }

    pub fn with_domain(mut self, domain: NullBox) -> Self {
        self.domain = domain;
        self
    }

    pub fn eval(&self, t: DNum) -> Result<DNum, HoloError> {
        self.domain.check(t)?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: DNum) -> DNum {
        let (a, b) = t.null();
        DNum::from_null(self.fminus.value(a), self.fplus.value(b))
    }

    pub fn differentiate(&self) -> HoloMap {
        HoloMap {
            fminus: self.fminus.derivative(),
            fplus: self.fplus.derivative(),
            domain: self.domain,
            source: self.source.as_ref().map(|e| Arc::new(sexpr::diff_t(e))),
        }
    }

    /// `F` with `F′ = f` and `F(base) = 0`.
    pub fn primitive(&self, base: DNum) -> Result<HoloMap, HoloError> {
        if self.domain.check(base).is_err() {
            return Err(HoloError::BaseOutOfDomain(base));
        }
        if let Some(e) = &self.source {
            if let Some(anti) = sexpr::integrate_t(e) {
                let shift = anti.eval_dnum(base);
                let anti = Expr::sub(anti, Expr::dnum_const(shift));
                return Ok(sexpr::lower(&anti).with_domain(self.domain));
            }
        }
        if !self.domain.is_bounded() {
            return Err(HoloError::UnboundedDomain);
        }
        let (a0, b0) = base.null();
        let axis = |f: &RealFn1, range: (f64, f64), x0: f64| -> Result<RealFn1, HoloError> {
            let table =
                CumulativeIntegral::build(f.as_integrand(), range.0, range.1, x0, DEFAULT_TOL)?;
            Ok(RealFn1::Primitive {
                integrand: Arc::new(f.clone()),
                table: Arc::new(table),
            })
        };
        Ok(HoloMap {
            fminus: axis(&self.fminus, self.domain.a, a0)?,
            fplus: axis(&self.fplus, self.domain.b, b0)?,
            domain: self.domain,
            source: None,
        })
    }

    /// `t ↦ conj(f(t̄))`, which swaps the null components.
    pub fn conj(&self) -> HoloMap {
        HoloMap {
            fminus: self.fplus.clone(),
            fplus: self.fminus.clone(),
            domain: self.domain.conj(),
            source: None,
        }
    }
}

/// `n` holomorphic maps on one domain, the components of a map into 𝔻ⁿ₁.
#[derive(Debug, Clone)]
pub struct HoloCurve {
    components: Vec<HoloMap>,
}

impl HoloCurve {
    pub fn new(components: Vec<HoloMap>) -> Result<Self, HoloError> {
        DVec::zeros(components.len())?;
        let d = components[0].domain;
        if components.iter().any(|c| c.domain != d) {
            return Err(HoloError::MixedDomains);
        }
        Ok(HoloCurve { components })
    }

    pub fn from_exprs(exprs: &[Expr], domain: NullBox) -> Result<Self, HoloError> {
        Self::new(exprs.iter().map(|e| sexpr::lower(e).with_domain(domain)).collect())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[HoloMap] {
        &self.components
    }

    pub fn domain(&self) -> NullBox {
        self.components[0].domain
    }

    /// The source expressions, when every component has one.
    pub fn sources(&self) -> Option<Vec<Expr>> {
        self.components.iter().map(|c| c.source().cloned()).collect()
    }

    pub fn eval(&self, t: DNum) -> Result<DVec, HoloError> {
        self.domain().check(t)?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: DNum) -> DVec {
        DVec::new(self.components.iter().map(|c| c.eval_unchecked(t)).collect())
            .expect("dimension checked at construction")
    }

    pub fn differentiate(&self) -> HoloCurve {
        HoloCurve {
            components: self.components.iter().map(HoloMap::differentiate).collect(),
        }
    }

    pub fn conj(&self) -> HoloCurve {
        HoloCurve {
            components: self.components.iter().map(HoloMap::conj).collect(),
        }
    }
}

/// A uniform `(u, v)` grid, row-major with `u` varying fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UvGrid {
    pub u0: f64,
    pub v0: f64,
    pub du: f64,
    pub dv: f64,
    pub nu: usize,
    pub nv: usize,
}

impl UvGrid {
    /// Inclusive node grid over `[u0,u1]×[v0,v1]`.
    pub fn spanning(u: (f64, f64), v: (f64, f64), nu: usize, nv: usize) -> Self {
        UvGrid {
            u0: u.0,
            v0: v.0,
            du: (u.1 - u.0) / (nu.max(2) - 1) as f64,
            dv: (v.1 - v.0) / (nv.max(2) - 1) as f64,
            nu,
            nv,
        }
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize, k: usize) -> DNum {
        DNum::new(self.u0 + i as f64 * self.du, self.v0 + k as f64 * self.dv)
    }

    pub fn points(&self) -> Vec<DNum> {
        (0..self.nv)
            .flat_map(|k| (0..self.nu).map(move |i| (i, k)))
            .map(|(i, k)| self.point(i, k))
            .collect()
    }

    fn check(&self, samples: usize) -> Result<(), HoloError> {
        if self.nu < 3 || self.nv < 3 {
            return Err(HoloError::GridTooSmall(self.nu, self.nv));
        }
        if samples != self.len() {
            return Err(HoloError::SampleCount { got: samples, want: self.len() });
        }
        Ok(())
    }
}

/// Largest `|h_u − g_v| + |h_v − g_u|` over interior nodes of a sampled
/// `f = g + jh`, by central differences.
pub fn cr_residual(g: &[f64], h: &[f64], grid: &UvGrid) -> Result<f64, HoloError> {
    grid.check(g.len())?;
    grid.check(h.len())?;
    let at = |s: &[f64], i: usize, k: usize| s[k * grid.nu + i];
    let mut worst: f64 = 0.0;
    for k in 1..grid.nv - 1 {
        for i in 1..grid.nu - 1 {
            let du = |s: &[f64]| (at(s, i + 1, k) - at(s, i - 1, k)) / (2.0 * grid.du);
            let dv = |s: &[f64]| (at(s, i, k + 1) - at(s, i, k - 1)) / (2.0 * grid.dv);
            let r = (du(h) - dv(g)).abs() + (dv(h) - du(g)).abs();
            worst = worst.max(r);
        }
    }
    Ok(worst)
}
