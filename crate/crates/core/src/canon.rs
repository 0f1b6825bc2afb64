//! Canonical coordinates: `ds = (Φ′²)^{1/4} dt`, integrated one null axis at a time.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::dnum::{DNum, NullComponent, EPS_CLS};
use crate::exec::Exec;
use crate::geom::{GeomError, PointClass, SurfacePatch};
use crate::holo::{NullBox, RealFn1};
use crate::quad::{CumulativeIntegral, Integrand, QuadError, DEFAULT_TOL};

pub const RELATION_TOL: f64 = 1e-7;
pub const DEFAULT_PROBES: usize = 8;
const SCAN_SAMPLES: usize = 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CanonError {
    #[error("degenerate at all sampled points ({total} of {total}), first at t = {t}")]
    DegenerateEverywhere { t: DNum, total: usize },
    #[error("degenerate point at t = {t} ({count} of {total} sampled points degenerate)")]
    Degenerate { t: DNum, count: usize, total: usize },
    #[error("base point {0} is not interior to the domain")]
    BaseOutsideDomain(DNum),
    #[error("quadrature on the {axis} axis failed: {source}")]
    Quadrature { axis: NullComponent, source: QuadError },
    #[error("{axis} coordinate {value} outside the chart range")]
    OutOfRange { axis: NullComponent, value: f64 },
    #[error("need at least 3 probe points, got {0}")]
    TooFewProbes(usize),
    #[error("charts are not related by t = ±s + c or t = ±s̄ + c (best residual {residual:e})")]
    ModelMismatch { residual: f64 },
    #[error(transparent)]
    Geom(#[from] Box<GeomError>),
}

impl From<GeomError> for CanonError {
    fn from(e: GeomError) -> Self {
        CanonError::Geom(Box::new(e))
    }
}

#[derive(Debug, Clone)]
enum AxisBase {
    Identity,
    Integral(Arc<CumulativeIntegral>),
}

/// `x ↦ post_mul·B(pre_mul·x + pre_add) + post_add`, strictly increasing.
#[derive(Debug, Clone)]
pub struct AxisMap {
    base: AxisBase,
    pre_mul: f64,
    pre_add: f64,
    post_mul: f64,
    post_add: f64,
}

impl AxisMap {
    pub fn identity() -> Self {
        AxisMap { base: AxisBase::Identity, pre_mul: 1.0, pre_add: 0.0, post_mul: 1.0, post_add: 0.0 }
    }

    pub fn linear(k: f64, c: f64) -> Self {
        AxisMap { post_mul: k, post_add: c, ..Self::identity() }
    }

    fn integral(table: CumulativeIntegral) -> Self {
        AxisMap { base: AxisBase::Integral(Arc::new(table)), ..Self::identity() }
    }

    fn inner(&self, x: f64) -> f64 {
        self.pre_mul * x + self.pre_add
    }

    pub fn value(&self, x: f64) -> Result<f64, QuadError> {
        let y = match &self.base {
            AxisBase::Identity => self.inner(x),
            AxisBase::Integral(t) => t.value(self.inner(x))?,
        };
        Ok(self.post_mul * y + self.post_add)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let d = match &self.base {
            AxisBase::Identity => 1.0,
            AxisBase::Integral(t) => t.derivative(self.inner(x)),
        };
        self.post_mul * self.pre_mul * d
    }

    pub fn inverse(&self, y: f64) -> Result<f64, QuadError> {
        let w = (y - self.post_add) / self.post_mul;
        let z = match &self.base {
            AxisBase::Identity => w,
            AxisBase::Integral(t) => t.inverse(w)?,
        };
        Ok((z - self.pre_add) / self.pre_mul)
    }

    /// Post-composes with `y ↦ k·y`.
    pub fn post_scale(&self, k: f64) -> Self {
        AxisMap { post_mul: self.post_mul * k, post_add: self.post_add * k, ..self.clone() }
    }

    /// `x ↦ −f(−x)`.
    pub fn odd_reflection(&self) -> Self {
        AxisMap {
            pre_mul: -self.pre_mul,
            post_mul: -self.post_mul,
            post_add: -self.post_add,
            ..self.clone()
        }
    }

    pub fn node_count(&self) -> usize {
        match &self.base {
            AxisBase::Identity => 0,
            AxisBase::Integral(t) => t.node_count(),
        }
    }

    /// `(min, max)` of the derivative at the quadrature nodes.
    pub fn derivative_bounds(&self) -> (f64, f64) {
        let k = self.post_mul * self.pre_mul;
        match &self.base {
            AxisBase::Identity => (k, k),
            AxisBase::Integral(t) => {
                let (lo, hi) = t.slope_bounds();
                (k * lo, k * hi)
            }
        }
    }
}

/// A reparametrization `t ↦ s` built from two increasing null-axis maps.
#[derive(Debug, Clone)]
pub struct CanonicalChart {
    minus: AxisMap,
    plus: AxisMap,
    base: DNum,
    conjugated: bool,
    isotropic: bool,
    range: NullBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartRelation {
    pub sign: i8,
    pub conjugated: bool,
    pub c: DNum,
    pub residual: f64,
}

impl CanonicalChart {
    pub fn from_axes(minus: AxisMap, plus: AxisMap, base: DNum, range: NullBox) -> Self {
        CanonicalChart { minus, plus, base, conjugated: false, isotropic: false, range }
    }

    pub fn identity(range: NullBox) -> Self {
        Self::from_axes(AxisMap::identity(), AxisMap::identity(), DNum::ZERO, range)
    }

    /// `s = k·t + c` for real `k > 0`.
    pub fn linear(k: f64, c: DNum, range: NullBox) -> Self {
        let (p, m) = c.null();
        let mut chart = Self::from_axes(AxisMap::linear(k, p), AxisMap::linear(k, m), DNum::ZERO, range);
        chart.base = chart.inverse(DNum::ZERO).unwrap_or(DNum::ZERO);
        chart
    }

    pub fn base(&self) -> DNum {
        self.base
    }

    pub fn is_conjugated(&self) -> bool {
        self.conjugated
    }

    pub fn is_isotropic(&self) -> bool {
        self.isotropic
    }

    /// Box in `t` null coordinates on which the chart is defined.
    pub fn range(&self) -> NullBox {
        self.range
    }

    pub fn minus(&self) -> &AxisMap {
        &self.minus
    }

    pub fn plus(&self) -> &AxisMap {
        &self.plus
    }

    fn check(&self, t: DNum) -> Result<(f64, f64), CanonError> {
        let (a, b) = t.null();
        let slack = |r: (f64, f64)| 1e-12 * (r.1 - r.0).abs().max(1.0);
        if !(a >= self.range.a.0 - slack(self.range.a) && a <= self.range.a.1 + slack(self.range.a)) {
            return Err(CanonError::OutOfRange { axis: NullComponent::Minus, value: a });
        }
        if !(b >= self.range.b.0 - slack(self.range.b) && b <= self.range.b.1 + slack(self.range.b)) {
            return Err(CanonError::OutOfRange { axis: NullComponent::Plus, value: b });
        }
        Ok((a, b))
    }

    fn quad_err(axis: NullComponent) -> impl Fn(QuadError) -> CanonError {
        move |source| match source {
            QuadError::OutOfRange { x, .. } => CanonError::OutOfRange { axis, value: x },
            source => CanonError::Quadrature { axis, source },
        }
    }

    pub fn forward(&self, t: DNum) -> Result<DNum, CanonError> {
        let (a, b) = self.check(t)?;
        let p = self.minus.value(a).map_err(Self::quad_err(NullComponent::Minus))?;
        let m = self.plus.value(b).map_err(Self::quad_err(NullComponent::Plus))?;
        let s = DNum::from_null(p, m);
        Ok(if self.conjugated { s.conj() } else { s })
    }

    pub fn inverse(&self, s: DNum) -> Result<DNum, CanonError> {
        let s = if self.conjugated { s.conj() } else { s };
        let (p, m) = s.null();
        let a = self.minus.inverse(p).map_err(Self::quad_err(NullComponent::Minus))?;
        let b = self.plus.inverse(m).map_err(Self::quad_err(NullComponent::Plus))?;
        Ok(DNum::from_null(a, b))
    }

    /// Holomorphic part `s′(t)`; for a conjugated chart `s` is its conjugate.
    pub fn derivative(&self, t: DNum) -> Result<DNum, CanonError> {
        let (a, b) = self.check(t)?;
        Ok(DNum::from_null(self.minus.derivative(a), self.plus.derivative(b)))
    }

    /// `dt/ds` of the holomorphic part, evaluated at `t`.
    pub fn inverse_derivative(&self, t: DNum) -> Result<DNum, CanonError> {
        let d = self.derivative(t)?;
        let (p, m) = d.null();
        if !(p > 0.0 && m > 0.0) {
            return Err(CanonError::Degenerate { t, count: 1, total: 1 });
        }
        Ok(DNum::from_null(1.0 / p, 1.0 / m))
    }

    /// Post-composes with `s ↦ k⁻·p q + k⁺·m q̄` (`k± > 0`).
    pub fn post_scaled(&self, k_minus: f64, k_plus: f64) -> Self {
        CanonicalChart {
            minus: self.minus.post_scale(k_minus),
            plus: self.plus.post_scale(k_plus),
            ..self.clone()
        }
    }

    /// The chart `r ↦ j·c(j·r)` on `{r : jr ∈ range}`.
    pub fn through_j(&self) -> Self {
        CanonicalChart {
            minus: self.minus.odd_reflection(),
            plus: self.plus.clone(),
            base: crate::dnum::J * self.base,
            range: NullBox::new((-self.range.a.1, -self.range.a.0), self.range.b),
            ..self.clone()
        }
    }

    /// The same chart followed by `s ↦ s̄`.
    pub fn conjugated(&self) -> Self {
        CanonicalChart { conjugated: !self.conjugated, ..self.clone() }
    }

    pub fn node_counts(&self) -> (usize, usize) {
        (self.minus.node_count(), self.plus.node_count())
    }
}

fn axis_square(parts: &[RealFn1], x: f64) -> f64 {
    let mut acc = -parts[0].value(x).powi(2);
    for f in &parts[1..] {
        acc += f.value(x).powi(2);
    }
    acc
}

// Largest interval around x0 on which g stays above threshold, scanned on a
// uniform grid.
fn surviving(g: &dyn Fn(f64) -> f64, range: (f64, f64), x0: f64) -> Option<(f64, f64)> {
    let xs: Vec<f64> = (0..=SCAN_SAMPLES)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / SCAN_SAMPLES as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let thr = EPS_CLS * (1.0 + scale);
    let ok = |v: f64| v.is_finite() && v > thr;
    if !ok(g(x0)) {
        return None;
    }
    let i0 = xs.partition_point(|&x| x < x0);
    let mut lo = range.0;
    for i in (0..i0).rev() {
        if !ok(vals[i]) {
            lo = xs[i + 1].min(x0);
            break;
        }
    }
    let mut hi = range.1;
    for (i, &v) in vals.iter().enumerate().skip(i0) {
        if !ok(v) {
            hi = xs[i - 1].max(x0);
            break;
        }
    }
    Some((lo, hi))
}

/// Builds canonical coordinates centred at `base`.
pub fn canonize(s: &SurfacePatch, base: DNum) -> Result<CanonicalChart, CanonError> {
    canonize_with(s, base, Exec::default())
}

pub fn canonize_with(s: &SurfacePatch, base: DNum, exec: Exec) -> Result<CanonicalChart, CanonError> {
    let v = s.validation();
    if v.degenerate > 0 {
        let (w, h) = v.grid;
        let points = s.domain().cell_centers(w, h);
        let first = points
            .iter()
            .find(|&&t| matches!(s.classify_point(t), Ok(PointClass::Degenerate)))
            .copied()
            .unwrap_or(points[0]);
        let total = v.points();
        return Err(if v.degenerate == total {
            CanonError::DegenerateEverywhere { t: first, total }
        } else {
            CanonError::Degenerate { t: first, count: v.degenerate, total }
        });
    }
    let dom = s.domain().null;
    if !(dom.margin(base) > 0.0) {
        return Err(CanonError::BaseOutsideDomain(base));
    }
    let parts = |pick: fn(&crate::holo::HoloMap) -> &RealFn1| -> Arc<Vec<RealFn1>> {
        Arc::new(s.dphi().components().iter().map(|c| pick(c).clone()).collect())
    };
    let (a0, b0) = base.null();
    let axis = |fs: Arc<Vec<RealFn1>>, range: (f64, f64), x0: f64, axis: NullComponent| {
        let g = {
            let fs = fs.clone();
            move |x: f64| axis_square(&fs, x)
        };
        let Some(r) = surviving(&g, range, x0) else {
            let t = match axis {
                NullComponent::Minus => DNum::from_null(x0, b0),
                NullComponent::Plus => DNum::from_null(a0, x0),
            };
            return Err(CanonError::Degenerate { t, count: 1, total: 1 });
        };
        let f: Integrand = Arc::new(move |x| g(x).sqrt().sqrt());
        let table = CumulativeIntegral::build(f, r.0, r.1, x0, DEFAULT_TOL)
            .map_err(|source| CanonError::Quadrature { axis, source })?;
        Ok((AxisMap::integral(table), r))
    };
    let fm = parts(|c| c.fminus());
    let fp = parts(|c| c.fplus());
    let (minus, plus) = exec.join(
        || axis(fm, dom.a, a0, NullComponent::Minus),
        || axis(fp, dom.b, b0, NullComponent::Plus),
    );
    let (minus, ra) = minus?;
    let (plus, rb) = plus?;
    Ok(CanonicalChart::from_axes(minus, plus, base, NullBox::new(ra, rb)))
}

/// Largest `|Φ̃′² − 1|` over `points`, with `Φ̃′² = Φ′²·t′(s)⁴`.
pub fn verify_canonical(s: &SurfacePatch, chart: &CanonicalChart, points: &[DNum]) -> Result<f64, CanonError> {
    let mut worst: f64 = 0.0;
    for &t in points {
        let dphi_sq = s.dphi().eval(t).map_err(GeomError::from)?.square();
        let tp = chart.inverse_derivative(t)?;
        worst = worst.max((dphi_sq * tp.powi(4) - DNum::ONE).null_abs_max());
    }
    Ok(worst)
}

/// `w×h` cell centres of the surface domain that fall in the chart range.
pub fn chart_grid(s: &SurfacePatch, chart: &CanonicalChart, w: usize, h: usize) -> Vec<DNum> {
    s.domain()
        .cell_centers(w, h)
        .into_iter()
        .filter(|&t| chart.range().contains(t))
        .collect()
}

/// Eight probes spread over both null axes, inside both charts' ranges.
pub fn default_probes(s: &SurfacePatch, c1: &CanonicalChart, c2: &CanonicalChart) -> Vec<DNum> {
    let both = c1.range().intersect(&c2.range());
    let mut probes: Vec<DNum> = s
        .domain()
        .cell_centers(4, 2)
        .into_iter()
        .filter(|&t| both.contains(t))
        .collect();
    if probes.len() < 3 {
        let centre = DNum::from_null(0.5 * (both.a.0 + both.a.1), 0.5 * (both.b.0 + both.b.1));
        let (da, db) = (0.25 * (both.a.1 - both.a.0), 0.25 * (both.b.1 - both.b.0));
        probes = [(-1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.5, 0.5), (-0.5, -0.5), (1.0, -1.0), (-1.0, 1.0)]
            .iter()
            .map(|&(x, y)| centre + DNum::from_null(x * da, y * db))
            .take(DEFAULT_PROBES)
            .collect();
    }
    probes
}

/// Fits `s₁ = ±s₂ + c` or `s₁ = ±s̄₂ + c` over the probe points.
pub fn relate_charts(c1: &CanonicalChart, c2: &CanonicalChart, probes: &[DNum]) -> Result<ChartRelation, CanonError> {
    if probes.len() < 3 {
        return Err(CanonError::TooFewProbes(probes.len()));
    }
    let mut pairs = Vec::with_capacity(probes.len());
    for &t in probes {
        let s2 = c2.forward(t)?;
        let s1 = c1.forward(c2.inverse(s2)?)?;
        pairs.push((s1, s2));
    }
    let mut best: Option<ChartRelation> = None;
    for conjugated in [false, true] {
        for sign in [1i8, -1] {
            let model = |s2: DNum| {
                let s = if conjugated { s2.conj() } else { s2 };
                s.scale(sign as f64)
            };
            let cs: Vec<DNum> = pairs.iter().map(|&(s1, s2)| s1 - model(s2)).collect();
            let c = cs.iter().copied().sum::<DNum>().scale(1.0 / cs.len() as f64);
            let residual = cs.iter().map(|&ck| (ck - c).null_abs_max()).fold(0.0, f64::max);
            if best.is_none_or(|b| residual < b.residual) {
                best = Some(ChartRelation { sign, conjugated, c, residual });
            }
        }
    }
    let best = best.expect("four models tried");
    if !(best.residual <= RELATION_TOL) {
        return Err(CanonError::ModelMismatch { residual: best.residual });
    }
    Ok(best)
}

/// Post-composes with `ū = (u−v)/√2`, `v̄ = (u+v)/√2`, which scales both
/// null coordinates by `1/√2`.
pub fn isotropic_chart(chart: &CanonicalChart) -> CanonicalChart {
    let mut out = chart.post_scaled(1.0 / SQRT_2, 1.0 / SQRT_2);
    out.isotropic = true;
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisPair<T> {
    pub minus: T,
    pub plus: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonReport {
    pub base: DNum,
    pub nodes: AxisPair<usize>,
    pub residual: f64,
    pub derivative_bounds: AxisPair<(f64, f64)>,
    pub range: NullBox,
    pub relation: Option<ChartRelation>,
}

pub fn report(
    s: &SurfacePatch,
    chart: &CanonicalChart,
    grid: usize,
    reference: Option<&CanonicalChart>,
) -> Result<CanonReport, CanonError> {
    let points = chart_grid(s, chart, grid, grid);
    let residual = verify_canonical(s, chart, &points)?;
    let relation = match reference {
        Some(r) => Some(relate_charts(r, chart, &default_probes(s, r, chart))?),
        None => None,
    };
    let (nm, np) = chart.node_counts();
    Ok(CanonReport {
        base: chart.base(),
        nodes: AxisPair { minus: nm, plus: np },
        residual,
        derivative_bounds: AxisPair {
            minus: chart.minus().derivative_bounds(),
            plus: chart.plus().derivative_bounds(),
        },
        range: chart.range(),
        relation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn s1_canonizes_to_identity() {
        let s = gallery::s1();
        let c = canonize(&s, DNum::ZERO).unwrap();
        let pts = chart_grid(&s, &c, 16, 16);
        assert_eq!(pts.len(), 256);
        for &t in &pts {
            assert!((c.forward(t).unwrap() - t).null_abs_max() < 1e-10);
        }
        assert!(verify_canonical(&s, &c, &pts).unwrap() <= 1e-12);
        let id = CanonicalChart::identity(s.domain().null);
        assert!(verify_canonical(&s, &id, &pts).unwrap() <= 1e-12);
    }

    #[test]
    fn wrong_chart_is_caught() {
        let s = gallery::s1();
        let c = CanonicalChart::linear(2.0, DNum::ZERO, s.domain().null);
        let pts = chart_grid(&s, &c, 4, 4);
        assert!((verify_canonical(&s, &c, &pts).unwrap() - 0.9375).abs() < 1e-12);
    }

    #[test]
    fn s2_chart_and_inverse() {
        let s = gallery::s2();
        let c = canonize(&s, DNum::ZERO).unwrap();
        let k = 2f64.powf(0.25);
        for &t in &chart_grid(&s, &c, 8, 8) {
            let sv = c.forward(t).unwrap();
            assert!((sv - t.scale(k)).null_abs_max() < 1e-8);
            assert!((c.inverse(sv).unwrap() - t).null_abs_max() < 1e-9);
        }
        let (lo, hi) = c.minus().derivative_bounds();
        assert!((lo - k).abs() < 1e-12 && (hi - k).abs() < 1e-12);
    }

    #[test]
    fn degenerate_surfaces_refuse() {
        let err = canonize(&gallery::s3(), DNum::ZERO).unwrap_err();
        assert!(matches!(err, CanonError::DegenerateEverywhere { .. }));
        assert!(err.to_string().contains("degenerate at all sampled points"));
        assert!(matches!(
            canonize(&gallery::s1(), DNum::new(0.0, 40.0)),
            Err(CanonError::BaseOutsideDomain(_))
        ));
    }

    #[test]
    fn relations() {
        let s = gallery::s2();
        let c1 = canonize(&s, DNum::ZERO).unwrap();
        let same = relate_charts(&c1, &c1, &default_probes(&s, &c1, &c1)).unwrap();
        assert_eq!((same.sign, same.conjugated), (1, false));
        assert!(same.c.null_abs_max() < 1e-12);

        let b2 = DNum::new(0.2, 0.6);
        let c2 = canonize(&s, b2).unwrap();
        let r = relate_charts(&c1, &c2, &default_probes(&s, &c1, &c2)).unwrap();
        assert_eq!((r.sign, r.conjugated), (1, false));
        assert!((r.c - c1.forward(b2).unwrap()).null_abs_max() < 1e-8);

        let cc = c1.conjugated();
        let r = relate_charts(&c1, &cc, &default_probes(&s, &c1, &cc)).unwrap();
        assert!(r.conjugated);
        assert!(relate_charts(&c1, &c1, &[DNum::ZERO]).is_err());

        let stretched = c1.post_scaled(2.0, 2.0);
        assert!(matches!(
            relate_charts(&c1, &stretched, &default_probes(&s, &c1, &stretched)),
            Err(CanonError::ModelMismatch { .. })
        ));
    }

    #[test]
    fn isotropic_parameters() {
        let s = gallery::s1();
        let id = CanonicalChart::identity(s.domain().null);
        let iso = isotropic_chart(&id);
        let t = DNum::new(0.3, 1.1);
        let (p, m) = t.null();
        assert!((iso.forward(t).unwrap() - DNum::from_null(p, m).scale(1.0 / SQRT_2)).null_abs_max() < 1e-15);
        let twice = isotropic_chart(&iso);
        assert!((twice.forward(t).unwrap() - t.scale(0.5)).null_abs_max() < 1e-15);
        // the coordinate line of ū in t is the null direction q, and Φ·q has zero square
        let phi = s.phi().eval(t).unwrap();
        let tu = phi.scale(crate::dnum::Q.scale(SQRT_2));
        let xu = tu.re();
        assert!(crate::mink::real_dot(&xu, &xu).abs() < 1e-9);
    }
}
