//! Minimal time-like surfaces `x = Re Ψ` with Ψ holomorphic into 𝔻ⁿ₁.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{CanonError, CanonicalChart};
use crate::dnum::{classify, DClass, DNum, EPS_CLS};
use crate::exec::Exec;
use crate::holo::{HoloCurve, HoloError, NullBox, UvGrid};
use crate::mink::{real_dot, DVec, MinkError};

pub const H_FD: f64 = 1e-3;
pub const VALIDATION_GRID: usize = 32;
const ISO_TOL: f64 = 1e-9;
const TIMELIKE_TOL: f64 = 1e-12;
const METRIC_TOL: f64 = 1e-12;
const CR_STEP: f64 = 1e-4;
const CR_TOL: f64 = 1e-5;
const CANONICAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("domain is empty")]
    EmptyDomain,
    #[error("not isothermal: |Ψ′²| = {residual:e} at t = {t} (limit {limit:e})")]
    NotIsothermal { t: DNum, residual: f64, limit: f64 },
    #[error("not time-like: ‖Ψ′‖² = {normsq:e} at t = {t}")]
    NotTimelike { t: DNum, normsq: f64 },
    #[error("component {component} fails the Cauchy-Riemann check: residual {residual:e} at t = {t}")]
    NotHolomorphic { component: usize, t: DNum, residual: f64 },
    #[error("metric degenerates at t = {t}: ‖Φ‖² = {normsq:e}")]
    MetricDegenerate { t: DNum, normsq: f64 },
    #[error("finite-difference stencil of step {h} leaves the domain at t = {t} (margin {margin:e})")]
    FdMargin { t: DNum, h: f64, margin: f64 },
    #[error("degenerate point at t = {t} (Φ′² = {dphi_sq})")]
    DegeneratePoint { t: DNum, dphi_sq: DNum },
    #[error("chart is not canonical at s = {s}: |Φ̃′² − 1| = {residual:e}")]
    NonCanonicalChart { s: DNum, residual: f64 },
    #[error("grid must be at least {min}x{min}, got {w}x{h}")]
    GridTooSmall { w: usize, h: usize, min: usize },
    #[error("surface has no symbolic source for this construction")]
    NotSymbolic,
    #[error(transparent)]
    Holo(#[from] HoloError),
    #[error(transparent)]
    Mink(#[from] MinkError),
    #[error(transparent)]
    Canon(#[from] Box<CanonError>),
}

impl From<CanonError> for GeomError {
    fn from(e: CanonError) -> Self {
        GeomError::Canon(Box::new(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UvBox {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

/// Where a surface lives: a null-coordinate box on which Ψ is evaluated,
/// optionally refined by a `(u, v)` box used for sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub null: NullBox,
    pub uv: Option<UvBox>,
}

fn nonempty(r: (f64, f64)) -> bool {
    r.0.is_finite() && r.1.is_finite() && r.0 < r.1
}

impl Domain {
    pub fn from_null(null: NullBox) -> Result<Self, GeomError> {
        if !(nonempty(null.a) && nonempty(null.b)) {
            return Err(GeomError::EmptyDomain);
        }
        Ok(Domain { null, uv: None })
    }

    /// A `(u, v)` box and the smallest null box enclosing it.
    pub fn from_uv(uv: UvBox) -> Result<Self, GeomError> {
        if !(nonempty(uv.u) && nonempty(uv.v)) {
            return Err(GeomError::EmptyDomain);
        }
        let null = NullBox::new(
            (uv.u.0 - uv.v.1, uv.u.1 - uv.v.0),
            (uv.u.0 + uv.v.0, uv.u.1 + uv.v.1),
        );
        Ok(Domain { null, uv: Some(uv) })
    }

    /// `{s : js ∈ D}`; `js` has null coordinates `(−a, b)` and `(u, v)` swapped.
    pub fn through_j(&self) -> Domain {
        Domain {
            null: NullBox::new((-self.null.a.1, -self.null.a.0), self.null.b),
            uv: self.uv.map(|b| UvBox { u: b.v, v: b.u }),
        }
    }

    pub fn contains(&self, t: DNum) -> bool {
        match self.uv {
            Some(b) => t.re >= b.u.0 && t.re <= b.u.1 && t.im >= b.v.0 && t.im <= b.v.1,
            None => self.null.contains(t),
        }
    }

    fn axes(&self) -> ((f64, f64), (f64, f64)) {
        match self.uv {
            Some(b) => (b.u, b.v),
            None => (self.null.a, self.null.b),
        }
    }

    fn point(&self, x: f64, y: f64) -> DNum {
        match self.uv {
            Some(_) => DNum::new(x, y),
            None => DNum::from_null(x, y),
        }
    }

    /// Centres of a `w×h` cell grid, row-major with the first axis fastest.
    /// Axes are `(u, v)` for a `(u, v)` domain and `(a, b)` otherwise.
    pub fn cell_centers(&self, w: usize, h: usize) -> Vec<DNum> {
        let ((x0, x1), (y0, y1)) = self.axes();
        let (dx, dy) = ((x1 - x0) / w as f64, (y1 - y0) / h as f64);
        (0..h)
            .flat_map(|k| (0..w).map(move |i| (i, k)))
            .map(|(i, k)| self.point(x0 + (i as f64 + 0.5) * dx, y0 + (k as f64 + 0.5) * dy))
            .collect()
    }

    /// Inclusive `w×h` node grid, same layout as [`Domain::cell_centers`].
    pub fn nodes(&self, w: usize, h: usize) -> Vec<DNum> {
        let ((x0, x1), (y0, y1)) = self.axes();
        let step = |lo: f64, hi: f64, n: usize, i: usize| {
            if n == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        (0..h)
            .flat_map(|k| (0..w).map(move |i| (i, k)))
            .map(|(i, k)| self.point(step(x0, x1, w, i), step(y0, y1, h, k)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointClass {
    Degenerate,
    Superconformal,
    Generic,
}

impl fmt::Display for PointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointClass::Degenerate => "degenerate",
            PointClass::Superconformal => "superconformal",
            PointClass::Generic => "generic",
        })
    }
}

/// Worst residuals and class counts over the validation grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Validation {
    pub grid: (usize, usize),
    pub isothermal_residual: f64,
    pub max_normsq: f64,
    pub cr_residual: f64,
    pub k_scale: f64,
    pub eps_k: f64,
    pub degenerate: usize,
    pub superconformal: usize,
    pub generic: usize,
}

impl Validation {
    pub fn points(&self) -> usize {
        self.degenerate + self.superconformal + self.generic
    }

    pub fn general_type(&self) -> bool {
        self.degenerate == 0
    }
}

#[derive(Debug, Clone)]
pub struct SurfacePatch {
    psi: HoloCurve,
    phi: HoloCurve,
    dphi: HoloCurve,
    domain: Domain,
    validation: Validation,
}

/// Everything first-order at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointData {
    pub t: DNum,
    pub x: Vec<f64>,
    pub phi: DVec,
    pub dphi: DVec,
    pub dphi_perp: DVec,
    /// `‖Φ‖²`.
    pub normsq: f64,
    pub e: f64,
    /// Bivector form of the Gauss curvature.
    pub k: f64,
    pub dphi_sq: DNum,
    pub class: PointClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMethod {
    Projection,
    Bivector,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub h: f64,
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { h: H_FD, richardson: true }
    }
}

fn metric_checked(t: DNum, phi: &DVec) -> Result<f64, GeomError> {
    let n = phi.normsq();
    if !n.is_finite() || n.abs() <= METRIC_TOL * phi.scale_hint().max(1.0) {
        return Err(GeomError::MetricDegenerate { t, normsq: n });
    }
    Ok(n)
}

fn project(w: &DVec, phi: &DVec, normsq: f64) -> DVec {
    let c1 = w.dot_unchecked(&phi.conj()).scale(1.0 / normsq);
    let c2 = w.dot_unchecked(phi).scale(1.0 / normsq);
    &(w - &phi.scale(c1)) - &phi.conj().scale(c2)
}

fn dnum_class(dphi_sq: DNum) -> bool {
    // 𝔻₀ and, off the identity Φ′⊥² = Φ′², the impossible non-positive case
    classify(dphi_sq, EPS_CLS) != DClass::Positive
}

/// Validates Ψ on `domain` and returns the patch.
pub fn make_surface(psi: HoloCurve, domain: Domain) -> Result<SurfacePatch, GeomError> {
    make_surface_with(psi, domain, VALIDATION_GRID)
}

pub fn make_surface_with(
    psi: HoloCurve,
    domain: Domain,
    grid: usize,
) -> Result<SurfacePatch, GeomError> {
    if !(nonempty(domain.null.a) && nonempty(domain.null.b)) {
        return Err(GeomError::EmptyDomain);
    }
    let psi = HoloCurve::new(
        psi.components().iter().map(|c| c.clone().with_domain(domain.null)).collect(),
    )?;
    let phi = psi.differentiate();
    let dphi = phi.differentiate();
    let mut patch = SurfacePatch {
        psi,
        phi,
        dphi,
        domain,
        validation: Validation {
            grid: (grid, grid),
            isothermal_residual: 0.0,
            max_normsq: f64::NEG_INFINITY,
            cr_residual: 0.0,
            k_scale: 0.0,
            eps_k: 1e-8,
            degenerate: 0,
            superconformal: 0,
            generic: 0,
        },
    };
    let points = domain.cell_centers(grid, grid);
    for &t in &points {
        let phi = patch.phi.eval_unchecked(t);
        let scale = phi.scale_hint().max(1.0);
        let iso = phi.square().null_abs_max();
        if !(iso <= ISO_TOL * scale) {
            return Err(GeomError::NotIsothermal { t, residual: iso, limit: ISO_TOL * scale });
        }
        let n = phi.normsq();
        if !(n < -TIMELIKE_TOL * scale) {
            return Err(GeomError::NotTimelike { t, normsq: n });
        }
        let v = &mut patch.validation;
        v.isothermal_residual = v.isothermal_residual.max(iso);
        v.max_normsq = v.max_normsq.max(n);
        for (component, map) in patch.psi.components().iter().enumerate() {
            let r = cr_point(|s| map.eval_unchecked(s), t);
            let tol = CR_TOL * (1.0 + map.eval_unchecked(t).null_abs_max());
            if r > tol {
                return Err(GeomError::NotHolomorphic { component, t, residual: r });
            }
            v.cr_residual = v.cr_residual.max(r);
        }
    }
    let data: Vec<PointData> = points
        .iter()
        .map(|&t| patch.point_data_unclassified(t))
        .collect::<Result<_, _>>()?;
    let k_scale = data
        .iter()
        .filter(|p| !dnum_class(p.dphi_sq))
        .map(|p| p.k.abs())
        .fold(0.0, f64::max);
    patch.validation.k_scale = k_scale;
    patch.validation.eps_k = 1e-8 * k_scale.max(1.0);
    for p in &data {
        match patch.class_of(p.dphi_sq, p.k) {
            PointClass::Degenerate => patch.validation.degenerate += 1,
            PointClass::Superconformal => patch.validation.superconformal += 1,
            PointClass::Generic => patch.validation.generic += 1,
        }
    }
    Ok(patch)
}

fn cr_point(f: impl Fn(DNum) -> DNum, t: DNum) -> f64 {
    let h = CR_STEP;
    let du = (f(t + DNum::real(h)) - f(t - DNum::real(h))).scale(0.5 / h);
    let dv = (f(t + DNum::new(0.0, h)) - f(t - DNum::new(0.0, h))).scale(0.5 / h);
    let r = (du.im - dv.re).abs() + (dv.im - du.re).abs();
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

impl SurfacePatch {
    pub fn psi(&self) -> &HoloCurve {
        &self.psi
    }

    pub fn phi(&self) -> &HoloCurve {
        &self.phi
    }

    pub fn dphi(&self) -> &HoloCurve {
        &self.dphi
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn validation(&self) -> &Validation {
        &self.validation
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    pub fn eps_k(&self) -> f64 {
        self.validation.eps_k
    }

    fn class_of(&self, dphi_sq: DNum, k: f64) -> PointClass {
        if dnum_class(dphi_sq) {
            PointClass::Degenerate
        } else if k.abs() <= self.validation.eps_k {
            PointClass::Superconformal
        } else {
            PointClass::Generic
        }
    }

    fn point_data_unclassified(&self, t: DNum) -> Result<PointData, GeomError> {
        self.psi.domain().check(t)?;
        let psi = self.psi.eval_unchecked(t);
        let phi = self.phi.eval_unchecked(t);
        let dphi = self.dphi.eval_unchecked(t);
        let normsq = metric_checked(t, &phi)?;
        let dphi_perp = project(&dphi, &phi, normsq);
        let k = -4.0 * phi.wedge_normsq(&dphi)? / normsq.powi(3);
        Ok(PointData {
            t,
            x: psi.re(),
            dphi_sq: dphi.square(),
            phi,
            dphi,
            dphi_perp,
            normsq,
            e: 0.5 * normsq,
            k,
            class: PointClass::Generic,
        })
    }

    pub fn point_data(&self, t: DNum) -> Result<PointData, GeomError> {
        let mut p = self.point_data_unclassified(t)?;
        p.class = self.class_of(p.dphi_sq, p.k);
        Ok(p)
    }

    /// Normal part of `w` at `t`.
    pub fn project_normal(&self, t: DNum, w: &DVec) -> Result<DVec, GeomError> {
        self.psi.domain().check(t)?;
        let phi = self.phi.eval_unchecked(t);
        let n = metric_checked(t, &phi)?;
        if w.dim() != phi.dim() {
            return Err(MinkError::DimensionMismatch(w.dim(), phi.dim()).into());
        }
        Ok(project(w, &phi, n))
    }

    fn log_metric(&self, t: DNum) -> Result<f64, GeomError> {
        let phi = self.phi.eval_unchecked(t);
        let n = metric_checked(t, &phi)?;
        Ok((-n).ln())
    }

    /// `Δʰ ln(−‖Φ‖²)` by central differences, optionally Richardson-extrapolated.
    pub fn hyperbolic_laplacian_log_metric(&self, t: DNum, fd: FdConfig) -> Result<f64, GeomError> {
        let reach = if fd.richardson { 2.0 * fd.h } else { fd.h };
        let margin = self.psi.domain().margin(t);
        if !(margin >= reach) {
            return Err(GeomError::FdMargin { t, h: fd.h, margin });
        }
        let lap = |h: f64| -> Result<f64, GeomError> {
            let f = |s: DNum| self.log_metric(s);
            Ok((f(t + DNum::real(h))? + f(t - DNum::real(h))?
                - f(t + DNum::new(0.0, h))?
                - f(t - DNum::new(0.0, h))?)
                / (h * h))
        };
        let l1 = lap(fd.h)?;
        if fd.richardson {
            Ok((4.0 * l1 - lap(2.0 * fd.h)?) / 3.0)
        } else {
            Ok(l1)
        }
    }

    pub fn gauss_k(&self, t: DNum, method: KMethod, fd: FdConfig) -> Result<f64, GeomError> {
        let p = self.point_data_unclassified(t)?;
        Ok(match method {
            KMethod::Projection => -4.0 * p.dphi_perp.normsq() / (p.normsq * p.normsq),
            KMethod::Bivector => p.k,
            KMethod::Laplacian => self.hyperbolic_laplacian_log_metric(t, fd)? / (-p.normsq),
        })
    }

    /// `Δʰ ln|E| / E + 2K`.
    pub fn gauss_residual(&self, t: DNum, fd: FdConfig) -> Result<f64, GeomError> {
        let p = self.point_data_unclassified(t)?;
        let lap = self.hyperbolic_laplacian_log_metric(t, fd)?;
        Ok(lap / p.e + 2.0 * p.k)
    }

    /// `(σ_uu, σ_uv) = (Re Φ′⊥, Im Φ′⊥)`.
    pub fn second_fundamental(&self, t: DNum) -> Result<(Vec<f64>, Vec<f64>), GeomError> {
        let p = self.point_data_unclassified(t)?;
        Ok((p.dphi_perp.re(), p.dphi_perp.im()))
    }

    pub fn classify_point(&self, t: DNum) -> Result<PointClass, GeomError> {
        Ok(self.point_data(t)?.class)
    }

    /// Hyperbola at `t` using the local canonical factor `t′ = (Φ′²)^{−1/4}`;
    /// needs no chart since ν, μ, κ do not depend on which canonical chart.
    pub fn hyperbola_local(&self, t: DNum) -> Result<NormalHyperbola, GeomError> {
        let p = self.point_data(t)?;
        if p.class == PointClass::Degenerate {
            return Err(GeomError::DegeneratePoint { t, dphi_sq: p.dphi_sq });
        }
        let root = p
            .dphi_sq
            .nth_root_positive(4)
            .map_err(|_| GeomError::DegeneratePoint { t, dphi_sq: p.dphi_sq })?;
        let tprime = root.checked_inv().expect("positive root is invertible");
        Ok(NormalHyperbola::from_point(&p, tprime, false))
    }

    /// Hyperbola at canonical coordinate `s` of `chart`.
    pub fn hyperbola_at(&self, s: DNum, chart: &CanonicalChart) -> Result<NormalHyperbola, GeomError> {
        let t = chart.inverse(s)?;
        let p = self.point_data(t)?;
        if p.class == PointClass::Degenerate {
            return Err(GeomError::DegeneratePoint { t, dphi_sq: p.dphi_sq });
        }
        let tprime = chart.inverse_derivative(t)?;
        let residual = (p.dphi_sq * tprime.powi(4) - DNum::ONE).null_abs_max();
        if !(residual <= CANONICAL_TOL) {
            return Err(GeomError::NonCanonicalChart { s, residual });
        }
        Ok(NormalHyperbola::from_point(&p, tprime, chart.is_conjugated()))
    }

    /// Invariants over a `w×h` cell-centred grid.
    pub fn sweep(&self, w: usize, h: usize, exec: Exec, fd: FdConfig) -> Result<Vec<SweepRow>, GeomError> {
        if w < 1 || h < 1 {
            return Err(GeomError::GridTooSmall { w, h, min: 1 });
        }
        let points = self.domain.cell_centers(w, h);
        exec.try_map(&points, |&t| self.sweep_row(t, fd))
    }

    fn sweep_row(&self, t: DNum, fd: FdConfig) -> Result<SweepRow, GeomError> {
        let p = self.point_data(t)?;
        let k_proj = -4.0 * p.dphi_perp.normsq() / (p.normsq * p.normsq);
        let lap = self.hyperbolic_laplacian_log_metric(t, fd)?;
        let hyp = match p.class {
            PointClass::Degenerate => None,
            _ => Some(self.hyperbola_local(t)?),
        };
        Ok(SweepRow {
            u: t.re,
            v: t.im,
            e: p.e,
            k_proj,
            k_biv: p.k,
            k_lap: lap / (-p.normsq),
            class: p.class,
            nu: hyp.as_ref().map(|h| h.nu),
            mu: hyp.as_ref().map(|h| h.mu),
            kappa: hyp.as_ref().map(|h| h.kappa),
            gauss_residual: lap / p.e + 2.0 * p.k,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub u: f64,
    pub v: f64,
    pub e: f64,
    pub k_proj: f64,
    pub k_biv: f64,
    pub k_lap: f64,
    pub class: PointClass,
    pub nu: Option<f64>,
    pub mu: Option<f64>,
    pub kappa: Option<f64>,
    pub gauss_residual: f64,
}

/// Normal-curvature hyperbola in canonical coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalHyperbola {
    pub n1: Option<Vec<f64>>,
    pub n2: Option<Vec<f64>>,
    pub nu: f64,
    pub mu: f64,
    pub kappa: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// Metric coefficient in the canonical coordinates.
    #[serde(rename = "E")]
    pub e: f64,
    /// σ(X₁,X₁) and σ(X₁,X₂) for the unit frame.
    pub sigma11: Vec<f64>,
    pub sigma12: Vec<f64>,
    pub frame_degenerate: bool,
}

impl NormalHyperbola {
    /// `tprime = dt/ds` of a canonical change; `conjugated` for `t = t(s̄)`.
    fn from_point(p: &PointData, tprime: DNum, conjugated: bool) -> Self {
        let perp = p.dphi_perp.scale(tprime * tprime);
        let e = p.e * tprime.modsq();
        let s11: Vec<f64> = perp.re().iter().map(|x| x / -e).collect();
        let mut s12: Vec<f64> = perp.im().iter().map(|x| x / -e).collect();
        if conjugated {
            s12.iter_mut().for_each(|x| *x = -*x);
        }
        let nu = real_dot(&s11, &s11).max(0.0).sqrt();
        let mu = real_dot(&s12, &s12).max(0.0).sqrt();
        let tol = 1e-9 * (nu + mu).max(1e-300);
        let cross = real_dot(&s11, &s12);
        let dependent = (nu * mu).powi(2) - cross * cross <= 1e-12 * (nu * mu).powi(2);
        let unit = |v: &[f64], n: f64| (n > tol).then(|| v.iter().map(|x| x / n).collect());
        NormalHyperbola {
            n1: unit(&s11, nu),
            n2: unit(&s12, mu),
            nu,
            mu,
            kappa: 2.0 * nu * mu,
            k: mu * mu - nu * nu,
            e,
            frame_degenerate: nu <= tol || mu <= tol || dependent,
            sigma11: s11,
            sigma12: s12,
        }
    }

    /// `σ(X₁,X₁)·cosh 2ψ + σ(X₁,X₂)·sinh 2ψ`.
    pub fn sample(&self, psi: f64) -> Vec<f64> {
        let (c, s) = ((2.0 * psi).cosh(), (2.0 * psi).sinh());
        self.sigma11.iter().zip(&self.sigma12).map(|(a, b)| a * c + b * s).collect()
    }

    /// Coordinates `(ξ, η)` of a normal vector in the frame `(n₁, n₂)`.
    pub fn frame_coords(&self, x: &[f64]) -> Option<(f64, f64)> {
        Some((real_dot(x, self.n1.as_ref()?), real_dot(x, self.n2.as_ref()?)))
    }
}

/// Hyperbola point from raw canonical-coordinate `σ_uu`, `σ_uv` and `E`.
pub fn hyperbola_sample(sigma_uu: &[f64], sigma_uv: &[f64], e: f64, psi: f64) -> Vec<f64> {
    let (c, s) = ((2.0 * psi).cosh(), (2.0 * psi).sinh());
    sigma_uu
        .iter()
        .zip(sigma_uv)
        .map(|(a, b)| (a * c + b * s) / -e)
        .collect()
}

/// Largest Euclidean norm of `x_uu − x_vv` over interior grid nodes of a
/// sampled immersion; zero exactly when the sample is hyperbolically harmonic.
pub fn mean_curvature_residual(x: &[Vec<f64>], grid: &UvGrid) -> Result<f64, GeomError> {
    if grid.nu < 3 || grid.nv < 3 {
        return Err(GeomError::GridTooSmall { w: grid.nu, h: grid.nv, min: 3 });
    }
    if x.len() != grid.len() {
        return Err(HoloError::SampleCount { got: x.len(), want: grid.len() }.into());
    }
    let at = |i: usize, k: usize| &x[k * grid.nu + i];
    let mut worst: f64 = 0.0;
    for k in 1..grid.nv - 1 {
        for i in 1..grid.nu - 1 {
            let c = at(i, k);
            let norm = (0..c.len())
                .map(|d| {
                    let xuu = (at(i + 1, k)[d] - 2.0 * c[d] + at(i - 1, k)[d]) / (grid.du * grid.du);
                    let xvv = (at(i, k + 1)[d] - 2.0 * c[d] + at(i, k - 1)[d]) / (grid.dv * grid.dv);
                    (xuu - xvv).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            worst = worst.max(norm);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dnum::J;
    use crate::gallery;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn s1_point_data() {
        let s = gallery::s1();
        let p = s.point_data(DNum::new(0.0, FRAC_PI_2)).unwrap();
        assert!(close(p.e, -1.0, 1e-15));
        assert!(close(p.k, 1.0, 1e-12));
        assert!((&p.phi - &DVec::new(vec![DNum::ONE, DNum::ZERO, J]).unwrap()).scale_hint() < 1e-30);
        assert!((&p.dphi_perp - &p.dphi).scale_hint() < 1e-30);
        assert_eq!(p.class, PointClass::Generic);
        let p = s.point_data(DNum::new(0.3, FRAC_PI_4)).unwrap();
        assert!(close(p.e, -0.5, 1e-15));
        assert!(close(p.k, 4.0, 1e-12));
        let want = &p.dphi - &p.phi.scale(J);
        assert!((&p.dphi_perp - &want).scale_hint() < 1e-28);
        assert!(p.phi.dot(&p.dphi).unwrap().null_abs_max() < 1e-12);
    }

    #[test]
    fn rejects_real_isotropic_direction() {
        let psi = HoloCurve::from_exprs(
            &["t", "t", "0"].map(|s| crate::sexpr::parse(s).unwrap()),
            NullBox::ENTIRE,
        )
        .unwrap();
        let dom = Domain::from_null(NullBox::new((-1.0, 1.0), (-1.0, 1.0))).unwrap();
        assert!(matches!(make_surface(psi, dom), Err(GeomError::NotTimelike { .. })));
    }

    #[test]
    fn rejects_non_isothermal() {
        let psi = HoloCurve::from_exprs(
            &["2*t", "t", "0"].map(|s| crate::sexpr::parse(s).unwrap()),
            NullBox::ENTIRE,
        )
        .unwrap();
        let dom = Domain::from_null(NullBox::new((-1.0, 1.0), (-1.0, 1.0))).unwrap();
        assert!(matches!(make_surface(psi, dom), Err(GeomError::NotIsothermal { .. })));
    }

    #[test]
    fn s3_is_flat_and_degenerate() {
        let s = gallery::s3();
        let p = s.point_data(DNum::new(0.1, 0.2)).unwrap();
        assert_eq!(p.e, -9.0);
        assert_eq!(p.k, 0.0);
        assert_eq!(p.class, PointClass::Degenerate);
        let (a, b) = s.second_fundamental(p.t).unwrap();
        assert!(a.iter().chain(&b).all(|&x| x == 0.0));
        assert!(matches!(s.hyperbola_local(p.t), Err(GeomError::DegeneratePoint { .. })));
        assert_eq!(s.validation().degenerate, s.validation().points());
    }

    #[test]
    fn three_k_methods_on_s2() {
        let s = gallery::s2();
        let v: f64 = 0.5;
        let t = DNum::new(0.0, v);
        let (s2, c2, ch2) = ((2.0 * v).sinh(), (2.0 * v).sin(), (2.0 * v).cos() - (2.0 * v).cosh());
        let want = -8.0 * s2 * c2 / ch2.powi(3);
        assert!(close(want, 7.8456, 1e-4));
        let fd = FdConfig::default();
        for m in [KMethod::Projection, KMethod::Bivector] {
            assert!(close(s.gauss_k(t, m, fd).unwrap(), want, 1e-9 * want));
        }
        assert!(close(s.gauss_k(t, KMethod::Laplacian, fd).unwrap(), want, 5e-5));
        assert!(s.gauss_residual(t, fd).unwrap().abs() < 5e-4);
    }

    #[test]
    fn projection_of_tangent_is_zero() {
        let s = gallery::s2();
        let t = DNum::new(0.2, 0.7);
        let phi = s.phi().eval(t).unwrap();
        assert!(s.project_normal(t, &phi).unwrap().scale_hint() < 1e-24);
        let n = s.project_normal(t, &s.dphi().eval(t).unwrap()).unwrap();
        assert!(n.dot(&phi).unwrap().null_abs_max() < 1e-10);
        assert!(n.dot(&phi.conj()).unwrap().null_abs_max() < 1e-10);
    }

    #[test]
    fn metric_degeneracy_and_margin_errors() {
        let s = gallery::s1();
        // v = 0 is inside the enclosing null box but the metric vanishes
        assert!(matches!(s.point_data(DNum::ZERO), Err(GeomError::MetricDegenerate { .. })));
        let edge = DNum::from_null(s.domain().null.a.1 - 1e-4, 0.5);
        assert!(matches!(
            s.gauss_k(edge, KMethod::Laplacian, FdConfig::default()),
            Err(GeomError::FdMargin { .. })
        ));
        assert!(matches!(s.point_data(DNum::new(0.0, 9.0)), Err(GeomError::Holo(_))));
    }

    #[test]
    fn s1_hyperbola_is_degenerate_branch() {
        let s = gallery::s1();
        let h = s.hyperbola_local(DNum::new(0.0, FRAC_PI_2)).unwrap();
        assert!(h.nu < 1e-12 && close(h.mu, 1.0, 1e-12));
        assert!(h.frame_degenerate && h.n1.is_none());
        assert!(close(h.k, 1.0, 1e-12) && h.kappa < 1e-12);
        let line = h.sample(0.3);
        let want = (0.6f64).sinh();
        assert!(close(line[1], -want, 1e-12) && line[0].abs() < 1e-12 && line[2].abs() < 1e-12);
        assert_eq!(h.sample(0.0), h.sigma11);
    }

    #[test]
    fn s2_hyperbola_relations() {
        let s = gallery::s2();
        let h = s.hyperbola_local(DNum::new(0.1, 0.5)).unwrap();
        assert!(h.nu > 0.0 && h.mu > 0.0 && !h.frame_degenerate);
        assert!(close(h.k * h.k + h.kappa * h.kappa, (h.mu * h.mu + h.nu * h.nu).powi(2), 1e-8));
        assert!(close(-h.e * (h.mu * h.mu + h.nu * h.nu).sqrt(), 1.0, 1e-8));
        let (n1, n2) = (h.n1.clone().unwrap(), h.n2.clone().unwrap());
        assert!(real_dot(&n1, &n2).abs() < 1e-9);
        let x = h.sample(0.35);
        let (xi, eta) = h.frame_coords(&x).unwrap();
        assert!(close((xi / h.nu).powi(2) - (eta / h.mu).powi(2), 1.0, 1e-8));
    }

    #[test]
    fn mean_curvature_examples() {
        let grid = UvGrid::spanning((0.0, 1.0), (0.0, 1.0), 16, 16);
        let quad: Vec<Vec<f64>> = grid.points().iter().map(|t| vec![t.re, t.im, t.re * t.re]).collect();
        assert!(close(mean_curvature_residual(&quad, &grid).unwrap(), 2.0, 1e-9));
        let affine: Vec<Vec<f64>> = grid.points().iter().map(|t| vec![2.0 * t.re - t.im, 0.5, t.im]).collect();
        assert!(mean_curvature_residual(&affine, &grid).unwrap() < 1e-12);

        let s = gallery::s1();
        let grid = UvGrid::spanning((-1.0, 1.0), (0.3, PI - 0.3), 128, 128);
        let x: Vec<Vec<f64>> = grid.points().iter().map(|&t| s.point_data(t).unwrap().x).collect();
        assert!(mean_curvature_residual(&x, &grid).unwrap() <= 1e-3);
    }

    #[test]
    fn domains() {
        let d = Domain::from_uv(UvBox { u: (-1.0, 1.0), v: (0.5, 2.0) }).unwrap();
        assert_eq!(d.null, NullBox::new((-3.0, 0.5), (-0.5, 3.0)));
        let c = d.cell_centers(2, 2);
        assert_eq!(c[1], DNum::new(0.5, 0.875));
        let n = d.nodes(2, 3);
        assert_eq!(n[5], DNum::new(1.0, 2.0));
        let jd = d.through_j();
        for t in c {
            assert!(jd.contains(J * t) || jd.contains(DNum::new(t.im, t.re)));
            assert!(jd.null.contains(J * t));
        }
        assert!(Domain::from_null(NullBox::new((1.0, 1.0), (0.0, 1.0))).is_err());
    }
}
