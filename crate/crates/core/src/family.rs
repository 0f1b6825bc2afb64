//! New surfaces from old: conjugate, associated family, motions, homotheties.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::CanonicalChart;
use crate::dnum::{exp_j, DNum, J};
use crate::geom::{make_surface, GeomError, SurfacePatch};
use crate::holo::HoloCurve;
use crate::sexpr::Expr;

pub const MOTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("matrix is not in O(n,1): max |AᵀηA − η| = {residual:e}")]
    NotLorentz { residual: f64 },
    #[error("motion has shape {rows}x{cols} with translation of length {b}, surface dimension is {n}")]
    Shape { rows: usize, cols: usize, b: usize, n: usize },
    #[error("homothety coefficient must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("surface has no symbolic form")]
    NotSymbolic,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// `x ↦ Ax + b` with `A ∈ O(n,1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Motion {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl Motion {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self, FamilyError> {
        let m = Motion { a, b };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        let a = (0..n).map(|i| (0..n).map(|k| if i == k { 1.0 } else { 0.0 }).collect()).collect();
        Motion { a, b: vec![0.0; n] }
    }

    /// Boost of rapidity `beta` mixing the time axis with axis `k`.
    pub fn boost(n: usize, k: usize, beta: f64) -> Self {
        let mut m = Self::identity(n);
        m.a[0][0] = beta.cosh();
        m.a[k][k] = beta.cosh();
        m.a[0][k] = beta.sinh();
        m.a[k][0] = beta.sinh();
        m
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn translation(&self) -> &[f64] {
        &self.b
    }

    /// Checks shape and `AᵀηA = η`.
    pub fn validate(&self) -> Result<(), FamilyError> {
        let n = self.b.len();
        let shape = FamilyError::Shape {
            rows: self.a.len(),
            cols: self.a.first().map_or(0, Vec::len),
            b: n,
            n,
        };
        if self.a.len() != n || self.a.iter().any(|r| r.len() != n) || n == 0 {
            return Err(shape);
        }
        let eta = |i: usize| if i == 0 { -1.0 } else { 1.0 };
        let mut residual: f64 = 0.0;
        for i in 0..n {
            for k in 0..n {
                let g: f64 = (0..n).map(|r| self.a[r][i] * eta(r) * self.a[r][k]).sum();
                let want = if i == k { eta(i) } else { 0.0 };
                residual = residual.max((g - want).abs());
            }
        }
        if !(residual <= MOTION_TOL) {
            return Err(FamilyError::NotLorentz { residual });
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, b)| row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + b)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Construction {
    Conjugate,
    Associated(f64),
    Homothety(f64),
    Motion(Motion),
}

fn sources(s: &SurfacePatch) -> Result<Vec<Expr>, FamilyError> {
    s.psi().sources().ok_or(FamilyError::NotSymbolic)
}

fn rebuild(exprs: &[Expr], domain: crate::geom::Domain) -> Result<SurfacePatch, FamilyError> {
    let psi = HoloCurve::from_exprs(exprs, domain.null).map_err(GeomError::from)?;
    Ok(make_surface(psi, domain)?)
}

/// Component expressions of the constructed surface.
pub fn construct_exprs(exprs: &[Expr], c: &Construction) -> Result<Vec<Expr>, FamilyError> {
    Ok(match c {
        Construction::Conjugate => {
            let jt = Expr::mul(Expr::J, Expr::T);
            exprs.iter().map(|e| Expr::mul(Expr::J, e.subst_t(&jt))).collect()
        }
        Construction::Associated(theta) => {
            let k = exp_j(*theta);
            exprs.iter().map(|e| e.clone().scale_by(k)).collect()
        }
        Construction::Homothety(k) => {
            if !(*k > 0.0) {
                return Err(FamilyError::NonPositiveScale(*k));
            }
            exprs.iter().map(|e| e.clone().scale_by(DNum::real(*k))).collect()
        }
        Construction::Motion(m) => {
            m.validate()?;
            let n = exprs.len();
            if m.dim() != n {
                return Err(FamilyError::Shape { rows: m.a.len(), cols: m.a.len(), b: m.b.len(), n });
            }
            m.a.iter()
                .zip(&m.b)
                .map(|(row, &b)| {
                    let mut acc: Option<Expr> = None;
                    for (&a, e) in row.iter().zip(exprs) {
                        if a == 0.0 {
                            continue;
                        }
                        let term = Expr::mul(Expr::Num(a), e.clone());
                        acc = Some(match acc {
                            None => term,
                            Some(prev) => Expr::add(prev, term),
                        });
                    }
                    let lin = acc.unwrap_or(Expr::Num(0.0));
                    if b == 0.0 {
                        lin
                    } else {
                        Expr::add(lin, Expr::Num(b))
                    }
                })
                .collect()
        }
    })
}

pub fn apply(s: &SurfacePatch, c: &Construction) -> Result<SurfacePatch, FamilyError> {
    let exprs = construct_exprs(&sources(s)?, c)?;
    let domain = match c {
        Construction::Conjugate => s.domain().through_j(),
        _ => *s.domain(),
    };
    rebuild(&exprs, domain)
}

/// `Ψ̂(s) = jΨ(js)` on `{s : js ∈ D}`.
pub fn conjugate_surface(s: &SurfacePatch) -> Result<SurfacePatch, FamilyError> {
    apply(s, &Construction::Conjugate)
}

/// `Ψ_θ = (cosh θ + j sinh θ)·Ψ`.
pub fn associated_surface(s: &SurfacePatch, theta: f64) -> Result<SurfacePatch, FamilyError> {
    apply(s, &Construction::Associated(theta))
}

pub fn apply_motion(s: &SurfacePatch, m: &Motion) -> Result<SurfacePatch, FamilyError> {
    apply(s, &Construction::Motion(m.clone()))
}

pub fn homothety(s: &SurfacePatch, k: f64) -> Result<SurfacePatch, FamilyError> {
    apply(s, &Construction::Homothety(k))
}

/// A canonical chart of `S` carried over to the constructed surface.
pub fn transport_chart(chart: &CanonicalChart, c: &Construction) -> CanonicalChart {
    match c {
        Construction::Conjugate => chart.through_j(),
        Construction::Associated(theta) => chart.post_scaled((-theta / 2.0).exp(), (theta / 2.0).exp()),
        Construction::Homothety(k) => chart.post_scaled(k.sqrt(), k.sqrt()),
        Construction::Motion(_) => chart.clone(),
    }
}

/// Where a point of `S` sits on the constructed surface.
pub fn corresponding_point(t: DNum, c: &Construction) -> DNum {
    match c {
        Construction::Conjugate => J * t,
        _ => t,
    }
}

/// Metric coefficient of `y = Re(jΨ)` at `t`, computed from the conjugate
/// patch as `−Ê(jt)`.
pub fn conjugate_metric(conj: &SurfacePatch, t: DNum) -> Result<f64, FamilyError> {
    Ok(-conj.point_data(J * t)?.e)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyCheck {
    /// What is compared, e.g. `"max|E_theta - E|"`.
    pub quantity: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks the metric law of the construction over a `grid×grid` sample.
pub fn verify(s: &SurfacePatch, derived: &SurfacePatch, c: &Construction, grid: usize) -> Result<FamilyCheck, FamilyError> {
    let points = s.domain().cell_centers(grid, grid);
    let mut worst: f64 = 0.0;
    let (quantity, tolerance) = match c {
        Construction::Conjugate => ("max|E_conj + E|", 1e-10),
        Construction::Associated(_) => ("max|E_theta - E|", 1e-12),
        Construction::Homothety(_) => ("max|E_hat - k^2 E|", 1e-12),
        Construction::Motion(_) => ("max|E_hat - E|", 1e-10),
    };
    for &t in &points {
        let e = s.point_data(t)?.e;
        let r = match c {
            Construction::Conjugate => conjugate_metric(derived, t)? + e,
            Construction::Homothety(k) => {
                (derived.point_data(t)?.e - k * k * e) / (k * k).max(1.0)
            }
            _ => derived.point_data(t)?.e - e,
        };
        worst = worst.max(r.abs());
    }
    Ok(FamilyCheck {
        quantity: quantity.to_string(),
        value: worst,
        tolerance,
        passed: worst <= tolerance,
    })
}

/// `‖exp_j(θ)‖² = 1` for every θ while `|j|² = −1`, so no member of the
/// associated family is the conjugate surface.
pub fn conjugate_in_family(theta: f64) -> bool {
    exp_j(theta).modsq() == J.modsq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::{canonize, chart_grid, verify_canonical};
    use crate::gallery;
    use crate::geom::{FdConfig, KMethod};

    #[test]
    fn motions_validate() {
        assert!(Motion::boost(3, 1, 0.3).validate().is_ok());
        let mut refl = Motion::identity(3);
        refl.a[2][2] = -1.0;
        assert!(refl.validate().is_ok());
        assert!(matches!(
            Motion::new(vec![vec![2.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], vec![0.0; 3]),
            Err(FamilyError::NotLorentz { .. })
        ));
        assert!(matches!(Motion::new(vec![vec![1.0]], vec![0.0, 0.0]), Err(FamilyError::Shape { .. })));
    }

    #[test]
    fn conjugate_of_s1() {
        let s = gallery::s1();
        let c = conjugate_surface(&s).unwrap();
        let t = DNum::new(0.4, 1.2);
        let y = c.point_data(J * t).unwrap().x;
        assert!((y[1] - t.re.cos() * t.im.sin()).abs() < 1e-14);
        let chk = verify(&s, &c, &Construction::Conjugate, 16).unwrap();
        assert!(chk.passed, "{chk:?}");
        // twice: back to the original up to translation
        let cc = conjugate_surface(&c).unwrap();
        let (p, q) = (s.point_data(t).unwrap(), cc.point_data(t).unwrap());
        assert!((&p.phi - &q.phi).scale_hint() < 1e-26);
    }

    #[test]
    fn associated_identity_and_isometry() {
        let s = gallery::s1();
        let exprs = s.psi().sources().unwrap();
        assert_eq!(construct_exprs(&exprs, &Construction::Associated(0.0)).unwrap(), exprs);
        for theta in [0.5, -0.5, 1.0, -1.0] {
            let a = associated_surface(&s, theta).unwrap();
            assert!(verify(&s, &a, &Construction::Associated(theta), 16).unwrap().passed);
        }
        assert!(!conjugate_in_family(0.7));
    }

    #[test]
    fn homothety_scales() {
        let s = gallery::s1();
        let exprs = s.psi().sources().unwrap();
        let h = construct_exprs(&exprs, &Construction::Homothety(4.0)).unwrap();
        let text: Vec<String> = h.iter().map(|e| e.to_string()).collect();
        assert_eq!(text, ["4*t", "4*sin(t)", "-4*cos(t)"]);
        let hs = homothety(&s, 4.0).unwrap();
        let t = DNum::new(0.1, 1.0);
        assert!((hs.point_data(t).unwrap().dphi_sq - DNum::real(16.0)).null_abs_max() < 1e-12);
        assert!(matches!(homothety(&s, 0.0), Err(FamilyError::NonPositiveScale(_))));
        assert!(matches!(homothety(&s, -2.0), Err(FamilyError::NonPositiveScale(_))));
    }

    #[test]
    fn boost_keeps_curvature() {
        let s = gallery::s1();
        let m = Motion::boost(3, 1, 0.3);
        let b = apply_motion(&s, &m).unwrap();
        for t in s.domain().cell_centers(8, 8) {
            let (p, q) = (s.point_data(t).unwrap(), b.point_data(t).unwrap());
            assert!((p.k - q.k).abs() <= 1e-10 * p.k.abs().max(1.0));
            assert_eq!(p.class, q.class);
            let moved = m.apply(&p.x);
            assert!(moved.iter().zip(&q.x).all(|(a, b)| (a - b).abs() < 1e-12));
            let kp = b.gauss_k(t, KMethod::Projection, FdConfig::default()).unwrap();
            assert!((kp - p.k).abs() <= 1e-9 * p.k.abs());
        }
    }

    #[test]
    fn transported_charts_stay_canonical() {
        let s = gallery::s2();
        let chart = canonize(&s, DNum::ZERO).unwrap();
        for c in [
            Construction::Conjugate,
            Construction::Associated(0.7),
            Construction::Homothety(3.0),
            Construction::Motion(Motion::boost(4, 2, 0.3)),
        ] {
            let derived = apply(&s, &c).unwrap();
            let moved = transport_chart(&chart, &c);
            let pts: Vec<DNum> = chart_grid(&s, &chart, 8, 8).iter().map(|&t| corresponding_point(t, &c)).collect();
            let r = verify_canonical(&derived, &moved, &pts).unwrap();
            assert!(r <= 1e-8, "{c:?}: {r}");
        }
    }
}
