//! One-dimensional adaptive quadrature with dense cumulative output.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-10;
const SEED_PANELS: usize = 64;
const MAX_DEPTH: u32 = 48;
const LOCAL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("empty or invalid interval [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),
    #[error("adaptive quadrature did not converge near x = {0}")]
    NoConvergence(f64),
    #[error("x = {x} outside the tabulated interval [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("inverse requested for a non-monotone integral (integrand {value} at x = {x})")]
    NotMonotone { x: f64, value: f64 },
}

pub type Integrand = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

struct Simpson<'a> {
    f: &'a dyn Fn(f64) -> f64,
    nodes: Option<&'a mut Vec<(f64, f64)>>,
}

impl Simpson<'_> {
    fn eval(&self, x: f64) -> Result<f64, QuadError> {
        let y = (self.f)(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFinite(x))
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, QuadError> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (self.eval(lm)?, self.eval(rm)?);
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || h <= f64::EPSILON * (a.abs() + b.abs()) {
            let v = left + right + delta / 15.0;
            if let Some(nodes) = self.nodes.as_deref_mut() {
                nodes.push((b, v));
            }
            return Ok(v);
        }
        if depth >= MAX_DEPTH {
            return Err(QuadError::NoConvergence(m));
        }
        let l = self.recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
        let r = self.recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
        Ok(l + r)
    }

    fn run(&mut self, a: f64, b: f64, tol: f64) -> Result<f64, QuadError> {
        if a == b {
            return Ok(0.0);
        }
        let (fa, fb) = (self.eval(a)?, self.eval(b)?);
        let m = 0.5 * (a + b);
        let fm = self.eval(m)?;
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        self.recurse(a, b, fa, fm, fb, whole, tol, 0)
    }
}

/// Adaptive Simpson with Richardson correction, absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, QuadError> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(QuadError::BadInterval(a, b));
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    Simpson { f, nodes: None }.run(a, b, tol)
}

/// `F(x) = ∫_base^x f` on `[lo, hi]`, tabulated at the adaptive nodes.
///
/// Values between nodes are refined with a local adaptive integral, so the
/// table only fixes where the error budget is spent.
#[derive(Clone)]
pub struct CumulativeIntegral {
    f: Integrand,
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    base: f64,
    tol: f64,
}

impl fmt::Debug for CumulativeIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CumulativeIntegral")
            .field("lo", &self.lo())
            .field("hi", &self.hi())
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl CumulativeIntegral {
    pub fn build(f: Integrand, lo: f64, hi: f64, base: f64, tol: f64) -> Result<Self, QuadError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(QuadError::BadInterval(lo, hi));
        }
        if !(lo..=hi).contains(&base) {
            return Err(QuadError::OutOfRange { x: base, lo, hi });
        }
        let mut table = vec![(lo, 0.0)];
        let width = (hi - lo) / SEED_PANELS as f64;
        let panel_tol = tol / SEED_PANELS as f64;
        for k in 0..SEED_PANELS {
            let a = lo + k as f64 * width;
            let b = if k + 1 == SEED_PANELS { hi } else { a + width };
            let mut pieces = Vec::new();
            Simpson { f: f.as_ref(), nodes: Some(&mut pieces) }.run(a, b, panel_tol)?;
            table.extend(pieces);
        }
        let mut nodes = Vec::with_capacity(table.len());
        let mut values = Vec::with_capacity(table.len());
        let mut acc = 0.0;
        for (i, (x, piece)) in table.into_iter().enumerate() {
            if i > 0 {
                acc += piece;
            }
            nodes.push(x);
            values.push(acc);
        }
        let slopes = nodes.iter().map(|&x| f(x)).collect();
        let mut out = CumulativeIntegral { f, nodes, values, slopes, base, tol };
        out.base = f64::NAN;
        let offset = out.value(base)?;
        out.base = base;
        for v in &mut out.values {
            *v -= offset;
        }
        Ok(out)
    }

    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    fn check(&self, x: f64) -> Result<(), QuadError> {
        let (lo, hi) = (self.lo(), self.hi());
        let slack = 1e-12 * (hi - lo);
        if x.is_finite() && x >= lo - slack && x <= hi + slack {
            Ok(())
        } else {
            Err(QuadError::OutOfRange { x, lo, hi })
        }
    }

    fn segment(&self, x: f64) -> usize {
        let i = self.nodes.partition_point(|&n| n <= x);
        i.saturating_sub(1).min(self.nodes.len() - 2)
    }

    pub fn value(&self, x: f64) -> Result<f64, QuadError> {
        self.check(x)?;
        if x == self.base {
            return Ok(0.0);
        }
        let i = self.segment(x);
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        // integrate from the nearer node
        if x - x0 <= x1 - x {
            Ok(self.values[i] + integrate(self.f.as_ref(), x0, x, LOCAL_TOL)?)
        } else {
            Ok(self.values[i + 1] - integrate(self.f.as_ref(), x, x1, LOCAL_TOL)?)
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn integrand(&self) -> &Integrand {
        &self.f
    }

    /// Smallest and largest integrand value at the nodes.
    pub fn slope_bounds(&self) -> (f64, f64) {
        self.slopes
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)))
    }

    pub fn is_increasing(&self) -> bool {
        self.slopes.iter().all(|&s| s > 0.0)
    }

    /// Solves `F(x) = y` for increasing `F`: monotone cubic guess, then
    /// safeguarded Newton steps.
    pub fn inverse(&self, y: f64) -> Result<f64, QuadError> {
        if let Some(k) = self.slopes.iter().position(|&s| s <= 0.0) {
            return Err(QuadError::NotMonotone { x: self.nodes[k], value: self.slopes[k] });
        }
        let n = self.nodes.len();
        let (ylo, yhi) = (self.values[0], self.values[n - 1]);
        let slack = 1e-12 * (yhi - ylo).abs().max(1.0);
        if !(y >= ylo - slack && y <= yhi + slack) {
            return Err(QuadError::OutOfRange { x: y, lo: ylo, hi: yhi });
        }
        let y = y.clamp(ylo, yhi);
        let i = self.values.partition_point(|&v| v <= y).saturating_sub(1).min(n - 2);
        let (mut lo, mut hi) = (self.nodes[i], self.nodes[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let dy = y1 - y0;
        let mut x = if dy > 0.0 {
            // Hermite on x(F) with slopes 1/f at the ends
            let s = (y - y0) / dy;
            let dx = hi - lo;
            let (m0, m1) = (dy / self.slopes[i], dy / self.slopes[i + 1]);
            let (h00, h10, h01, h11) = (
                2.0 * s.powi(3) - 3.0 * s * s + 1.0,
                s.powi(3) - 2.0 * s * s + s,
                -2.0 * s.powi(3) + 3.0 * s * s,
                s.powi(3) - s * s,
            );
            let guess = h00 * lo + h10 * m0 + h01 * hi + h11 * m1;
            if guess > lo && guess < hi {
                guess
            } else {
                lo + s * dx
            }
        } else {
            lo
        };
        let ytol = 1e-14 * (1.0 + y.abs());
        for _ in 0..100 {
            let r = self.value(x)? - y;
            if r.abs() <= ytol {
                return Ok(x);
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let step = x - r / self.derivative(x);
            x = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
            if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                return Ok(x);
            }
        }
        Ok(x)
    }
}
