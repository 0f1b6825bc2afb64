//! Double numbers `u + jv` with `j² = 1`.
//!
//! The algebra splits as `ℝ ⊕ ℝ` through the null basis `q = (1 − j)/2`,
//! `q̄ = (1 + j)/2`: writing `t = p·q + m·q̄` with `p = u − v`, `m = u + v`,
//! every ring operation acts on `(p, m)` componentwise. Values are stored as
//! `(re, im)` and the null view is computed on demand.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default relative tolerance used by [`classify`].
pub const EPS_CLS: f64 = 1e-9;

/// Which null component of a double number is at fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullComponent {
    /// The `q` coefficient, `re − im`.
    Minus,
    /// The `q̄` coefficient, `re + im`.
    Plus,
}

impl fmt::Display for NullComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullComponent::Minus => f.write_str("q (re - im)"),
            NullComponent::Plus => f.write_str("q̄ (re + im)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DNumError {
    #[error("division by a non-invertible double number: null component {0} vanishes")]
    NonInvertible(NullComponent),
    #[error("root of order {n} needs a positive argument, but null component {component} is {value}")]
    NotPositive {
        n: u32,
        component: NullComponent,
        value: f64,
    },
    #[error("root order must be at least 1")]
    ZeroOrder,
    #[error("cannot parse double number from {0:?}")]
    Parse(String),
}

/// A double (split-complex) number `re + j·im`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DNum {
    pub re: f64,
    pub im: f64,
}

/// The null basis element `q = (1 − j)/2`.
pub const Q: DNum = DNum { re: 0.5, im: -0.5 };
/// The null basis element `q̄ = (1 + j)/2`.
pub const Q_BAR: DNum = DNum { re: 0.5, im: 0.5 };
/// The hyperbolic unit.
pub const J: DNum = DNum { re: 0.0, im: 1.0 };

impl DNum {
    pub const ZERO: DNum = DNum { re: 0.0, im: 0.0 };
    pub const ONE: DNum = DNum { re: 1.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        DNum { re, im }
    }

    pub const fn real(re: f64) -> Self {
        DNum { re, im: 0.0 }
    }

    /// Builds `p·q + m·q̄`.
    pub fn from_null(p: f64, m: f64) -> Self {
        DNum {
            re: 0.5 * (p + m),
            im: 0.5 * (m - p),
        }
    }

    /// `(p, m) = (re − im, re + im)`.
    pub fn null(self) -> (f64, f64) {
        (self.re - self.im, self.re + self.im)
    }

    pub fn conj(self) -> Self {
        DNum {
            re: self.re,
            im: -self.im,
        }
    }

    /// `|a|² = re² − im² = p·m`; may be negative.
    pub fn modsq(self) -> f64 {
        let (p, m) = self.null();
        p * m
    }

    /// `(ā, |a|²)`.
    pub fn conj_modsq(self) -> (DNum, f64) {
        (self.conj(), self.modsq())
    }

    pub fn scale(self, k: f64) -> Self {
        DNum {
            re: self.re * k,
            im: self.im * k,
        }
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Largest absolute null component; the scale used by tolerances.
    pub fn null_abs_max(self) -> f64 {
        let (p, m) = self.null();
        p.abs().max(m.abs())
    }

    /// Inverse, refusing elements of 𝔻₀.
    pub fn checked_inv(self) -> Result<DNum, DNumError> {
        let (p, m) = self.null();
        if p == 0.0 {
            return Err(DNumError::NonInvertible(NullComponent::Minus));
        }
        if m == 0.0 {
            return Err(DNumError::NonInvertible(NullComponent::Plus));
        }
        Ok(DNum::from_null(1.0 / p, 1.0 / m))
    }

    pub fn checked_div(self, rhs: DNum) -> Result<DNum, DNumError> {
        let inv = rhs.checked_inv()?;
        Ok(self * inv)
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = DNum::ONE;
        for _ in 0..n {
            acc *= self;
        }
        acc
    }

    /// The 𝔻₊ branch of the `n`th root: positive real roots of both null
    /// components. Either component being `≤ 0` (or non-finite) is an error.
    pub fn nth_root_positive(self, n: u32) -> Result<DNum, DNumError> {
        if n == 0 {
            return Err(DNumError::ZeroOrder);
        }
        let (p, m) = self.null();
        for (component, value) in [(NullComponent::Minus, p), (NullComponent::Plus, m)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(DNumError::NotPositive {
                    n,
                    component,
                    value,
                });
            }
        }
        let root = |x: f64| match n {
            1 => x,
            2 => x.sqrt(),
            3 => x.cbrt(),
            4 => x.sqrt().sqrt(),
            _ => x.powf(1.0 / n as f64),
        };
        Ok(DNum::from_null(root(p), root(m)))
    }

    // The elementary functions below use the (u, v) addition formulas rather
    // than the null split, so they can serve as an independent reference for
    // null-component lowering.

    pub fn exp(self) -> Self {
        let e = self.re.exp();
        DNum::new(e * self.im.cosh(), e * self.im.sinh())
    }

    pub fn sin(self) -> Self {
        DNum::new(
            self.re.sin() * self.im.cos(),
            self.re.cos() * self.im.sin(),
        )
    }

    pub fn cos(self) -> Self {
        DNum::new(
            self.re.cos() * self.im.cos(),
            -self.re.sin() * self.im.sin(),
        )
    }

    pub fn sinh(self) -> Self {
        DNum::new(
            self.re.sinh() * self.im.cosh(),
            self.re.cosh() * self.im.sinh(),
        )
    }

    pub fn cosh(self) -> Self {
        DNum::new(
            self.re.cosh() * self.im.cosh(),
            self.re.sinh() * self.im.sinh(),
        )
    }
}

/// `cosh θ + j sinh θ`, the unimodular elements of 𝔻₊.
pub fn exp_j(theta: f64) -> DNum {
    DNum::new(theta.cosh(), theta.sinh())
}

/// Classification of a double number against 𝔻₀ and 𝔻₊.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DClass {
    /// In 𝔻₀, up to tolerance.
    Null,
    /// In 𝔻₊.
    Positive,
    /// Invertible but not positive.
    OtherInvertible,
}

/// Classifies `a` with relative threshold `eps·(1 + max(|p|, |m|))`.
pub fn classify(a: DNum, eps: f64) -> DClass {
    let (p, m) = a.null();
    let thr = eps * (1.0 + p.abs().max(m.abs()));
    if p.abs().min(m.abs()) <= thr {
        DClass::Null
    } else if p > thr && m > thr {
        DClass::Positive
    } else {
        DClass::OtherInvertible
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Binary arithmetic through the null basis.
pub fn arithmetic(a: DNum, b: DNum, op: ArithOp) -> Result<DNum, DNumError> {
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.checked_div(b),
    }
}

impl Add for DNum {
    type Output = DNum;
    fn add(self, rhs: DNum) -> DNum {
        DNum::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for DNum {
    type Output = DNum;
    fn sub(self, rhs: DNum) -> DNum {
        DNum::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for DNum {
    type Output = DNum;
    fn mul(self, rhs: DNum) -> DNum {
        let (p1, m1) = self.null();
        let (p2, m2) = rhs.null();
        DNum::from_null(p1 * p2, m1 * m2)
    }
}

impl Mul<f64> for DNum {
    type Output = DNum;
    fn mul(self, rhs: f64) -> DNum {
        self.scale(rhs)
    }
}

impl Mul<DNum> for f64 {
    type Output = DNum;
    fn mul(self, rhs: DNum) -> DNum {
        rhs.scale(self)
    }
}

/// Panics on non-invertible divisors; use [`DNum::checked_div`] when the
/// divisor is not known to be invertible.
impl Div for DNum {
    type Output = DNum;
    fn div(self, rhs: DNum) -> DNum {
        match self.checked_div(rhs) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }
}

impl Neg for DNum {
    type Output = DNum;
    fn neg(self) -> DNum {
        DNum::new(-self.re, -self.im)
    }
}

impl AddAssign for DNum {
    fn add_assign(&mut self, rhs: DNum) {
        *self = *self + rhs;
    }
}

impl SubAssign for DNum {
    fn sub_assign(&mut self, rhs: DNum) {
        *self = *self - rhs;
    }
}

impl MulAssign for DNum {
    fn mul_assign(&mut self, rhs: DNum) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for DNum {
    fn sum<I: Iterator<Item = DNum>>(iter: I) -> DNum {
        iter.fold(DNum::ZERO, |a, b| a + b)
    }
}

impl From<f64> for DNum {
    fn from(re: f64) -> Self {
        DNum::real(re)
    }
}

/// `a+bj` / `a-bj`.
impl fmt::Display for DNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{}-{}j", self.re, -self.im)
        } else {
            write!(f, "{}+{}j", self.re, self.im)
        }
    }
}

impl FromStr for DNum {
    type Err = DNumError;

    /// Accepts `a+bj`, `a-bj`, a bare real `a`, or a bare `bj`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DNumError::Parse(s.to_string());
        let t = s.trim();
        let Some(body) = t.strip_suffix('j') else {
            return t.parse::<f64>().map(DNum::real).map_err(|_| err());
        };
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re = body[..i].trim().parse::<f64>().map_err(|_| err())?;
                let im_txt = body[i..].trim();
                let im = match im_txt {
                    "+" => 1.0,
                    "-" => -1.0,
                    _ => im_txt.parse::<f64>().map_err(|_| err())?,
                };
                Ok(DNum::new(re, im))
            }
            None => {
                let im = match body.trim() {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    x => x.parse::<f64>().map_err(|_| err())?,
                };
                Ok(DNum::new(0.0, im))
            }
        }
    }
}

/// JSON form is the two-element array `[re, im]`.
impl Serialize for DNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.re, self.im].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DNum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(deserializer)?;
        Ok(DNum { re, im })
    }
}
