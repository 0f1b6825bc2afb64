//! Vectors in 𝔻ⁿ₁: the Minkowski product extended over the double numbers.
//!
//! Index 0 carries the minus sign of the metric.

use std::ops::{Add, Index, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dnum::DNum;

pub const MIN_DIM: usize = 3;
pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinkError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} outside the supported range {MIN_DIM}..={MAX_DIM}")]
    UnsupportedDimension(usize),
}

/// A vector of double numbers with signature `(−, +, …, +)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DVec(Vec<DNum>);

impl DVec {
    pub fn new(components: Vec<DNum>) -> Result<Self, MinkError> {
        let n = components.len();
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(MinkError::UnsupportedDimension(n));
        }
        Ok(DVec(components))
    }

    pub fn from_real(x: &[f64]) -> Result<Self, MinkError> {
        Self::new(x.iter().map(|&r| DNum::real(r)).collect())
    }

    pub fn zeros(n: usize) -> Result<Self, MinkError> {
        Self::new(vec![DNum::ZERO; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[DNum] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &DNum> {
        self.0.iter()
    }

    pub fn conj(&self) -> DVec {
        DVec(self.0.iter().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, k: DNum) -> DVec {
        DVec(self.0.iter().map(|&c| c * k).collect())
    }

    pub fn re(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.im).collect()
    }

    /// `−a₀b₀ + Σ_{k≥1} a_k b_k`.
    pub fn dot(&self, other: &DVec) -> Result<DNum, MinkError> {
        if self.dim() != other.dim() {
            return Err(MinkError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.dot_unchecked(other))
    }

    pub(crate) fn dot_unchecked(&self, other: &DVec) -> DNum {
        let mut acc = -(self.0[0] * other.0[0]);
        for (a, b) in self.0[1..].iter().zip(&other.0[1..]) {
            acc += *a * *b;
        }
        acc
    }

    /// Scalar square `a·a`.
    pub fn square(&self) -> DNum {
        self.dot_unchecked(self)
    }

    /// `‖a‖² = a·ā = −|a₀|² + Σ|a_k|²`, always real, possibly negative.
    pub fn normsq(&self) -> f64 {
        let mut acc = -self.0[0].modsq();
        for c in &self.0[1..] {
            acc += c.modsq();
        }
        debug_assert!({
            let full = self.dot_unchecked(&self.conj());
            full.im.abs() <= 1e-12 * (1.0 + self.scale_hint())
        });
        acc
    }

    /// `Σ (re² + im²)`, a positive magnitude used to scale tolerances.
    pub fn scale_hint(&self) -> f64 {
        self.0.iter().map(|c| c.re * c.re + c.im * c.im).sum()
    }

    /// `‖a∧b‖² = ‖a‖²‖b‖² − |ā·b|²`.
    pub fn wedge_normsq(&self, other: &DVec) -> Result<f64, MinkError> {
        if self.dim() != other.dim() {
            return Err(MinkError::DimensionMismatch(self.dim(), other.dim()));
        }
        let cross = self.conj().dot_unchecked(other);
        Ok(self.normsq() * other.normsq() - cross.modsq())
    }
}

impl Index<usize> for DVec {
    type Output = DNum;
    fn index(&self, i: usize) -> &DNum {
        &self.0[i]
    }
}

impl Add for &DVec {
    type Output = DVec;
    fn add(self, rhs: &DVec) -> DVec {
        assert_eq!(self.dim(), rhs.dim());
        DVec(self.0.iter().zip(&rhs.0).map(|(a, b)| *a + *b).collect())
    }
}

impl Sub for &DVec {
    type Output = DVec;
    fn sub(self, rhs: &DVec) -> DVec {
        assert_eq!(self.dim(), rhs.dim());
        DVec(self.0.iter().zip(&rhs.0).map(|(a, b)| *a - *b).collect())
    }
}

/// Real Minkowski product of two real vectors.
pub fn real_dot(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()
}
