//! Complex linear algebra for the single-particle (2-dimensional) and
//! two-particle (4-dimensional) state spaces.
//!
//! Kets are fixed-size arrays of [`Complex64`]. Product kets use left-major
//! ordering: component `2 * i + j` of `a ⊗ b` is `a[i] * b[j]`.

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// A single complex probability amplitude.
pub type ComplexAmplitude = Complex64;

/// Tolerance below which a norm or probability is treated as exactly zero.
pub const ZERO_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degenerate state: norm {norm:e} is not above tolerance {tolerance:e}")]
    DegenerateState { norm: f64, tolerance: f64 },
}

/// A ket with `N` complex components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket<const N: usize>(pub [Complex64; N]);

// Serialized as a list of `[re, im]` pairs.
impl<const N: usize> Serialize for Ket<N> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(serializer)
    }
}

/// Single-particle ket.
pub type Vec2 = Ket<2>;
/// Two-particle ket in left-major product order.
pub type Vec4 = Ket<4>;

impl<const N: usize> Ket<N> {
    pub fn zero() -> Self {
        Ket([Complex64::new(0.0, 0.0); N])
    }

    /// The `index`-th standard basis vector.
    pub fn basis(index: usize) -> Self {
        let mut v = Self::zero();
        v.0[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_real(values: [f64; N]) -> Self {
        Ket(values.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn components(&self) -> &[Complex64] {
        &self.0
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Ket(self.0.map(|c| c * factor))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o -= b;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o += b;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Rescales to unit norm, failing when the norm does not exceed `tolerance`.
    pub fn normalized(&self, tolerance: f64) -> Result<Self, LinalgError> {
        let norm = self.norm();
        if !(norm > tolerance) {
            return Err(LinalgError::DegenerateState { norm, tolerance });
        }
        Ok(Ket(self.0.map(|c| c / norm)))
    }
}

/// Product ket `a ⊗ b`.
pub fn tensor(a: &Vec2, b: &Vec2) -> Vec4 {
    let mut out = Vec4::zero();
    for i in 0..2 {
        for j in 0..2 {
            out.0[2 * i + j] = a.0[i] * b.0[j];
        }
    }
    out
}

/// Inner product of two component slices of possibly different length.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Result<Complex64, LinalgError> {
    if a.len() != b.len() {
        return Err(LinalgError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
}

/// Slice form of [`Ket::normalized`].
pub fn normalize(v: &[Complex64], tolerance: f64) -> Result<Vec<Complex64>, LinalgError> {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > tolerance) {
        return Err(LinalgError::DegenerateState { norm, tolerance });
    }
    Ok(v.iter().map(|c| c / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: &[Complex64], b: &[Complex64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() < 1e-12, "{a:?} != {b:?}");
        }
    }

    #[test]
    fn tensor_of_standard_basis() {
        let e1 = Vec2::basis(0);
        let e2 = Vec2::basis(1);
        assert_close(tensor(&e1, &e1).components(), Vec4::from_real([1.0, 0.0, 0.0, 0.0]).components());
        assert_close(tensor(&e1, &e2).components(), Vec4::from_real([0.0, 1.0, 0.0, 0.0]).components());
    }

    #[test]
    fn tensor_is_bilinear() {
        let plus = Vec2::from_real([FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let t = tensor(&plus, &Vec2::basis(0));
        assert_close(t.components(), Vec4::from_real([FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0]).components());
    }

    #[test]
    fn inner_conventions() {
        let v = Vec2::from_real([0.6, 0.8]);
        assert!((v.inner(&v) - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(Vec2::basis(0).inner(&Vec2::basis(1)), c(0.0, 0.0));
        // first argument is conjugated
        let a = Ket([c(0.0, 1.0), c(0.0, 0.0)]);
        assert!((a.inner(&Vec2::basis(0)) - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_rejects_mismatched_dimensions() {
        let err = inner(Vec2::basis(0).components(), Vec4::basis(0).components()).unwrap_err();
        assert_eq!(err, LinalgError::DimensionMismatch { left: 2, right: 4 });
    }

    #[test]
    fn normalize_cases() {
        let v = Vec4::from_real([2.0, 0.0, 0.0, 0.0]).normalized(ZERO_TOLERANCE).unwrap();
        assert_close(v.components(), Vec4::basis(0).components());

        let v = Vec4::from_real([1.0, 1.0, 0.0, 0.0]).normalized(ZERO_TOLERANCE).unwrap();
        assert_close(v.components(), Vec4::from_real([FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0]).components());

        assert!(matches!(
            Vec4::zero().normalized(ZERO_TOLERANCE),
            Err(LinalgError::DegenerateState { .. })
        ));
        assert!(normalize(&[c(0.0, 0.0); 4], ZERO_TOLERANCE).is_err());
        let n = normalize(&[c(0.0, 3.0), c(4.0, 0.0)], ZERO_TOLERANCE).unwrap();
        assert_close(&n, &[c(0.0, 0.6), c(0.8, 0.0)]);
    }
}
