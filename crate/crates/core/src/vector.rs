//! Euclidean vector kernels on plain `f64` slices.
//!
//! The public functions check lengths; the `pub(crate)` kernels assume the
//! caller already did.

use alloc::vec::Vec;

use crate::{Error, Result};

pub fn dot(u: &[f64], v: &[f64]) -> Result<f64> {
    same_len(u, v)?;
    Ok(dot_unchecked(u, v))
}

pub fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(dot_unchecked(v, v))
}

/// Returns `a * x + y`.
pub fn axpy(a: f64, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    same_len(x, y)?;
    Ok(x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect())
}

/// Fails with [`Error::NonFinite`] on the first NaN or infinite entry.
pub fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

pub(crate) fn same_len(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn dot_unchecked(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// `y += a * x`
#[inline]
pub(crate) fn axpy_in_place(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub(crate) fn scale_in_place(a: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= a;
    }
}

pub(crate) fn scaled(a: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|xi| a * xi).collect()
}
