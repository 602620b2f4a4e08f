//! The symmetric operator abstraction every solver runs on.
//!
//! Solvers only ever ask for products `H v`, so anything that can produce them
//! is an operator. [`DenseSymmetric`] is the concrete realization used by the
//! file readers, the oracles and the tests.

use alloc::vec;
use alloc::vec::Vec;

use crate::vector::{check_finite, dot_unchecked};
use crate::{Error, Result};

/// Relative asymmetry accepted by [`DenseSymmetric::from_rows`].
pub const ASYMMETRY_TOL: f64 = 1e-12;

/// A real symmetric linear map on `R^n`, accessed only through products.
///
/// Implementations must be deterministic and symmetric:
/// `u . apply(v) == v . apply(u)` up to rounding.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;

    /// Writes `H v` into `out`. Both slices have length [`dim`](Self::dim).
    fn apply_into(&self, v: &[f64], out: &mut [f64]);

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(v, &mut out);
        out
    }
}

impl<T: SymmetricOperator + ?Sized> SymmetricOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        (**self).apply_into(v, out)
    }
}

/// Dense symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetric {
    n: usize,
    entries: Vec<f64>,
}

impl DenseSymmetric {
    /// Builds the operator from a square array of rows.
    ///
    /// Entries may differ from their transposes by at most
    /// [`ASYMMETRY_TOL`] times the largest entry magnitude; the stored matrix is
    /// the symmetric part `(A + A^T) / 2`. Larger asymmetry is rejected and the
    /// worst index pair is reported.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::NonSquare {
                    rows: n,
                    row,
                    cols: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        Self::from_row_major(n, entries)
    }

    /// Same as [`from_rows`](Self::from_rows) for a flat row-major buffer of
    /// length `n * n`.
    pub fn from_row_major(n: usize, mut entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        check_finite(&entries)?;

        let scale = entries.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        let tolerance = ASYMMETRY_TOL * scale;
        let mut worst = (0, 0, 0.0_f64);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (entries[i * n + j] - entries[j * n + i]).abs();
                if d > worst.2 {
                    worst = (i, j, d);
                }
            }
        }
        if worst.2 > tolerance {
            return Err(Error::AsymmetryExceeded {
                i: worst.0,
                j: worst.1,
                difference: worst.2,
                tolerance,
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let s = 0.5 * (entries[i * n + j] + entries[j * n + i]);
                entries[i * n + j] = s;
                entries[j * n + i] = s;
            }
        }
        Ok(Self { n, entries })
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_finite(d)?;
        let n = d.len();
        let mut entries = vec![0.0; n * n];
        for (i, di) in d.iter().enumerate() {
            entries[i * n + i] = *di;
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::diagonal(&vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.entries
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(dot_unchecked(&self.entries, &self.entries))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, a| m.max(a.abs()))
    }
}

impl SymmetricOperator for DenseSymmetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot_unchecked(self.row(i), v);
        }
    }
}

/// Wraps a closure `f(v, out)` computing `out = H v` as an operator.
///
/// Symmetry is the caller's responsibility.
pub struct MatrixFree<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> MatrixFree<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> SymmetricOperator for MatrixFree<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        (self.f)(v, out)
    }
}
