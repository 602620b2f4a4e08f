//! Brute-force dense reference computations.
//!
//! Nothing here shares code paths with the recurrences it is used to check:
//! direct solves go through LU, spectral quantities through cyclic Jacobi, and
//! Krylov-subspace quantities through an explicitly orthonormalized basis.

use alloc::vec;
use alloc::vec::Vec;

use crate::lanczos::LanczosTriple;
use crate::operator::{DenseSymmetric, SymmetricOperator};
use crate::vector::{axpy_in_place, dot_unchecked, norm2, scale_in_place};
use crate::{Error, Result};

/// Relative threshold below which an eigenvalue counts as zero.
pub const NULL_TOL: f64 = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius norm is below this times `||H||_F`.
pub const JACOBI_TOL: f64 = 1e-12;
/// Condition estimates above this make [`dense_solve`] fail.
pub const MAX_CONDITION: f64 = 1e12;
/// Residual, relative to the running `||H||` estimate, below which a new
/// Krylov direction counts as dependent.
pub const GRADE_TOL: f64 = 1e-10;

/// Solves `H x = b` by LU with partial pivoting.
///
/// Fails with [`Error::SingularMatrix`] when a pivot vanishes or the 1-norm
/// condition number `||H||_1 ||H^-1||_1` exceeds [`MAX_CONDITION`].
pub fn dense_solve(h: &DenseSymmetric, b: &[f64]) -> Result<Vec<f64>> {
    let n = h.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let lu = Lu::factor(h)?;
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| h.get(i, j).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut inv_norm1 = 0.0_f64;
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = lu.solve(&e);
        inv_norm1 = inv_norm1.max(col.iter().map(|v| v.abs()).sum());
    }
    let condition = norm1 * inv_norm1;
    if !(condition < MAX_CONDITION) {
        return Err(Error::SingularMatrix { condition });
    }
    Ok(lu.solve(b))
}

struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(h: &DenseSymmetric) -> Result<Self> {
        let n = h.n();
        let mut a = h.as_row_major().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot == 0.0 {
                return Err(Error::SingularMatrix {
                    condition: f64::INFINITY,
                });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let akk = a[k * n + k];
            for i in (k + 1)..n {
                let l = a[i * n + k] / akk;
                a[i * n + k] = l;
                for j in (k + 1)..n {
                    a[i * n + j] -= l * a[k * n + j];
                }
            }
        }
        Ok(Self { n, a, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.a[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= self.a[i * n + j] * x[j];
            }
            x[i] /= self.a[i * n + i];
        }
        x
    }
}

/// `H = V diag(eigenvalues) V^T` with eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector of `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    fn is_null(&self, lambda: f64, tol: f64) -> bool {
        lambda.abs() <= tol * self.spectral_radius()
    }
}

/// Cyclic Jacobi eigendecomposition of a dense symmetric matrix.
pub fn eigendecompose(h: &DenseSymmetric) -> EigenDecomposition {
    let n = h.n();
    let mut a = h.as_row_major().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = h.frobenius_norm();
    let off = |a: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        libm::sqrt(s)
    };

    for _sweep in 0..100 {
        if off(&a) <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let cs = 1.0 / libm::sqrt(1.0 + t * t);
                let sn = t * cs;
                // A <- J^T A J with J the (p, q) rotation
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = cs * akp - sn * akq;
                    a[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = cs * apk - sn * aqk;
                    a[q * n + k] = sn * apk + cs * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = cs * vkp - sn * vkq;
                    v[k * n + q] = sn * vkp + cs * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    EigenDecomposition {
        eigenvalues: order.iter().map(|&i| a[i * n + i]).collect(),
        eigenvectors: order
            .iter()
            .map(|&j| (0..n).map(|i| v[i * n + j]).collect())
            .collect(),
    }
}

/// Orthonormal basis `Z` of the null space: eigenvectors with
/// `|lambda| <= tol * max |lambda|`. Empty for nonsingular matrices.
pub fn nullspace_basis(ed: &EigenDecomposition, tol: f64) -> Vec<Vec<f64>> {
    ed.eigenvalues
        .iter()
        .zip(&ed.eigenvectors)
        .filter(|(l, _)| ed.is_null(**l, tol))
        .map(|(_, v)| v.clone())
        .collect()
}

/// `Z Z^T v` for orthonormal columns `z`.
pub fn project_onto(z: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for col in z {
        axpy_in_place(dot_unchecked(col, v), col, &mut out);
    }
    out
}

/// `Z^T v`
pub fn coordinates_in(z: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    z.iter().map(|col| dot_unchecked(col, v)).collect()
}

/// `-H^+ c`, the minimum-norm minimizer of `||Hx + c||`, with [`NULL_TOL`].
pub fn pinv_solve(ed: &EigenDecomposition, c: &[f64]) -> Vec<f64> {
    pinv_solve_with_tol(ed, c, NULL_TOL)
}

pub fn pinv_solve_with_tol(ed: &EigenDecomposition, c: &[f64], tol: f64) -> Vec<f64> {
    let mut x = vec![0.0; c.len()];
    for (l, v) in ed.eigenvalues.iter().zip(&ed.eigenvectors) {
        if !ed.is_null(*l, tol) {
            axpy_in_place(-dot_unchecked(v, c) / l, v, &mut x);
        }
    }
    x
}

/// Number of distinct eigenvalues (clustered at `tol * max |lambda|`) whose
/// eigenspace `c` has a component in larger than `weight_tol * ||c||`.
pub fn count_weighted_eigenvalues(ed: &EigenDecomposition, c: &[f64], tol: f64, weight_tol: f64) -> usize {
    let spread = tol * ed.spectral_radius().max(f64::MIN_POSITIVE);
    let cn = norm2(c);
    let mut count = 0;
    let mut i = 0;
    while i < ed.n() {
        let mut j = i;
        let mut w = 0.0;
        while j < ed.n() && ed.eigenvalues[j] - ed.eigenvalues[i] <= spread {
            let a = dot_unchecked(&ed.eigenvectors[j], c);
            w += a * a;
            j += 1;
        }
        if libm::sqrt(w) > weight_tol * cn {
            count += 1;
        }
        i = j;
    }
    count
}

/// The Krylov sequence `c, Hc, H^2 c, ..., H^r c` and its grade `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrylovBasis {
    /// `H^j c` for `j = 0..=rank`; the last column is the first dependent one.
    pub columns: Vec<Vec<f64>>,
    pub rank: usize,
    /// Orthonormal basis of `K_rank(c, H)`.
    pub orthonormal: Vec<Vec<f64>>,
}

/// Grade of `c` with respect to `H`: the least `r` with `K_(r+1) = K_r`.
///
/// Dependence is decided on an orthonormalized basis (Arnoldi with two
/// Gram-Schmidt passes): the new direction `H u_(m-1)` is dependent when its
/// residual after projection is below [`GRADE_TOL`] times the largest
/// `||H u||` seen so far.
pub fn krylov_grade<O: SymmetricOperator + ?Sized>(op: &O, c: &[f64]) -> Result<KrylovBasis> {
    let n = op.dim();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }
    let cn = norm2(c);
    if cn == 0.0 {
        return Err(Error::ZeroRightHandSide);
    }
    let mut columns = vec![c.to_vec()];
    let mut basis = vec![c.iter().map(|v| v / cn).collect::<Vec<f64>>()];
    // running max of ||Hv|| over unit v, a lower bound on ||H||
    let mut op_norm: f64 = 0.0;
    loop {
        let power = op.apply(columns.last().unwrap());
        let mut w = op.apply(basis.last().unwrap());
        op_norm = op_norm.max(norm2(&w));
        orthogonalize(&basis, &mut w);
        columns.push(power);
        let resid = norm2(&w);
        if resid <= GRADE_TOL * op_norm || basis.len() == n {
            break;
        }
        scale_in_place(1.0 / resid, &mut w);
        basis.push(w);
    }
    Ok(KrylovBasis {
        rank: basis.len(),
        columns,
        orthonormal: basis,
    })
}

fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) {
    for _ in 0..2 {
        for b in basis {
            let h = dot_unchecked(b, w);
            axpy_in_place(-h, b, w);
        }
    }
}

/// Coefficients `z` minimizing `||sum_j z_j columns[j] - b||` (Gram-Schmidt QR,
/// columns assumed independent).
pub fn least_squares(columns: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let m = columns.len();
    let mut qs: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut r = vec![vec![0.0; m]; m];
    for (j, col) in columns.iter().enumerate() {
        let mut w = col.clone();
        for _ in 0..2 {
            for (i, qi) in qs.iter().enumerate() {
                let h = dot_unchecked(qi, &w);
                r[i][j] += h;
                axpy_in_place(-h, qi, &mut w);
            }
        }
        let wn = norm2(&w);
        r[j][j] = wn;
        scale_in_place(1.0 / wn, &mut w);
        qs.push(w);
    }
    let rhs: Vec<f64> = qs.iter().map(|q| dot_unchecked(q, b)).collect();
    let mut z = vec![0.0; m];
    for i in (0..m).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..m {
            s -= r[i][j] * z[j];
        }
        z[i] = s / r[i][i];
    }
    z
}

/// Minimizer of `||Hx + c||` over `K_k(c, H)`, computed on an orthonormal
/// Arnoldi basis. `k` is clamped to the grade.
pub fn krylov_least_squares<O: SymmetricOperator + ?Sized>(op: &O, c: &[f64], k: usize) -> Result<Vec<f64>> {
    let kb = krylov_grade(op, c)?;
    let k = k.min(kb.rank);
    let v = &kb.orthonormal[..k];
    if k == 0 {
        return Ok(vec![0.0; c.len()]);
    }
    let hv: Vec<Vec<f64>> = v.iter().map(|vi| op.apply(vi)).collect();
    let minus_c: Vec<f64> = c.iter().map(|x| -x).collect();
    let z = least_squares(&hv, &minus_c);
    let mut x = vec![0.0; c.len()];
    for (zi, vi) in z.iter().zip(v) {
        axpy_in_place(*zi, vi, &mut x);
    }
    Ok(x)
}

/// Closed-form solution of
/// `min 1/2 sum gamma_i^2 q_i.q_i  s.t.  sum gamma_i delta_i = 1` over triples `0..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub gammas: Vec<f64>,
    /// Lagrange multiplier `lambda = 1 / sum delta_j^2 / q_j.q_j`.
    pub multiplier: f64,
    /// `sum gamma_i y_i`
    pub x: Vec<f64>,
}

pub fn minres_qp(triples: &[LanczosTriple], k: usize) -> Result<QpSolution> {
    let used = triples.get(..=k).ok_or(Error::DimensionMismatch {
        expected: k + 1,
        found: triples.len(),
    })?;
    let mut denom = 0.0;
    for t in used {
        let qq = t.q_sq();
        if !(qq > 0.0) {
            return Err(Error::ZeroQInBasis { index: t.k });
        }
        denom += t.delta * t.delta / qq;
    }
    let multiplier = 1.0 / denom;
    let gammas: Vec<f64> = used.iter().map(|t| multiplier * t.delta / t.q_sq()).collect();
    let mut x = vec![0.0; used[0].y.len()];
    for (g, t) in gammas.iter().zip(used) {
        axpy_in_place(*g, &t.y, &mut x);
    }
    Ok(QpSolution {
        gammas,
        multiplier,
        x,
    })
}
