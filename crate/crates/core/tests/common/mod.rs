//! Seeded random problem generators shared by the integration suites.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ukrylov_core::oracle::{self, EigenDecomposition};
use ukrylov_core::lanczos::{extract_tridiagonal, IterationTrace, LanczosProcess, ScalingStrategy};
use ukrylov_core::minres::{minres_init, minres_update};
use ukrylov_core::{DenseSymmetric, LanczosTriple};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// Columns of a random orthogonal matrix (Gram-Schmidt on Gaussian columns).
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut w = gaussian_vec(rng, n);
        for _ in 0..2 {
            for q in &cols {
                let h: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= h * qi;
                }
            }
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(w.into_iter().map(|v| v / norm).collect());
        }
    }
    cols
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> DenseSymmetric {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = gaussian(rng);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    DenseSymmetric::from_rows(&a).unwrap()
}

/// `V diag(eigs) V^T` for orthogonal columns `v`.
pub fn from_spectrum(eigs: &[f64], v: &[Vec<f64>]) -> DenseSymmetric {
    let n = eigs.len();
    let mut a = vec![vec![0.0; n]; n];
    for (l, col) in eigs.iter().zip(v) {
        for i in 0..n {
            for j in 0..n {
                a[i][j] += l * col[i] * col[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = s;
            a[j][i] = s;
        }
    }
    DenseSymmetric::from_rows(&a).unwrap()
}

/// Combination `sum_i w_i v_i` of the columns.
pub fn combine(w: &[f64], v: &[Vec<f64>]) -> Vec<f64> {
    let n = v[0].len();
    let mut out = vec![0.0; n];
    for (wi, col) in w.iter().zip(v) {
        for (o, c) in out.iter_mut().zip(col) {
            *o += wi * c;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Indefinite, eigenvalues of magnitude in [0.5, 5].
    Nonsingular,
    /// Eigenvalues in [0.5, 10].
    PositiveDefinite,
    /// Indefinite with a null space; `c` in the range.
    SingularCompatible,
    /// Indefinite with a null space; `c` has a null-space component.
    SingularIncompatible,
    /// Positive semidefinite with a null space; `c` in the range.
    SemidefiniteCompatible,
    /// Positive semidefinite; `c` has a null-space component.
    SemidefiniteIncompatible,
    /// Spectrum symmetric about zero with matching weights, so every odd
    /// `delta_k` vanishes. Compatible.
    Paired,
    /// As `Paired`, with a weighted zero eigenvalue. Incompatible.
    PairedIncompatible,
}

pub const ALL_FAMILIES: [Family; 8] = [
    Family::Nonsingular,
    Family::PositiveDefinite,
    Family::SingularCompatible,
    Family::SingularIncompatible,
    Family::SemidefiniteCompatible,
    Family::SemidefiniteIncompatible,
    Family::Paired,
    Family::PairedIncompatible,
];

#[derive(Debug, Clone)]
pub struct Instance {
    pub family: Family,
    pub h: DenseSymmetric,
    pub c: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// Whether `c` lies in the range of `H` by construction.
    pub compatible: bool,
    pub semidefinite: bool,
}

impl Instance {
    pub fn eig(&self) -> EigenDecomposition {
        oracle::eigendecompose(&self.h)
    }
}

fn sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// Random sign times a magnitude in [0.5, 1.5].
pub fn weight(rng: &mut ChaCha8Rng) -> f64 {
    sign(rng) * rng.gen_range(0.5..1.5)
}

/// `count` distinct values on a jittered grid over `[lo, hi]`, or over
/// `[-hi, -lo] U [lo, hi]` when `signed`, in random order.
pub fn grid_spectrum(rng: &mut ChaCha8Rng, count: usize, lo: f64, hi: f64, signed: bool) -> Vec<f64> {
    let width = hi - lo;
    let total = if signed { 2.0 * width } else { width };
    let step = total / count as f64;
    let mut vals: Vec<f64> = (0..count)
        .map(|i| {
            let t = (i as f64 + 0.5 + rng.gen_range(-0.25..0.25)) * step;
            if signed && t >= width {
                lo + (t - width)
            } else if signed {
                -(lo + (width - t))
            } else {
                lo + t
            }
        })
        .collect();
    for i in (1..vals.len()).rev() {
        let j = rng.gen_range(0..=i);
        vals.swap(i, j);
    }
    vals
}

/// Builds one instance of `family` of dimension `n >= 2`.
///
/// Spectra sit on jittered grids (no clusters) and every weighted eigenvector
/// carries a component of magnitude in [0.5, 1.5], which keeps the
/// unreorthogonalized recurrence orthogonal to about 1e-10 up to `n = 30`.
/// Singular compatible right-hand sides are `c = H z`; incompatible ones add
/// a null-space component of the same size.
pub fn instance(rng: &mut ChaCha8Rng, family: Family, n: usize) -> Instance {
    use Family::*;
    let paired = matches!(family, Paired | PairedIncompatible);
    let n = n.max(if paired { 3 } else { 2 });
    let v = random_orthogonal(rng, n);
    let nulls = rng.gen_range(1..=(n - 1).min(3));
    let psd = matches!(family, PositiveDefinite | SemidefiniteCompatible | SemidefiniteIncompatible);
    let compatible = !matches!(
        family,
        SingularIncompatible | SemidefiniteIncompatible | PairedIncompatible
    );

    let mut eigs = vec![0.0; n];
    let mut w: Vec<f64> = (0..n).map(|_| weight(rng)).collect();
    match family {
        Nonsingular => eigs = grid_spectrum(rng, n, 0.5, 5.0, true),
        PositiveDefinite => eigs = grid_spectrum(rng, n, 0.5, 10.0, false),
        SingularCompatible | SingularIncompatible | SemidefiniteCompatible | SemidefiniteIncompatible => {
            let rest = grid_spectrum(rng, n - nulls, 0.5, 5.0, !psd);
            eigs[nulls..].copy_from_slice(&rest);
        }
        Paired | PairedIncompatible => {
            let pairs = (n - 1) / 2;
            let mags = grid_spectrum(rng, pairs, 0.5, 5.0, false);
            for (p, l) in mags.iter().enumerate() {
                eigs[2 * p] = *l;
                eigs[2 * p + 1] = -l;
                w[2 * p + 1] = w[2 * p];
            }
            for wi in w.iter_mut().skip(2 * pairs) {
                *wi = 0.0;
            }
            if !compatible {
                w[n - 1] = weight(rng);
            }
        }
    }
    let h = from_spectrum(&eigs, &v);
    let c = match family {
        SingularCompatible | SingularIncompatible | SemidefiniteCompatible | SemidefiniteIncompatible => {
            let zw: Vec<f64> = (0..n)
                .map(|i| if i < nulls { 0.0 } else { w[i] / eigs[i] })
                .collect();
            let z = combine(&zw, &v);
            let mut c = ukrylov_core::SymmetricOperator::apply(&h, &z);
            if !compatible {
                let null_part = combine(&w[..nulls], &v[..nulls]);
                for (ci, ni) in c.iter_mut().zip(&null_part) {
                    *ci += ni;
                }
            }
            c
        }
        _ => combine(&w, &v),
    };
    Instance {
        family,
        h,
        c,
        eigenvalues: eigs,
        compatible,
        semidefinite: psd,
    }
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn sub(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

/// `||u - v|| / max(||v||, floor)`
pub fn rel_diff(u: &[f64], v: &[f64], floor: f64) -> f64 {
    norm(&sub(u, v)) / norm(v).max(floor)
}

pub fn residual(h: &DenseSymmetric, x: &[f64], c: &[f64]) -> Vec<f64> {
    let mut r = ukrylov_core::SymmetricOperator::apply(h, x);
    for (ri, ci) in r.iter_mut().zip(c) {
        *ri += ci;
    }
    r
}

/// Largest `|q_i.q_j| / (||q_i|| ||q_j||)` over distinct pairs among the
/// first `m` vectors.
pub fn worst_orthogonality(triples: &[LanczosTriple], m: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.min(triples.len()) {
        for j in 0..i {
            let d = dot(&triples[i].q, &triples[j].q).abs();
            worst = worst.max(d / (triples[i].q_norm() * triples[j].q_norm()));
        }
    }
    worst
}

/// `||H Q_m - Q_(m+1) T̄_m||_F / (||H||_F ||Q_m||_F)` for the first `m` steps.
pub fn factorization_residual(h: &DenseSymmetric, trace: &IterationTrace, triples: &[LanczosTriple]) -> f64 {
    let t = extract_tridiagonal(trace).unwrap();
    let tbar = t.to_dense_extended();
    let m = t.order();
    let n = h.n();
    let mut err2 = 0.0;
    let mut q2 = 0.0;
    for j in 0..m {
        let mut col = ukrylov_core::SymmetricOperator::apply(h, &triples[j].q);
        for (i, row) in tbar.iter().enumerate() {
            let coef = row[j];
            if coef != 0.0 {
                for l in 0..n {
                    col[l] -= coef * triples[i].q[l];
                }
            }
        }
        err2 += dot(&col, &col);
        q2 += triples[j].q_sq();
    }
    err2.sqrt() / (h.frobenius_norm() * q2.sqrt()).max(f64::MIN_POSITIVE)
}

/// `|w.Hw - theta_k (delta_(k+1)/delta_k) q_k.q_k|` with
/// `w = y_(k+1) - (delta_(k+1)/delta_k) y_k`, relative to
/// `||H|| ||w|| (||y_(k+1)|| + |delta_(k+1)/delta_k| ||y_k||) + |rhs|`, the
/// size of the rounding carried by `w` when it is a near cancellation.
pub fn curvature_identity(h: &DenseSymmetric, t: &LanczosTriple, next: &LanczosTriple, theta: f64) -> f64 {
    let ratio = next.delta / t.delta;
    let w: Vec<f64> = next.y.iter().zip(&t.y).map(|(a, b)| a - ratio * b).collect();
    let hw = ukrylov_core::SymmetricOperator::apply(h, &w);
    let rhs = theta * ratio * t.q_sq();
    let spread = norm(&next.y) + ratio.abs() * norm(&t.y);
    let scale = h.frobenius_norm() * norm(&w) * spread.max(norm(&w)) + rhs.abs();
    (dot(&w, &hw) - rhs).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Same residual as [`curvature_identity`], measured against `||H|| ||w||^2`
/// as if `w` carried no cancellation error.
pub fn curvature_identity_tight(h: &DenseSymmetric, t: &LanczosTriple, next: &LanczosTriple, theta: f64) -> f64 {
    let ratio = next.delta / t.delta;
    let w: Vec<f64> = next.y.iter().zip(&t.y).map(|(a, b)| a - ratio * b).collect();
    let hw = ukrylov_core::SymmetricOperator::apply(h, &w);
    let rhs = theta * ratio * t.q_sq();
    let scale = h.frobenius_norm() * dot(&w, &w) + rhs.abs();
    (dot(&w, &hw) - rhs).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Largest relative deviation of `a` from `s * b`, with `s` fitted by least
/// squares over every entry of `(q, y, delta)`.
pub fn ratio_mismatch(a: &LanczosTriple, b: &LanczosTriple) -> f64 {
    let flat = |t: &LanczosTriple| {
        let mut v = t.q.clone();
        v.extend_from_slice(&t.y);
        v.push(t.delta);
        v
    };
    let (fa, fb) = (flat(a), flat(b));
    let s = dot(&fa, &fb) / dot(&fb, &fb);
    let scaled: Vec<f64> = fb.iter().map(|v| s * v).collect();
    rel_diff(&fa, &scaled, f64::MIN_POSITIVE)
}

/// `x_0^MR .. x_(r-1)^MR` from `r - 1` steps of the recurrence under `strategy`.
pub fn minres_iterates(h: &DenseSymmetric, c: &[f64], strategy: ScalingStrategy, r: usize) -> Vec<Vec<f64>> {
    let mut p = LanczosProcess::new(h, c, strategy).unwrap();
    let mut acc = minres_init(c, p.current());
    let mut out = vec![acc.x_mr.clone()];
    for _ in 1..r {
        let q_prev_sq = p.current().q_sq();
        p.step().unwrap();
        acc = minres_update(acc, p.current(), q_prev_sq, h, c).unwrap();
        out.push(acc.x_mr.clone());
    }
    out
}
