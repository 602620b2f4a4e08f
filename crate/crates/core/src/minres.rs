//! Minimum-residual iterates from the same triples.
//!
//! `x_k^MR` minimizes `||Hx + c||` over `K_k(c, H)`. With
//! `rho = q_(k+1).q_(k+1) / q_k.q_k` the iterate is carried as a ratio
//!
//! ```text
//! y^MR_(k+1)     = rho y^MR_k     + delta_(k+1) y_(k+1)
//! delta^MR_(k+1) = rho delta^MR_k + delta_(k+1)^2
//! x^MR_(k+1)     = y^MR_(k+1) / delta^MR_(k+1)
//! ```
//!
//! starting from `y^MR_0 = delta_0 y_0 = 0`, `delta^MR_0 = delta_0^2 = 1`. If the
//! system turns out incompatible (`delta_r = 0`) the last iterate is shifted
//! along the certificate `y_r` to remove its null-space component, which gives
//! the least-squares solution of minimum norm.

use alloc::vec::Vec;

use crate::lanczos::LanczosTriple;
use crate::operator::SymmetricOperator;
use crate::solver::{drive, KrylovConfig, SolveReport, Verdict};
use crate::vector::{axpy_in_place, dot_unchecked, norm2, same_len, scale_in_place, scaled};
use crate::{Error, Result};

const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_BELOW: f64 = 1e-150;
// 2^-512 and 2^512
const SHRINK: f64 = 7.458340731200207e-155;
const GROW: f64 = 1.3407807929942597e154;

#[derive(Debug, Clone, PartialEq)]
pub struct MinresAccumulator {
    pub y_mr: Vec<f64>,
    pub delta_mr: f64,
    pub x_mr: Vec<f64>,
    /// `H x_mr + c`
    pub g_mr: Vec<f64>,
    /// `||g_k^MR||` for every absorbed step, starting with `||c||`.
    pub residual_history: Vec<f64>,
}

/// State at `k = 0`: the minimizer over `K_0 = {0}` is the origin.
pub fn minres_init(c: &[f64], t0: &LanczosTriple) -> MinresAccumulator {
    let y_mr = scaled(t0.delta, &t0.y);
    let delta_mr = t0.delta * t0.delta;
    MinresAccumulator {
        x_mr: scaled(1.0 / delta_mr, &y_mr),
        y_mr,
        delta_mr,
        g_mr: c.to_vec(),
        residual_history: alloc::vec![norm2(c)],
    }
}

/// Absorbs triple `k + 1`; `q_prev_sq` is `q_k . q_k`.
///
/// The iterate and residual are refreshed whenever `delta^MR_(k+1) > 0`, which
/// holds for every step before termination; otherwise they are left unchanged
/// and only the ratio state advances.
pub fn minres_update<O: SymmetricOperator + ?Sized>(
    mut acc: MinresAccumulator,
    t_new: &LanczosTriple,
    q_prev_sq: f64,
    op: &O,
    c: &[f64],
) -> Result<MinresAccumulator> {
    if !(q_prev_sq > 0.0) {
        return Err(Error::NonpositiveDenominator(q_prev_sq));
    }
    same_len(&acc.y_mr, &t_new.y)?;
    same_len(&acc.y_mr, c)?;
    let rho = t_new.q_sq() / q_prev_sq;
    scale_in_place(rho, &mut acc.y_mr);
    axpy_in_place(t_new.delta, &t_new.y, &mut acc.y_mr);
    acc.delta_mr = rho * acc.delta_mr + t_new.delta * t_new.delta;

    if acc.delta_mr > RESCALE_ABOVE {
        scale_in_place(SHRINK, &mut acc.y_mr);
        acc.delta_mr *= SHRINK;
    } else if acc.delta_mr > 0.0 && acc.delta_mr < RESCALE_BELOW {
        scale_in_place(GROW, &mut acc.y_mr);
        acc.delta_mr *= GROW;
    }

    if acc.delta_mr > 0.0 {
        acc.x_mr = scaled(1.0 / acc.delta_mr, &acc.y_mr);
        acc.g_mr = residual(op, &acc.x_mr, c);
        acc.residual_history.push(norm2(&acc.g_mr));
    }
    Ok(acc)
}

/// Minimum-norm least-squares solution from `x_(r-1)^MR` and the certificate `y_r`:
/// `x_r^MR = x_(r-1)^MR + gamma y_r` with `gamma = -(y_r . x_(r-1)^MR) / (y_r . y_r)`.
pub fn minres_finalize_incompatible(acc: &MinresAccumulator, y_r: &[f64]) -> Result<Vec<f64>> {
    same_len(&acc.x_mr, y_r)?;
    let yy = dot_unchecked(y_r, y_r);
    let yn = libm::sqrt(yy);
    if !(yn > 0.0) || yn <= f64::EPSILON * norm2(&acc.x_mr) {
        return Err(Error::ZeroCertificate);
    }
    let gamma = -dot_unchecked(y_r, &acc.x_mr) / yy;
    let mut x = acc.x_mr.clone();
    axpy_in_place(gamma, y_r, &mut x);
    Ok(x)
}

fn residual<O: SymmetricOperator + ?Sized>(op: &O, x: &[f64], c: &[f64]) -> Vec<f64> {
    let mut g = op.apply(x);
    axpy_in_place(1.0, c, &mut g);
    g
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinresReport {
    pub krylov: SolveReport,
    /// Final minimum-residual iterate; of minimum norm when incompatible.
    pub x_mr: Vec<f64>,
    pub g_mr: Vec<f64>,
    pub residual_history: Vec<f64>,
    /// `x_0^MR, x_1^MR, ...` when history was requested.
    pub iterates: Vec<Vec<f64>>,
    /// `||x_mr - x_r||` on compatible runs.
    pub x_discrepancy: Option<f64>,
}

impl MinresReport {
    pub fn residual_norm(&self) -> f64 {
        norm2(&self.g_mr)
    }
}

/// Runs the Krylov solver and the minimum-residual accumulator side by side.
pub fn solve_minres<O: SymmetricOperator + ?Sized>(
    op: &O,
    c: &[f64],
    cfg: &KrylovConfig,
) -> Result<MinresReport> {
    let mut acc: Option<MinresAccumulator> = None;
    let mut iterates = Vec::new();
    let mut extra_applications = 0;

    let mut report = drive(op, c, cfg, |process, terminal| {
        let prev = process.previous().expect("called after a step");
        let state = match acc.take() {
            Some(a) => a,
            None => {
                let a = minres_init(c, prev);
                if cfg.keep_history {
                    iterates.push(a.x_mr.clone());
                }
                a
            }
        };
        let t = process.current();
        let next = if terminal && (t.delta * process.reference_scale()).abs() <= cfg.delta_tol {
            state
        } else {
            extra_applications += 1;
            let a = minres_update(state, t, prev.q_sq(), op, c)?;
            if cfg.keep_history {
                iterates.push(a.x_mr.clone());
            }
            a
        };
        acc = Some(next);
        Ok(())
    })?;

    let mut acc = acc.expect("at least one step is always taken");
    let mut x_discrepancy = None;
    match report.verdict {
        Some(Verdict::Incompatible) => {
            let y_r = report.certificate_y.as_deref().expect("incompatible carries y_r");
            acc.x_mr = minres_finalize_incompatible(&acc, y_r)?;
            acc.g_mr = residual(op, &acc.x_mr, c);
            extra_applications += 1;
            acc.residual_history.push(norm2(&acc.g_mr));
            if cfg.keep_history {
                iterates.push(acc.x_mr.clone());
            }
        }
        Some(Verdict::Compatible) => {
            let x = report.x.as_deref().expect("compatible carries x_r");
            let d: Vec<f64> = x.iter().zip(&acc.x_mr).map(|(a, b)| a - b).collect();
            x_discrepancy = Some(norm2(&d));
        }
        None => {}
    }
    report.operator_applications += extra_applications;
    Ok(MinresReport {
        krylov: report,
        x_mr: acc.x_mr,
        g_mr: acc.g_mr,
        residual_history: acc.residual_history,
        iterates,
        x_discrepancy,
    })
}
