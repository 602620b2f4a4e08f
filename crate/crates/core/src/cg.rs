//! Conjugate gradients: the triple recurrence with `theta_k` chosen so that
//! every `delta_k = 1`, rewritten with a search direction.
//!
//! In that normalization `(q_k, y_k, delta_k) = (g_k, x_k, 1)` with
//! `g_k = H x_k + c`, the scale `theta_k` is the exact line-search step along
//! `p_k`, and the tridiagonal coefficients follow from the step scalars:
//! `beta_(k-1) = -(g_k.g_k / g_(k-1).g_(k-1)) / theta_(k-1)` and
//! `alpha_k = 1/theta_k - beta_(k-1)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::lanczos::{IterationTrace, LanczosTriple};
use crate::operator::SymmetricOperator;
use crate::solver::{validate_problem, KrylovConfig, SolveReport, Status, Verdict};
use crate::vector::{axpy_in_place, dot_unchecked, norm2};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CgState {
    pub x: Vec<f64>,
    /// `H x + c`
    pub g: Vec<f64>,
    pub p: Vec<f64>,
    pub g_dot_g: f64,
    pub k: usize,
}

impl CgState {
    /// `x_0 = 0`, `g_0 = c`, `p_0 = -c`.
    pub fn new(c: &[f64]) -> Self {
        Self {
            x: vec![0.0; c.len()],
            g: c.to_vec(),
            p: c.iter().map(|v| -v).collect(),
            g_dot_g: dot_unchecked(c, c),
            k: 0,
        }
    }

    pub fn as_triple(&self) -> LanczosTriple {
        LanczosTriple {
            q: self.g.clone(),
            y: self.x.clone(),
            delta: 1.0,
            k: self.k,
        }
    }
}

/// One CG step; returns the new state and the step length `theta_k`.
pub fn cg_step<O: SymmetricOperator + ?Sized>(op: &O, state: &CgState) -> Result<(CgState, f64)> {
    if state.p.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: state.p.len(),
        });
    }
    let hp = op.apply(&state.p);
    let curvature = dot_unchecked(&state.p, &hp);
    if !(curvature > 0.0) {
        return Err(Error::NonpositiveCurvature {
            step: state.k,
            curvature,
            direction: state.p.clone(),
        });
    }
    let theta = -dot_unchecked(&state.g, &state.p) / curvature;

    let mut x = state.x.clone();
    axpy_in_place(theta, &state.p, &mut x);
    let mut g = state.g.clone();
    axpy_in_place(theta, &hp, &mut g);
    let g_dot_g = dot_unchecked(&g, &g);

    let ratio = g_dot_g / state.g_dot_g;
    let p = g
        .iter()
        .zip(&state.p)
        .map(|(gi, pi)| -gi + ratio * pi)
        .collect();

    Ok((
        CgState {
            x,
            g,
            p,
            g_dot_g,
            k: state.k + 1,
        },
        theta,
    ))
}

/// Conjugate gradients for `H >= 0` with `c` in the range of `H`.
///
/// Stops once `||g_k|| <= q_tol ||c||`. The returned trace holds
/// `alpha_k`, `beta_(k-1)`, `theta_k`, `||g_k||` and the unit deltas.
pub fn solve_cg<O: SymmetricOperator + ?Sized>(
    op: &O,
    c: &[f64],
    cfg: &KrylovConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    validate_problem(op, c)?;
    let max_iter = cfg.max_iter_for(op.dim());
    let c_norm = norm2(c);
    let stop = cfg.q_tol * c_norm;

    let mut state = CgState::new(c);
    let mut trace = IterationTrace {
        qnorms: vec![c_norm],
        deltas: vec![1.0],
        scales: vec![1.0],
        ..IterationTrace::default()
    };
    let mut history = Vec::new();
    if cfg.keep_history {
        history.push(state.as_triple());
    }
    let mut prev: Option<CgState> = None;
    let mut applications = 0;

    while norm2(&state.g) > stop && state.k < max_iter {
        let (next, theta) = cg_step(op, &state)?;
        applications += 1;
        let beta = match trace.thetas.last() {
            Some(theta_prev) => {
                let b = -(state.g_dot_g / prev.as_ref().map_or(1.0, |p| p.g_dot_g)) / theta_prev;
                trace.betas.push(b);
                b
            }
            None => 0.0,
        };
        trace.alphas.push(1.0 / theta - beta);
        trace.thetas.push(theta);
        trace.qnorms.push(norm2(&next.g));
        trace.deltas.push(1.0);
        let xn = norm2(&next.x);
        trace.scales.push(if xn > 0.0 { c_norm / xn } else { 1.0 });
        if cfg.keep_history {
            history.push(next.as_triple());
        }
        prev = Some(core::mem::replace(&mut state, next));
    }

    let converged = norm2(&state.g) <= stop;
    let residual_norm = norm2(&state.g);
    let mut triples_kept: Vec<LanczosTriple> = prev.iter().map(CgState::as_triple).collect();
    triples_kept.push(state.as_triple());
    let report = SolveReport {
        verdict: converged.then_some(Verdict::Compatible),
        status: if converged {
            Status::Converged
        } else {
            Status::MaxIterReached
        },
        r: state.k,
        x: converged.then(|| state.x.clone()),
        certificate_y: None,
        certificate_unit: None,
        delta_r: 1.0,
        residual_norm,
        trace,
        triples_kept,
        history,
        operator_applications: applications,
    };
    if converged {
        Ok(report)
    } else {
        Err(Error::DidNotTerminate(alloc::boxed::Box::new(report)))
    }
}
