//! Unnormalized Lanczos triples.
//!
//! Starting from `(q_0, y_0, delta_0) = (c, 0, 1)`, each step forms
//!
//! ```text
//! alpha_k    = q_k.Hq_k / q_k.q_k
//! beta_(k-1) = q_(k-1).Hq_k / q_(k-1).q_(k-1)
//! q_(k+1)     = theta_k (-H q_k + alpha_k q_k     + beta_(k-1) q_(k-1))
//! y_(k+1)     = theta_k (-q_k   + alpha_k y_k     + beta_(k-1) y_(k-1))
//! delta_(k+1) = theta_k (         alpha_k delta_k + beta_(k-1) delta_(k-1))
//! ```
//!
//! (the `beta` terms are absent at `k = 0`), which keeps `q_k = H y_k + delta_k c`
//! and makes the `q_k` mutually orthogonal. `theta_k` is any nonzero scale;
//! [`ScalingStrategy`] picks it.

use alloc::vec;
use alloc::vec::Vec;

use crate::operator::SymmetricOperator;
use crate::vector::{axpy_in_place, check_finite, dot_unchecked, norm2, same_len, scale_in_place};
use crate::{Error, Result};

/// `(q_k, y_k, delta_k)` with `q_k = H y_k + delta_k c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LanczosTriple {
    pub q: Vec<f64>,
    pub y: Vec<f64>,
    pub delta: f64,
    pub k: usize,
}

impl LanczosTriple {
    pub fn q_sq(&self) -> f64 {
        dot_unchecked(&self.q, &self.q)
    }

    pub fn q_norm(&self) -> f64 {
        norm2(&self.q)
    }

    /// Factor taking this triple to the normalization `||y_k|| = ||c||`
    /// (1 for the initial triple, whose `y` is zero). Tolerances on `q` and
    /// `delta` are applied after this rescaling, so they do not depend on
    /// the scaling strategy.
    pub fn reference_scale(&self, c_norm: f64) -> f64 {
        let yn = norm2(&self.y);
        if self.k == 0 || yn == 0.0 {
            1.0
        } else {
            c_norm / yn
        }
    }
}

/// How the free scale `theta_k` of each step is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScalingStrategy {
    /// `theta_k > 0` with `||y_(k+1)|| = ||c||`.
    #[default]
    YNorm,
    /// `theta_k > 0` with `||q_(k+1)|| = ||q_0||`, which makes `T_k` symmetric.
    ///
    /// When the unscaled `q_(k+1)` has collapsed to rounding level relative to
    /// `H q_k` the step is terminal and the `YNorm` rule is used instead, so
    /// that the vanishing vector is not blown back up to `||c||`.
    QNorm,
    /// `theta_k = 1`.
    Unit,
    /// `theta_k` chosen so that `delta_(k+1) = 1` (gradient form). Breaks down when
    /// `alpha_k delta_k + beta_(k-1) delta_(k-1)` vanishes.
    Normalized,
}

/// Scalars produced by one step of the recurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCoefficients {
    pub alpha: f64,
    /// `beta_(k-1)`; `None` on the first step.
    pub beta: Option<f64>,
    pub theta: f64,
}

/// Per-step history of a run.
///
/// After `m` steps `alphas` and `thetas` hold `m` entries, `betas` holds
/// `m - 1` (`beta_0 .. beta_(m-2)`), and `qnorms`/`deltas` hold `m + 1`
/// entries including the initial triple, as does `scales`
/// ([`LanczosTriple::reference_scale`] of each triple).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub qnorms: Vec<f64>,
    pub deltas: Vec<f64>,
    pub scales: Vec<f64>,
}

impl IterationTrace {
    pub(crate) fn starting_at(t0: &LanczosTriple) -> Self {
        Self {
            qnorms: vec![t0.q_norm()],
            deltas: vec![t0.delta],
            scales: vec![1.0],
            ..Self::default()
        }
    }

    /// `delta_k` under the normalization `||y_k|| = ||c||`.
    pub fn reference_delta(&self, k: usize) -> f64 {
        self.deltas[k] * self.scales[k]
    }

    /// `||q_k||` under the normalization `||y_k|| = ||c||`.
    pub fn reference_qnorm(&self, k: usize) -> f64 {
        self.qnorms[k] * self.scales[k]
    }

    pub fn steps(&self) -> usize {
        self.alphas.len()
    }

    pub(crate) fn record(&mut self, coef: &StepCoefficients, t: &LanczosTriple, c_norm: f64) {
        self.alphas.push(coef.alpha);
        if let Some(b) = coef.beta {
            self.betas.push(b);
        }
        self.thetas.push(coef.theta);
        self.qnorms.push(t.q_norm());
        self.deltas.push(t.delta);
        self.scales.push(t.reference_scale(c_norm));
    }
}

/// The tridiagonal `T_k` and its extension `T̄_k` with `H Q_k = Q_(k+1) T̄_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    /// `alpha_0 .. alpha_k`
    pub diag: Vec<f64>,
    /// `beta_0 .. beta_(k-1)`, the entries above the diagonal.
    pub upper: Vec<f64>,
    /// `-1/theta_0 .. -1/theta_(k-1)`, the entries below the diagonal.
    pub lower: Vec<f64>,
    /// `-1/theta_k`, the single nonzero of the extra row of `T̄_k`.
    pub extended_row: f64,
}

impl Tridiagonal {
    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Square `T_k` as rows.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let m = self.order();
        let mut t = vec![vec![0.0; m]; m];
        for i in 0..m {
            t[i][i] = self.diag[i];
            if i + 1 < m {
                t[i][i + 1] = self.upper[i];
                t[i + 1][i] = self.lower[i];
            }
        }
        t
    }

    /// `T̄_k` as `(k+2) x (k+1)` rows.
    pub fn to_dense_extended(&self) -> Vec<Vec<f64>> {
        let m = self.order();
        let mut t = self.to_dense();
        let mut last = vec![0.0; m];
        last[m - 1] = self.extended_row;
        t.push(last);
        t
    }
}

/// Assembles `T_k` from a trace of `k + 1` steps.
pub fn extract_tridiagonal(trace: &IterationTrace) -> Result<Tridiagonal> {
    let m = trace.steps();
    if m == 0 {
        return Err(Error::EmptyTrace);
    }
    Ok(Tridiagonal {
        diag: trace.alphas.clone(),
        upper: trace.betas[..m - 1].to_vec(),
        lower: trace.thetas[..m - 1].iter().map(|t| -1.0 / t).collect(),
        extended_row: -1.0 / trace.thetas[m - 1],
    })
}

pub fn initial_triple(c: &[f64]) -> Result<LanczosTriple> {
    if c.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_finite(c)?;
    if c.iter().all(|ci| *ci == 0.0) {
        return Err(Error::ZeroRightHandSide);
    }
    Ok(LanczosTriple {
        q: c.to_vec(),
        y: vec![0.0; c.len()],
        delta: 1.0,
        k: 0,
    })
}

/// One step of the recurrence from `prev = (q_k, y_k, delta_k)`.
///
/// `prev2` must be the triple of step `k - 1` when `k >= 1` and `None` at
/// `k = 0`. No reorthogonalization is performed; see [`LanczosProcess`].
pub fn next_triple<O: SymmetricOperator + ?Sized>(
    op: &O,
    c: &[f64],
    prev: &LanczosTriple,
    prev2: Option<&LanczosTriple>,
    strategy: ScalingStrategy,
) -> Result<(LanczosTriple, StepCoefficients)> {
    let n = op.dim();
    for v in [c, &prev.q, &prev.y] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    match (prev.k, prev2) {
        (0, None) => {}
        (k, Some(p)) if k >= 1 && p.k + 1 == k => same_len(&p.q, c)?,
        (k, _) => return Err(Error::InconsistentTriples { k }),
    }
    let mut hq = vec![0.0; n];
    op.apply_into(&prev.q, &mut hq);
    let (mut raw, alpha, beta) = unscaled_step(&hq, prev, prev2)?;
    let theta = choose_theta(strategy, &raw, &hq, norm2(c), prev, prev2, alpha, beta)?;
    raw.scale(theta);
    Ok((
        raw.into_triple(prev.k + 1),
        StepCoefficients { alpha, beta, theta },
    ))
}

struct RawTriple {
    q: Vec<f64>,
    y: Vec<f64>,
    delta: f64,
}

impl RawTriple {
    fn scale(&mut self, theta: f64) {
        scale_in_place(theta, &mut self.q);
        scale_in_place(theta, &mut self.y);
        self.delta *= theta;
    }

    /// Removes the component along `t.q` from `q`, and the matching
    /// combination from `y` and `delta` so that `q = H y + delta c` still holds.
    fn project_out(&mut self, t: &LanczosTriple) {
        let qq = t.q_sq();
        if qq == 0.0 {
            return;
        }
        let mu = dot_unchecked(&self.q, &t.q) / qq;
        axpy_in_place(-mu, &t.q, &mut self.q);
        axpy_in_place(-mu, &t.y, &mut self.y);
        self.delta -= mu * t.delta;
    }

    fn into_triple(self, k: usize) -> LanczosTriple {
        LanczosTriple {
            q: self.q,
            y: self.y,
            delta: self.delta,
            k,
        }
    }
}

fn unscaled_step(
    hq: &[f64],
    prev: &LanczosTriple,
    prev2: Option<&LanczosTriple>,
) -> Result<(RawTriple, f64, Option<f64>)> {
    let qq = prev.q_sq();
    if !(qq > 0.0) {
        return Err(Error::ZeroQ { step: prev.k });
    }
    let alpha = dot_unchecked(&prev.q, hq) / qq;

    let mut q: Vec<f64> = hq.iter().map(|v| -v).collect();
    axpy_in_place(alpha, &prev.q, &mut q);
    let mut y: Vec<f64> = prev.q.iter().map(|v| -v).collect();
    axpy_in_place(alpha, &prev.y, &mut y);
    let mut delta = alpha * prev.delta;

    let beta = match prev2 {
        Some(p2) => {
            let qq2 = p2.q_sq();
            if !(qq2 > 0.0) {
                return Err(Error::ZeroQ { step: p2.k });
            }
            let beta = dot_unchecked(&p2.q, hq) / qq2;
            axpy_in_place(beta, &p2.q, &mut q);
            axpy_in_place(beta, &p2.y, &mut y);
            delta += beta * p2.delta;
            Some(beta)
        }
        None => None,
    };
    Ok((RawTriple { q, y, delta }, alpha, beta))
}

#[allow(clippy::too_many_arguments)]
fn choose_theta(
    strategy: ScalingStrategy,
    raw: &RawTriple,
    hq: &[f64],
    c_norm: f64,
    prev: &LanczosTriple,
    prev2: Option<&LanczosTriple>,
    alpha: f64,
    beta: Option<f64>,
) -> Result<f64> {
    let step = prev.k + 1;
    let y_rule = || {
        let yn = norm2(&raw.y);
        if yn == 0.0 {
            Err(Error::ZeroYScaling { step })
        } else {
            Ok(c_norm / yn)
        }
    };
    let theta = match strategy {
        ScalingStrategy::YNorm => y_rule()?,
        ScalingStrategy::Unit => 1.0,
        ScalingStrategy::QNorm => {
            let qn = norm2(&raw.q);
            if qn <= libm::sqrt(f64::EPSILON) * norm2(hq) {
                y_rule()?
            } else {
                c_norm / qn
            }
        }
        ScalingStrategy::Normalized => {
            let a = alpha * prev.delta;
            let b = match (beta, prev2) {
                (Some(beta), Some(p2)) => beta * p2.delta,
                _ => 0.0,
            };
            let denom = raw.delta;
            if denom == 0.0 || denom.abs() <= f64::EPSILON * (a.abs() + b.abs()) {
                return Err(Error::NormalizationBreakdown { step: prev.k });
            }
            1.0 / denom
        }
    };
    if theta == 0.0 || !theta.is_finite() {
        return Err(Error::InvalidTheta { step: prev.k });
    }
    Ok(theta)
}

/// Relative residual `||q - (H y + delta c)|| / (1 + ||q||)` of the defining identity.
pub fn verify_triple_identity<O: SymmetricOperator + ?Sized>(
    op: &O,
    c: &[f64],
    t: &LanczosTriple,
) -> Result<f64> {
    let n = op.dim();
    for v in [c, &t.q, &t.y] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    let mut r = op.apply(&t.y);
    axpy_in_place(t.delta, c, &mut r);
    for (ri, qi) in r.iter_mut().zip(&t.q) {
        *ri = qi - *ri;
    }
    Ok(norm2(&r) / (1.0 + t.q_norm()))
}

/// `|q_(k+1).q_(k+1) + theta_k q_(k+1).H q_k| / (1 + q_(k+1).q_(k+1))`.
pub fn check_qq_identity<O: SymmetricOperator + ?Sized>(
    t_next: &LanczosTriple,
    t: &LanczosTriple,
    op: &O,
    theta: f64,
) -> Result<f64> {
    same_len(&t_next.q, &t.q)?;
    if t.q.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: t.q.len(),
        });
    }
    let hq = op.apply(&t.q);
    let qq = t_next.q_sq();
    Ok((qq + theta * dot_unchecked(&t_next.q, &hq)).abs() / (1.0 + qq))
}

/// Stateful driver of the recurrence over one right-hand side.
///
/// Holds the two most recent triples, the [`IterationTrace`], and optionally
/// every triple generated so far. With reorthogonalization enabled each new
/// unscaled triple is projected (twice) against all stored `q_j` before it is
/// scaled; the same combination is applied to `y` and `delta` so the defining
/// identity is preserved.
pub struct LanczosProcess<'a, O: SymmetricOperator + ?Sized> {
    op: &'a O,
    c: &'a [f64],
    c_norm: f64,
    strategy: ScalingStrategy,
    reorthogonalize: bool,
    keep_history: bool,
    prev: Option<LanczosTriple>,
    current: LanczosTriple,
    history: Vec<LanczosTriple>,
    trace: IterationTrace,
    hq: Vec<f64>,
    applications: usize,
}

impl<'a, O: SymmetricOperator + ?Sized> LanczosProcess<'a, O> {
    pub fn new(op: &'a O, c: &'a [f64], strategy: ScalingStrategy) -> Result<Self> {
        if c.len() != op.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                found: c.len(),
            });
        }
        let t0 = initial_triple(c)?;
        Ok(Self {
            op,
            c,
            c_norm: norm2(c),
            strategy,
            reorthogonalize: false,
            keep_history: false,
            prev: None,
            trace: IterationTrace::starting_at(&t0),
            current: t0,
            history: Vec::new(),
            hq: vec![0.0; c.len()],
            applications: 0,
        })
    }

    pub fn with_reorthogonalization(mut self, on: bool) -> Self {
        self.reorthogonalize = on;
        self.sync_history();
        self
    }

    /// Retain every triple, readable through [`history`](Self::history).
    pub fn with_history(mut self, on: bool) -> Self {
        self.keep_history = on;
        self.sync_history();
        self
    }

    fn sync_history(&mut self) {
        if (self.keep_history || self.reorthogonalize) && self.history.is_empty() {
            if let Some(p) = &self.prev {
                self.history.push(p.clone());
            }
            self.history.push(self.current.clone());
        }
    }

    /// Advances from step `k` to `k + 1`.
    pub fn step(&mut self) -> Result<StepCoefficients> {
        self.op.apply_into(&self.current.q, &mut self.hq);
        self.applications += 1;
        let prev2 = self.prev.as_ref();
        let (mut raw, alpha, beta) = unscaled_step(&self.hq, &self.current, prev2)?;
        if self.reorthogonalize {
            for _ in 0..2 {
                for t in &self.history {
                    raw.project_out(t);
                }
            }
        }
        let theta = choose_theta(
            self.strategy,
            &raw,
            &self.hq,
            self.c_norm,
            &self.current,
            prev2,
            alpha,
            beta,
        )?;
        raw.scale(theta);
        let next = raw.into_triple(self.current.k + 1);
        let coef = StepCoefficients { alpha, beta, theta };
        self.trace.record(&coef, &next, self.c_norm);
        if self.keep_history || self.reorthogonalize {
            self.history.push(next.clone());
        }
        self.prev = Some(core::mem::replace(&mut self.current, next));
        Ok(coef)
    }

    pub fn current(&self) -> &LanczosTriple {
        &self.current
    }

    /// [`LanczosTriple::reference_scale`] of the current triple.
    pub fn reference_scale(&self) -> f64 {
        self.current.reference_scale(self.c_norm)
    }

    pub fn previous(&self) -> Option<&LanczosTriple> {
        self.prev.as_ref()
    }

    pub fn trace(&self) -> &IterationTrace {
        &self.trace
    }

    /// All triples `0..=k` when history is kept, empty otherwise.
    pub fn history(&self) -> &[LanczosTriple] {
        &self.history
    }

    pub fn k(&self) -> usize {
        self.current.k
    }

    pub fn c(&self) -> &[f64] {
        self.c
    }

    pub fn c_norm(&self) -> f64 {
        self.c_norm
    }

    pub fn operator(&self) -> &O {
        self.op
    }

    pub fn strategy(&self) -> ScalingStrategy {
        self.strategy
    }

    /// Operator applications performed by the recurrence.
    pub fn applications(&self) -> usize {
        self.applications
    }

    pub(crate) fn into_parts(self) -> ProcessParts {
        let mut last_two = Vec::with_capacity(2);
        if let Some(p) = self.prev {
            last_two.push(p);
        }
        last_two.push(self.current);
        let history = if self.keep_history {
            self.history
        } else {
            Vec::new()
        };
        ProcessParts {
            trace: self.trace,
            last_two,
            history,
        }
    }
}

pub(crate) struct ProcessParts {
    pub trace: IterationTrace,
    pub last_two: Vec<LanczosTriple>,
    pub history: Vec<LanczosTriple>,
}
