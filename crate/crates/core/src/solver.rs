//! The unnormalized Krylov solver: run the triple recurrence until `q_r`
//! vanishes, then read compatibility off `delta_r`.
//!
//! * `delta_r != 0`: `x_r = y_r / delta_r` solves `Hx + c = 0`.
//! * `delta_r == 0`: `H y_r = 0` and `y_r . c != 0`, so `c` is not in the range
//!   of `H` and `y_r` certifies that no solution exists.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::lanczos::{IterationTrace, LanczosProcess, LanczosTriple, ScalingStrategy};
use crate::operator::SymmetricOperator;
use crate::vector::{axpy_in_place, check_finite, norm2, scaled};
use crate::{Error, Result};

/// `sqrt(machine epsilon)`, the default for both tolerances.
pub const SQRT_EPS: f64 = 1.4901161193847656e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovConfig {
    /// Iterate while `||q_k|| > q_tol`. Both tolerances apply to the triple
    /// rescaled so that `||y_k|| = ||c||`, whatever the strategy.
    pub q_tol: f64,
    /// `|delta_r| <= delta_tol` means incompatible.
    pub delta_tol: f64,
    /// Cap on the number of steps; `None` means `n + 2`.
    pub max_iter: Option<usize>,
    pub strategy: ScalingStrategy,
    pub reorthogonalize: bool,
    /// Keep every triple (and, for MINRES, every iterate) in the report.
    pub keep_history: bool,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self {
            q_tol: SQRT_EPS,
            delta_tol: SQRT_EPS,
            max_iter: None,
            strategy: ScalingStrategy::YNorm,
            reorthogonalize: false,
            keep_history: false,
        }
    }
}

impl KrylovConfig {
    pub fn max_iter_for(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(n + 2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_tol > 0.0 && self.q_tol.is_finite()) {
            return Err(Error::InvalidConfig("q_tol must be positive"));
        }
        if !(self.delta_tol > 0.0 && self.delta_tol.is_finite()) {
            return Err(Error::InvalidConfig("delta_tol must be positive"));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidConfig("max_iter must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Compatible,
    Incompatible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// `None` only when the iteration cap was hit before `q` vanished.
    pub verdict: Option<Verdict>,
    pub status: Status,
    /// Termination index (number of steps taken).
    pub r: usize,
    pub x: Option<Vec<f64>>,
    /// `y_r`, present when incompatible.
    pub certificate_y: Option<Vec<f64>>,
    /// `y_r / ||y_r||`.
    pub certificate_unit: Option<Vec<f64>>,
    pub delta_r: f64,
    /// `||Hx + c||` when compatible, `||H y_r||` when incompatible, `||q_k||`
    /// when the cap was hit.
    pub residual_norm: f64,
    pub trace: IterationTrace,
    /// The last two triples, oldest first.
    pub triples_kept: Vec<LanczosTriple>,
    /// Every triple when [`KrylovConfig::keep_history`] is set.
    pub history: Vec<LanczosTriple>,
    pub operator_applications: usize,
}

impl SolveReport {
    pub fn last_triple(&self) -> &LanczosTriple {
        self.triples_kept.last().expect("a report always keeps a triple")
    }
}

pub(crate) fn validate_problem<O: SymmetricOperator + ?Sized>(op: &O, c: &[f64]) -> Result<()> {
    if c.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: c.len(),
        });
    }
    check_finite(c)?;
    if c.iter().all(|ci| *ci == 0.0) {
        return Err(Error::ZeroRightHandSide);
    }
    Ok(())
}

/// Runs the recurrence to termination, calling `on_step(process, terminal)`
/// after every step. `terminal` is true when the new (rescaled) `q` is below `q_tol`.
pub(crate) fn drive<'a, O, F>(
    op: &'a O,
    c: &'a [f64],
    cfg: &KrylovConfig,
    mut on_step: F,
) -> Result<SolveReport>
where
    O: SymmetricOperator + ?Sized,
    F: FnMut(&LanczosProcess<'a, O>, bool) -> Result<()>,
{
    cfg.validate()?;
    validate_problem(op, c)?;
    let max_iter = cfg.max_iter_for(op.dim());
    let mut process = LanczosProcess::new(op, c, cfg.strategy)?
        .with_reorthogonalization(cfg.reorthogonalize)
        .with_history(cfg.keep_history);

    let mut converged = false;
    while process.k() < max_iter {
        process.step()?;
        let terminal = process.current().q_norm() * process.reference_scale() <= cfg.q_tol;
        on_step(&process, terminal)?;
        if terminal {
            converged = true;
            break;
        }
    }

    let q_norm = process.current().q_norm();
    let applications = process.applications();
    let parts = process.into_parts();
    let last = parts.last_two.last().expect("process keeps its current triple");
    let delta_r = last.delta;
    let r = last.k;
    let reference_delta = parts.trace.reference_delta(r);

    let mut report = SolveReport {
        verdict: None,
        status: Status::MaxIterReached,
        r,
        x: None,
        certificate_y: None,
        certificate_unit: None,
        delta_r,
        residual_norm: q_norm,
        trace: parts.trace,
        triples_kept: Vec::new(),
        history: parts.history,
        operator_applications: applications,
    };

    if !converged {
        report.triples_kept = parts.last_two;
        return Err(Error::DidNotTerminate(Box::new(report)));
    }

    report.status = Status::Converged;
    if reference_delta.abs() > cfg.delta_tol {
        let x = scaled(1.0 / delta_r, &last.y);
        let mut g = op.apply(&x);
        axpy_in_place(1.0, c, &mut g);
        report.residual_norm = norm2(&g);
        report.verdict = Some(Verdict::Compatible);
        report.x = Some(x);
    } else {
        let y = last.y.clone();
        report.residual_norm = norm2(&op.apply(&y));
        let yn = norm2(&y);
        report.certificate_unit = (yn > 0.0).then(|| scaled(1.0 / yn, &y));
        report.certificate_y = Some(y);
        report.verdict = Some(Verdict::Incompatible);
    }
    report.operator_applications += 1;
    report.triples_kept = parts.last_two;
    Ok(report)
}

/// Solves `Hx + c = 0` or certifies that it has no solution.
pub fn solve_krylov<O: SymmetricOperator + ?Sized>(
    op: &O,
    c: &[f64],
    cfg: &KrylovConfig,
) -> Result<SolveReport> {
    drive(op, c, cfg, |_, _| Ok(()))
}

/// One interior point `delta_k ~ 0` (`0 < k < r`) of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorZero {
    pub k: usize,
    pub same_sign_thetas: bool,
    /// `delta_(k+1) * delta_(k-1) < 0`
    pub sign_alternates: bool,
    /// `-(theta_k / theta_(k-1)) (q_k.q_k / q_(k-1).q_(k-1)) delta_(k-1)`
    pub predicted_next: f64,
    pub observed_next: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeltaLawSummary {
    /// Indices `k` with both `|delta_k|` and `|delta_(k+1)|` below the tolerance,
    /// `k + 1 < r`. Must be empty.
    pub consecutive_near_zero: Vec<usize>,
    pub interior_zeros: Vec<InteriorZero>,
}

impl DeltaLawSummary {
    /// True when no two consecutive deltas vanish and every interior zero
    /// with same-sign thetas is flanked by deltas of opposite sign.
    pub fn passes(&self) -> bool {
        self.consecutive_near_zero.is_empty()
            && self
                .interior_zeros
                .iter()
                .all(|z| !z.same_sign_thetas || z.sign_alternates)
    }

    pub fn max_relative_error(&self) -> f64 {
        self.interior_zeros
            .iter()
            .fold(0.0, |m, z| m.max(z.relative_error))
    }
}

/// Checks the sign laws of the `delta` sequence of a completed run.
pub fn check_delta_laws(trace: &IterationTrace, cfg: &KrylovConfig) -> DeltaLawSummary {
    let r = trace.steps();
    let d = &trace.deltas;
    let near_zero = |k: usize| trace.reference_delta(k).abs() < cfg.delta_tol;
    let mut summary = DeltaLawSummary::default();
    if r < 2 {
        return summary;
    }
    for k in 0..r - 1 {
        if near_zero(k) && near_zero(k + 1) {
            summary.consecutive_near_zero.push(k);
        }
    }
    for k in 1..r {
        if !near_zero(k) {
            continue;
        }
        let (t_prev, t) = (trace.thetas[k - 1], trace.thetas[k]);
        let ratio = trace.qnorms[k] / trace.qnorms[k - 1];
        let ratio = ratio * ratio;
        let predicted = -(t / t_prev) * ratio * d[k - 1];
        let observed = d[k + 1];
        summary.interior_zeros.push(InteriorZero {
            k,
            same_sign_thetas: t_prev.signum() == t.signum(),
            sign_alternates: observed * d[k - 1] < 0.0,
            predicted_next: predicted,
            observed_next: observed,
            relative_error: (predicted - observed).abs() / observed.abs().max(f64::MIN_POSITIVE),
        });
    }
    summary
}
