use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::solver::SolveReport;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NonSquare { rows: usize, row: usize, cols: usize },

    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {difference:e} exceeds {tolerance:e}")]
    AsymmetryExceeded {
        i: usize,
        j: usize,
        difference: f64,
        tolerance: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("input is empty")]
    EmptyInput,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("right-hand side c is zero")]
    ZeroRightHandSide,

    #[error("lanczos vector q_{step} is numerically zero; the recurrence has already terminated")]
    ZeroQ { step: usize },

    #[error("step {k} needs exactly the triple of step k - 1 as its predecessor (none at k = 0)")]
    InconsistentTriples { k: usize },

    #[error("normalization breakdown at step {step}: alpha*delta_k + beta*delta_(k-1) = 0")]
    NormalizationBreakdown { step: usize },

    #[error("cannot scale y_{step}: the unscaled vector is zero")]
    ZeroYScaling { step: usize },

    #[error("scaling factor theta at step {step} is zero or not finite")]
    InvalidTheta { step: usize },

    #[error("iteration trace holds no steps")]
    EmptyTrace,

    #[error("no termination after {} iterations (||q|| = {:e})", .0.r, .0.trace.qnorms.last().copied().unwrap_or(f64::NAN))]
    DidNotTerminate(Box<SolveReport>),

    #[error("q_k^T q_k must be positive, got {0:e}")]
    NonpositiveDenominator(f64),

    #[error("incompatibility certificate y_r is numerically zero")]
    ZeroCertificate,

    #[error("nonpositive curvature p^T H p = {curvature:e} at cg step {step}")]
    NonpositiveCurvature {
        step: usize,
        curvature: f64,
        direction: Vec<f64>,
    },

    #[error("matrix is numerically singular (condition estimate {condition:e})")]
    SingularMatrix { condition: f64 },

    #[error("lanczos vector q_{index} in the basis is zero")]
    ZeroQInBasis { index: usize },
}
