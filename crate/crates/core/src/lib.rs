//! Matrix-free solvers for symmetric linear systems `Hx + c = 0` built on
//! unnormalized Lanczos triples `(q_k, y_k, delta_k)` with `q_k = H y_k + delta_k c`.
//!
//! Running the triple recurrence until `q_r` vanishes either yields a solution
//! `x_r = y_r / delta_r` or, when `delta_r = 0`, a null vector `y_r` of `H` that is
//! not orthogonal to `c`, certifying that the system has no solution. The same
//! triples drive a minimum-residual iteration whose final iterate, for an
//! incompatible system, is the least-squares solution of minimum Euclidean norm.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

mod error;
pub mod cg;
pub mod lanczos;
pub mod minres;
pub mod operator;
pub mod oracle;
pub mod solver;
pub mod vector;

pub use error::Error;
pub use minres::{solve_minres, MinresAccumulator, MinresReport};
pub use lanczos::{LanczosProcess, LanczosTriple, ScalingStrategy, StepCoefficients};
pub use operator::{DenseSymmetric, MatrixFree, SymmetricOperator};
pub use solver::{solve_krylov, KrylovConfig, SolveReport, Status, Verdict};

pub type Result<T, E = Error> = core::result::Result<T, E>;
