//! Two small diagonal systems used by `--demo`.
//!
//! `compatible`: `H = diag(3,2,1,0,-1,-2,-3)` with `c` equal to its diagonal;
//! the solution is `(-1,-1,-1,0,-1,-1,-1)` after six steps.
//! `incompatible`: `H = diag(5,2,1,0,-1,-2,-3)` with `c = (3,2,1,1,-1,-2,-3)`;
//! the fourth component of `c` lies in the null space.

use ukrylov_core::DenseSymmetric;

use crate::io::ProblemInstance;

pub const COMPATIBLE_DIAG: [f64; 7] = [3.0, 2.0, 1.0, 0.0, -1.0, -2.0, -3.0];
pub const COMPATIBLE_C: [f64; 7] = [3.0, 2.0, 1.0, 0.0, -1.0, -2.0, -3.0];
pub const INCOMPATIBLE_DIAG: [f64; 7] = [5.0, 2.0, 1.0, 0.0, -1.0, -2.0, -3.0];
pub const INCOMPATIBLE_C: [f64; 7] = [3.0, 2.0, 1.0, 1.0, -1.0, -2.0, -3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Demo {
    Compatible,
    Incompatible,
}

impl Demo {
    pub fn instance(self) -> ProblemInstance {
        let (d, c, name) = match self {
            Demo::Compatible => (COMPATIBLE_DIAG, COMPATIBLE_C, "demo-compatible"),
            Demo::Incompatible => (INCOMPATIBLE_DIAG, INCOMPATIBLE_C, "demo-incompatible"),
        };
        let h = DenseSymmetric::diagonal(&d).expect("demo diagonal is valid");
        ProblemInstance::new(h, c.to_vec(), name).expect("demo right-hand side is valid")
    }
}
