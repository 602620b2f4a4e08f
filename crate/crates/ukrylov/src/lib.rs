//! Files and command line for `ukrylov-core`: Matrix Market input, JSON and
//! text reports, and the `ukrylov` binary.

pub mod cli;
pub mod demo;
pub mod io;
