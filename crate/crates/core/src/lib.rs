//! Steady Boussinesq flow on Scott-Vogelius elements, solved by Picard,
//! Newton, Picard-Newton or Anderson-accelerated Picard-Newton iteration,
//! plus the benchmark harness used to compare them.
//!
//! The usual entry point is a [`bench::BenchmarkCase`], whose
//! [`discretization`](bench::BenchmarkCase::discretization) at a given
//! Rayleigh number is handed to [`solvers::iterate`].

// Element kernels index several local arrays by node number, and `!(x > 0.0)`
// is used on purpose so that NaN is rejected.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod fem;
pub mod linsolve;
pub mod mesh;
pub mod solvers;
pub mod sparse;
