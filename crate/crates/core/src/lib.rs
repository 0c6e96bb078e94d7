//! Sparse approximate solutions of nonnegative linear systems `Ax ≈ b` by
//! greedy potential minimization, and an application to learning
//! axis-aligned Gaussian mixtures.
//!
//! The entry points are [`solve`] for a normalized [`NonnegSystem`] and
//! [`gmm::learn`] for samples. [`instances`] builds witnessed test systems and
//! [`io`] reads and writes the plain-text formats used by the CLI.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gmm;
pub mod instances;
pub mod io;
pub mod lemmas;
pub mod potential;
pub mod rng;
pub mod solver;
pub mod system;

pub use error::{Error, Result};
pub use potential::{BoundCheck, SolverState};
pub use solver::{
    denormalize, scan_increment, select_increment, solve, solve_with, theta_grid, ColumnOracle,
    Increment, MonotoneOracle, ScanMode, SolveReport, SolverParams, StopReason, StopRule,
    TraceRecord,
};
pub use system::{normalize_system, NonnegSystem, RawSystem, SparseSolution, SparseVec};
