//! Harmonic-average finite-difference solvers for elliptic interface
//! problems `(β u_x)_x - σ u = f` with discontinuous coefficients,
//! solutions and fluxes, in one dimension and in two dimensions with a
//! straight interface `x = α`.
//!
//! The classical harmonic-average scheme and the improved scheme (interface
//! weighted average plus jump corrections at the two irregular nodes) are
//! both available. See [`fd1d::solve1d`], [`fd2d::solve_problem_2d`] and
//! [`analysis::refinement_study`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod averaging;
pub mod cli;
pub mod error;
pub mod exec;
pub mod expr;
pub mod fd1d;
pub mod fd2d;
pub mod greens;
pub mod options;
pub mod problem;

pub use error::SolveError;
pub use exec::Execution;
pub use options::{Method, SolveOptions};
