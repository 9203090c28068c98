use thiserror::Error;

use crate::averaging::AveragingError;
use crate::expr::EvalError;
use crate::problem::{ProblemError, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid problem: {}", list(.0))]
    Validation(Vec<Violation>),
    #[error("interface {alpha} is not inside ({a}, {b})")]
    InterfaceOutside { alpha: f64, a: f64, b: f64 },
    #[error("grid with {n} cells is too coarse (need at least {min})")]
    GridTooCoarse { n: usize, min: usize },
    #[error("zero pivot in row {row}")]
    ZeroPivot { row: usize },
    #[error("conjugate gradient stopped after {iterations} iterations at relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("expected a {expected}D problem")]
    WrongDimension { expected: usize },
    #[error("refinement levels must be increasing and doubling: {0:?}")]
    BadLevels(Vec<usize>),
    #[error(transparent)]
    Averaging(#[from] AveragingError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl SolveError {
    /// Failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SolveError::ZeroPivot { .. }
                | SolveError::NotConverged { .. }
                | SolveError::Averaging(AveragingError::QuadratureNonConvergence { .. })
        )
    }

    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            SolveError::Validation(_) | SolveError::InterfaceOutside { .. }
        )
    }
}
