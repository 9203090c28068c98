use crate::averaging::AveragingPolicy;
use crate::exec::Execution;

/// Which harmonic-average scheme to assemble.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    /// Integral harmonic averages on every cell, no jump corrections.
    Classical,
    /// Interface-weighted average plus correction terms at the two irregular nodes.
    #[default]
    Improved,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Scale the two irregular rows (columns in 2D) so the matrix is symmetric.
    pub symmetrize: bool,
    pub averaging: AveragingPolicy,
    /// Relative residual target for the 2D conjugate-gradient solve.
    pub cg_tol: f64,
    /// Iteration cap for CG; `None` means `20 * sqrt(unknowns)`.
    pub max_iter: Option<usize>,
    pub execution: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            symmetrize: false,
            averaging: AveragingPolicy::default(),
            cg_tol: 1e-12,
            max_iter: None,
            execution: Execution::default(),
        }
    }
}

impl SolveOptions {
    pub fn sequential(self) -> Self {
        Self {
            execution: Execution::Sequential,
            ..self
        }
    }

    pub fn symmetrized(self) -> Self {
        Self {
            symmetrize: true,
            ..self
        }
    }
}
