//! Green's function of the second kind for piecewise-constant `β` on `(0, 1)`.
//!
//! `G_α` solves `(β G')' = 0` on both sides of `α` with `G(0) = G(1) = 0`,
//! continuous flux and the value jump `[G] = 2 / (β⁻ + β⁺)`.

use thiserror::Error;

use crate::error::SolveError;
use crate::fd1d::{solve1d, MIN_CELLS};
use crate::options::{Method, SolveOptions};
use crate::problem::{InterfaceProblem1D, JumpSpec, PiecewiseField, Side};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreensError {
    #[error("alpha = {0} must lie in (0, 1)")]
    Alpha(f64),
    #[error("beta must be positive (beta- = {beta_minus}, beta+ = {beta_plus})")]
    Beta { beta_minus: f64, beta_plus: f64 },
    #[error("x = {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("x = alpha; ask for a one-sided limit instead")]
    AtInterface,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreensFunction {
    alpha: f64,
    beta_minus: f64,
    beta_plus: f64,
}

impl GreensFunction {
    pub fn new(alpha: f64, beta_minus: f64, beta_plus: f64) -> Result<Self, GreensError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(GreensError::Alpha(alpha));
        }
        if !(beta_minus > 0.0 && beta_plus > 0.0) {
            return Err(GreensError::Beta {
                beta_minus,
                beta_plus,
            });
        }
        Ok(Self {
            alpha,
            beta_minus,
            beta_plus,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `β⁻(1 - α) + β⁺α`
    pub fn denominator(&self) -> f64 {
        self.beta_minus * (1.0 - self.alpha) + self.beta_plus * self.alpha
    }

    /// Slope of the branch on `side`.
    pub fn slope(&self, side: Side) -> f64 {
        let s = self.beta_minus + self.beta_plus;
        match side {
            Side::Left => -2.0 * self.beta_plus / (s * self.denominator()),
            Side::Right => -2.0 * self.beta_minus / (s * self.denominator()),
        }
    }

    /// The branch on `side` extended to all of `[0, 1]`.
    pub fn eval_side(&self, side: Side, x: f64) -> f64 {
        match side {
            Side::Left => self.slope(Side::Left) * x,
            Side::Right => self.slope(Side::Right) * (x - 1.0),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, GreensError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(GreensError::OutOfRange(x));
        }
        if x < self.alpha {
            Ok(self.eval_side(Side::Left, x))
        } else if x > self.alpha {
            Ok(self.eval_side(Side::Right, x))
        } else {
            Err(GreensError::AtInterface)
        }
    }

    pub fn limit(&self, side: Side) -> f64 {
        self.eval_side(side, self.alpha)
    }

    /// `[G]_α = 2 / (β⁻ + β⁺)`
    pub fn jump(&self) -> f64 {
        2.0 / (self.beta_minus + self.beta_plus)
    }

    /// `max |G|` over `[0, 1]`, attained at one of the limits at `α`.
    pub fn max_abs(&self) -> f64 {
        self.limit(Side::Left).abs().max(self.limit(Side::Right).abs())
    }
}

/// Solves the homogeneous problem whose exact solution is `W G_α` with the
/// improved scheme and returns the largest nodal error.
pub fn reproduction_check(
    alpha: f64,
    beta_minus: f64,
    beta_plus: f64,
    w: f64,
    n: usize,
) -> Result<f64, SolveError> {
    let gf = GreensFunction::new(alpha, beta_minus, beta_plus).map_err(|_| SolveError::InterfaceOutside {
        alpha,
        a: 0.0,
        b: 1.0,
    })?;
    if n < MIN_CELLS {
        return Err(SolveError::GridTooCoarse { n, min: MIN_CELLS });
    }
    let problem = InterfaceProblem1D {
        a: 0.0,
        b: 1.0,
        alpha,
        beta: PiecewiseField::constant(beta_minus, beta_plus, alpha),
        sigma: PiecewiseField::constant(0.0, 0.0, alpha),
        source: PiecewiseField::constant(0.0, 0.0, alpha),
        jumps: JumpSpec::constant(w * gf.jump(), 0.0),
        dirichlet: (0.0, 0.0),
    };
    let sol = solve1d(&problem, n, Method::Improved, &SolveOptions::default().sequential())?;
    Ok(sol
        .points()
        .map(|(x, u)| {
            let side = if x <= alpha { Side::Left } else { Side::Right };
            (u - w * gf.eval_side(side, x)).abs()
        })
        .fold(0.0, f64::max))
}

/// `max|G_α| |W|` with `W = T_j h_l h (β⁻ + β⁺) / (2 β̄)`: the bound on the
/// error caused by the truncation pair at the irregular nodes.
pub fn cancellation_bound(
    t_j: f64,
    h_l: f64,
    h: f64,
    beta_minus: f64,
    beta_plus: f64,
    bar_beta: f64,
    gf: &GreensFunction,
) -> f64 {
    let w = t_j * h_l * h * (beta_minus + beta_plus) / (2.0 * bar_beta);
    gf.max_abs() * w.abs()
}
