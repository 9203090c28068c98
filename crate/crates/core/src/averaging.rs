//! Coefficient averages over grid cells.

use thiserror::Error;

use crate::expr::{EvalError, Point};
use crate::problem::{PiecewiseField, Side};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AveragingError {
    #[error("interval ({lo}, {hi}) straddles the interface at {alpha}; midpoint sampling is not allowed there")]
    StraddlesInterface { lo: f64, hi: f64, alpha: f64 },
    #[error("empty interval ({lo}, {hi})")]
    EmptyInterval { lo: f64, hi: f64 },
    #[error("interface {alpha} outside [{lo}, {hi})")]
    InterfaceOutside { alpha: f64, lo: f64, hi: f64 },
    #[error("beta must be positive (beta- = {beta_minus}, beta+ = {beta_plus})")]
    NonPositiveBeta { beta_minus: f64, beta_plus: f64 },
    #[error("beta is not positive at x = {x}: {value}")]
    BetaNotPositive { x: f64, value: f64 },
    #[error("quadrature did not converge on ({lo}, {hi})")]
    QuadratureNonConvergence { lo: f64, hi: f64 },
    #[error("averaging tolerance {0} outside (0, 1e-6]")]
    BadTolerance(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AveragingMode {
    #[default]
    Midpoint,
    IntegralHarmonic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AveragingPolicy {
    mode: AveragingMode,
    rel_tol: f64,
}

impl Default for AveragingPolicy {
    fn default() -> Self {
        Self {
            mode: AveragingMode::Midpoint,
            rel_tol: 1e-12,
        }
    }
}

impl AveragingPolicy {
    pub fn new(mode: AveragingMode, rel_tol: f64) -> Result<Self, AveragingError> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
            return Err(AveragingError::BadTolerance(rel_tol));
        }
        Ok(Self { mode, rel_tol })
    }

    pub fn midpoint() -> Self {
        Self::default()
    }

    pub fn integral() -> Self {
        Self {
            mode: AveragingMode::IntegralHarmonic,
            ..Self::default()
        }
    }

    pub fn mode(&self) -> AveragingMode {
        self.mode
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn with_mode(self, mode: AveragingMode) -> Self {
        Self { mode, ..self }
    }
}

// 7-point Gauss-Legendre rule on [-1, 1]
const GAUSS7: [(f64, f64); 7] = [
    (0.0, 0.417_959_183_673_469_4),
    (-0.405_845_151_377_397_2, 0.381_830_050_505_118_9),
    (0.405_845_151_377_397_2, 0.381_830_050_505_118_9),
    (-0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
    (0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
    (-0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
    (0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
];

const MAX_DEPTH: u32 = 40;

fn gauss7<F: FnMut(f64) -> Result<f64, AveragingError>>(
    f: &mut F,
    lo: f64,
    hi: f64,
) -> Result<f64, AveragingError> {
    let c = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    let mut s = 0.0;
    for (t, w) in GAUSS7 {
        s += w * f(c + r * t)?;
    }
    Ok(r * s)
}

/// Adaptive interval-halving 7-point Gauss quadrature of `f` over `[lo, hi]`.
///
/// A panel is accepted when its two halves agree with the whole-panel value
/// to `rel_tol` times the panel's share of the total.
pub fn adaptive_gauss<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64, AveragingError>
where
    F: FnMut(f64) -> Result<f64, AveragingError>,
{
    if lo == hi {
        return Ok(0.0);
    }
    let width = hi - lo;
    let whole = gauss7(&mut f, lo, hi)?;
    let mut stack = vec![(lo, hi, whole, 0u32)];
    let mut total = 0.0;
    let scale = whole.abs();
    while let Some((a, b, est, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let l = gauss7(&mut f, a, m)?;
        let r = gauss7(&mut f, m, b)?;
        let refined = l + r;
        let target = rel_tol * scale.max(refined.abs()) * ((b - a) / width);
        if (refined - est).abs() <= target || (refined - est).abs() <= f64::EPSILON * refined.abs() {
            total += refined;
        } else if depth >= MAX_DEPTH {
            return Err(AveragingError::QuadratureNonConvergence { lo, hi });
        } else {
            stack.push((m, b, r, depth + 1));
            stack.push((a, m, l, depth + 1));
        }
    }
    Ok(total)
}

fn reciprocal(beta: &PiecewiseField, side: Side) -> impl FnMut(f64) -> Result<f64, AveragingError> + '_ {
    move |x| {
        let v = beta.eval_side(side, Point::on_line(x))?;
        if v > 0.0 {
            Ok(1.0 / v)
        } else {
            Err(AveragingError::BetaNotPositive { x, value: v })
        }
    }
}

/// Harmonic average `((1/h) ∫ β⁻¹ dx)⁻¹` of `beta` over `[lo, hi]`, or the
/// midpoint value in midpoint mode.
pub fn harmonic_average_interval(
    beta: &PiecewiseField,
    lo: f64,
    hi: f64,
    policy: &AveragingPolicy,
) -> Result<f64, AveragingError> {
    if !(lo < hi) {
        return Err(AveragingError::EmptyInterval { lo, hi });
    }
    let alpha = beta.alpha();
    let straddles = lo < alpha && alpha < hi;
    match policy.mode {
        AveragingMode::Midpoint => {
            if straddles {
                return Err(AveragingError::StraddlesInterface { lo, hi, alpha });
            }
            let side = if hi <= alpha { Side::Left } else { Side::Right };
            let x = 0.5 * (lo + hi);
            let v = beta.eval_side(side, Point::on_line(x))?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(AveragingError::BetaNotPositive { x, value: v })
            }
        }
        AveragingMode::IntegralHarmonic => {
            let tol = policy.rel_tol;
            let integral = if straddles {
                adaptive_gauss(reciprocal(beta, Side::Left), lo, alpha, tol)?
                    + adaptive_gauss(reciprocal(beta, Side::Right), alpha, hi, tol)?
            } else {
                let side = if hi <= alpha { Side::Left } else { Side::Right };
                adaptive_gauss(reciprocal(beta, side), lo, hi, tol)?
            };
            Ok((hi - lo) / integral)
        }
    }
}

/// Interface-weighted harmonic average on the cell `[x_j, x_{j+1})` containing
/// `alpha`, built from the one-sided limits `beta_minus`, `beta_plus`.
pub fn interface_average(
    beta_minus: f64,
    beta_plus: f64,
    x_j: f64,
    x_j1: f64,
    alpha: f64,
) -> Result<f64, AveragingError> {
    if !(beta_minus > 0.0 && beta_plus > 0.0) {
        return Err(AveragingError::NonPositiveBeta {
            beta_minus,
            beta_plus,
        });
    }
    if !(x_j <= alpha && alpha < x_j1) {
        return Err(AveragingError::InterfaceOutside {
            alpha,
            lo: x_j,
            hi: x_j1,
        });
    }
    let h = x_j1 - x_j;
    Ok(1.0 / ((x_j1 - alpha) / (beta_plus * h) + (alpha - x_j) / (beta_minus * h)))
}
