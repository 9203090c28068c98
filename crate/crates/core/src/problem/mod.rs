//! Interface problems, manufactured cases and the jump-condition model.

mod catalog;
mod definition;

use std::fmt;

use thiserror::Error;

use crate::expr::{self, EvalError, Expr, Params, ParseError, Point};

pub use catalog::{catalog, catalog_case, catalog_definition, CatalogEntry};
pub use definition::{Branches, DefinedProblem, JumpDefinition, ProblemDefinition};

const NO_PARAMS: Params = Params::new();

/// Number of sample points per side used by [`validate`].
pub const VALIDATION_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("cannot parse {field}: {source}")]
    Parse {
        field: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{field} references unbound parameter(s): {names}")]
    UnboundParams { field: String, names: String },
    #[error("beta must be positive at the interface (got beta- = {beta_minus}, beta+ = {beta_plus})")]
    NonPositiveBeta { beta_minus: f64, beta_plus: f64 },
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error("case `{case}` requires parameter `{name}`")]
    MissingParam { case: String, name: String },
    #[error("invalid problem definition: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A scalar field given by one expression on each side of the line `x = alpha`.
///
/// Points with `x <= alpha` use the left expression, so a grid node that lands
/// exactly on the interface sees the left limit.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseField {
    left: Expr,
    right: Expr,
    alpha: f64,
}

impl PiecewiseField {
    pub fn new(left: Expr, right: Expr, alpha: f64) -> Self {
        Self { left, right, alpha }
    }

    pub fn constant(left: f64, right: f64, alpha: f64) -> Self {
        Self::new(Expr::num(left), Expr::num(right), alpha)
    }

    /// Parses both branches and substitutes `params` into them.
    pub fn parse(
        field: &str,
        left: &str,
        right: &str,
        alpha: f64,
        params: &Params,
    ) -> Result<Self, ProblemError> {
        let l = parse_bound(&format!("{field}.left"), left, params)?;
        let r = parse_bound(&format!("{field}.right"), right, params)?;
        Ok(Self::new(l, r, alpha))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn branch(&self, side: Side) -> &Expr {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn side_of(&self, x: f64) -> Side {
        if x <= self.alpha {
            Side::Left
        } else {
            Side::Right
        }
    }

    pub fn at(&self, p: Point) -> Result<f64, EvalError> {
        self.eval_side(self.side_of(p.x), p)
    }

    pub fn at_x(&self, x: f64) -> Result<f64, EvalError> {
        self.at(Point::on_line(x))
    }

    pub fn eval_side(&self, side: Side, p: Point) -> Result<f64, EvalError> {
        self.branch(side).eval(p, &NO_PARAMS)
    }

    /// One-sided limit at `(alpha, y)`.
    pub fn limit(&self, side: Side, y: f64) -> Result<f64, EvalError> {
        self.eval_side(side, Point::new(self.alpha, y))
    }
}

pub(crate) fn parse_bound(field: &str, src: &str, params: &Params) -> Result<Expr, ProblemError> {
    let e = expr::parse(src)
        .map_err(|source| ProblemError::Parse {
            field: field.to_string(),
            source,
        })?
        .bind(params);
    let unbound = e.param_names();
    if !unbound.is_empty() {
        return Err(ProblemError::UnboundParams {
            field: field.to_string(),
            names: unbound.join(", "),
        });
    }
    Ok(e)
}

/// Resolved jump values at one point of the interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpValues {
    /// `[u] = u+ - u-`
    pub jump_u: f64,
    /// `[beta u_x]`
    pub jump_flux: f64,
}

impl JumpValues {
    pub const ZERO: JumpValues = JumpValues {
        jump_u: 0.0,
        jump_flux: 0.0,
    };
}

/// Jump data, either as the coefficients of `v δ + w δ'` in the source or
/// directly as `[u]` and `[beta u_x]`. Expressions may depend on `y`.
#[derive(Clone, Debug, PartialEq)]
pub enum JumpSpec {
    Delta { v: Expr, w: Expr },
    Jump { jump_u: Expr, jump_flux: Expr },
}

impl JumpSpec {
    pub fn homogeneous() -> Self {
        JumpSpec::Jump {
            jump_u: Expr::num(0.0),
            jump_flux: Expr::num(0.0),
        }
    }

    pub fn constant(jump_u: f64, jump_flux: f64) -> Self {
        JumpSpec::Jump {
            jump_u: Expr::num(jump_u),
            jump_flux: Expr::num(jump_flux),
        }
    }

    /// Jump values at `(alpha, y)` given the one-sided coefficient limits there.
    pub fn values(&self, y: f64, beta_minus: f64, beta_plus: f64) -> Result<JumpValues, ProblemError> {
        let p = Point::new(0.0, y);
        match self {
            JumpSpec::Jump { jump_u, jump_flux } => Ok(JumpValues {
                jump_u: jump_u.eval(p, &NO_PARAMS)?,
                jump_flux: jump_flux.eval(p, &NO_PARAMS)?,
            }),
            JumpSpec::Delta { v, w } => jumps_from_delta(
                v.eval(p, &NO_PARAMS)?,
                w.eval(p, &NO_PARAMS)?,
                beta_minus,
                beta_plus,
            ),
        }
    }
}

/// Converts the source singularity `v δ(x-α) + w δ'(x-α)` into jump conditions:
/// `[u] = 2w / (β- + β+)` and `[β u_x] = v`.
pub fn jumps_from_delta(
    v: f64,
    w: f64,
    beta_minus: f64,
    beta_plus: f64,
) -> Result<JumpValues, ProblemError> {
    if !(beta_minus > 0.0 && beta_plus > 0.0) {
        return Err(ProblemError::NonPositiveBeta {
            beta_minus,
            beta_plus,
        });
    }
    Ok(JumpValues {
        jump_u: 2.0 * w / (beta_minus + beta_plus),
        jump_flux: v,
    })
}

/// `(β u_x)_x - σ u = f` on `(a, α) ∪ (α, b)` with jump conditions at `α`
/// and Dirichlet data at both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceProblem1D {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: PiecewiseField,
    pub sigma: PiecewiseField,
    pub source: PiecewiseField,
    pub jumps: JumpSpec,
    /// `(u(a), u(b))`
    pub dirichlet: (f64, f64),
}

impl InterfaceProblem1D {
    pub fn beta_limits(&self) -> Result<(f64, f64), EvalError> {
        Ok((
            self.beta.limit(Side::Left, 0.0)?,
            self.beta.limit(Side::Right, 0.0)?,
        ))
    }

    pub fn jump_values(&self) -> Result<JumpValues, ProblemError> {
        let (bm, bp) = self.beta_limits()?;
        self.jumps.values(0.0, bm, bp)
    }
}

/// The two-dimensional problem on `[a, b] x [c, d]` with the interface line `x = α`.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceProblem2D {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub alpha: f64,
    pub beta: PiecewiseField,
    pub sigma: PiecewiseField,
    pub source: PiecewiseField,
    pub jumps: JumpSpec,
    /// Dirichlet trace, evaluated on the boundary of the rectangle.
    pub boundary: PiecewiseField,
}

impl InterfaceProblem2D {
    pub fn beta_limits(&self, y: f64) -> Result<(f64, f64), EvalError> {
        Ok((
            self.beta.limit(Side::Left, y)?,
            self.beta.limit(Side::Right, y)?,
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InterfaceProblem {
    OneD(InterfaceProblem1D),
    TwoD(InterfaceProblem2D),
}

impl InterfaceProblem {
    pub fn dimension(&self) -> usize {
        match self {
            InterfaceProblem::OneD(_) => 1,
            InterfaceProblem::TwoD(_) => 2,
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            InterfaceProblem::OneD(p) => validate(p),
            InterfaceProblem::TwoD(p) => validate_2d(p),
        }
    }
}

/// A problem bundled with its exact solution.
#[derive(Clone, Debug, PartialEq)]
pub struct ManufacturedCase {
    pub name: String,
    pub problem: InterfaceProblem,
    pub exact: PiecewiseField,
    pub params: Params,
}

impl ManufacturedCase {
    /// Largest mismatch between the prescribed `[u]` and the jump of the
    /// exact solution, over a few points along the interface.
    pub fn jump_mismatch(&self) -> Result<f64, ProblemError> {
        let ys: Vec<f64> = match &self.problem {
            InterfaceProblem::OneD(_) => vec![0.0],
            InterfaceProblem::TwoD(p) => (0..=8).map(|k| p.c + (p.d - p.c) * k as f64 / 8.0).collect(),
        };
        let mut worst = 0.0f64;
        for y in ys {
            let jumps = match &self.problem {
                InterfaceProblem::OneD(p) => p.jump_values()?,
                InterfaceProblem::TwoD(p) => {
                    let (bm, bp) = p.beta_limits(y)?;
                    p.jumps.values(y, bm, bp)?
                }
            };
            let actual = self.exact.limit(Side::Right, y)? - self.exact.limit(Side::Left, y)?;
            worst = worst.max((actual - jumps.jump_u).abs());
        }
        Ok(worst)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    EmptyDomain,
    InterfaceOutsideDomain { alpha: f64, lo: f64, hi: f64 },
    BetaNonPositive { x: f64, y: f64, value: f64 },
    SigmaNegative { x: f64, y: f64, value: f64 },
    Unevaluable { field: &'static str, error: EvalError },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDomain => f.write_str("empty domain"),
            Violation::InterfaceOutsideDomain { alpha, lo, hi } => {
                write!(f, "interface outside domain: alpha = {alpha} not in ({lo}, {hi})")
            }
            Violation::BetaNonPositive { x, y, value } => {
                write!(f, "β non-positive: β({x}, {y}) = {value}")
            }
            Violation::SigmaNegative { x, y, value } => {
                write!(f, "σ negative: σ({x}, {y}) = {value}")
            }
            Violation::Unevaluable { field, error } => write!(f, "{field} cannot be evaluated: {error}"),
        }
    }
}

fn sample_side(lo: f64, hi: f64, k: usize, count: usize) -> f64 {
    if count == 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * k as f64 / (count - 1) as f64
    }
}

fn check_fields(
    beta: &PiecewiseField,
    sigma: &PiecewiseField,
    points: impl Iterator<Item = (Side, Point)>,
    out: &mut Vec<Violation>,
) {
    let mut beta_bad = false;
    let mut sigma_bad = false;
    for (side, p) in points {
        if !beta_bad {
            match beta.eval_side(side, p) {
                Ok(v) if v > 0.0 => {}
                Ok(value) => {
                    beta_bad = true;
                    out.push(Violation::BetaNonPositive { x: p.x, y: p.y, value });
                }
                Err(error) => {
                    beta_bad = true;
                    out.push(Violation::Unevaluable { field: "beta", error });
                }
            }
        }
        if !sigma_bad {
            match sigma.eval_side(side, p) {
                Ok(v) if v >= 0.0 => {}
                Ok(value) => {
                    sigma_bad = true;
                    out.push(Violation::SigmaNegative { x: p.x, y: p.y, value });
                }
                Err(error) => {
                    sigma_bad = true;
                    out.push(Violation::Unevaluable { field: "sigma", error });
                }
            }
        }
    }
}

/// Checks the standing assumptions of a 1D problem. An empty list means valid.
pub fn validate(problem: &InterfaceProblem1D) -> Vec<Violation> {
    let mut out = Vec::new();
    let (a, b, alpha) = (problem.a, problem.b, problem.alpha);
    if !(a < b) {
        out.push(Violation::EmptyDomain);
        return out;
    }
    if !(a < alpha && alpha < b) {
        out.push(Violation::InterfaceOutsideDomain { alpha, lo: a, hi: b });
    }
    // sample each side's own expression over the side's extent, inclusive of α
    let split = alpha.clamp(a, b);
    let n = VALIDATION_SAMPLES;
    let left = (0..n).map(|k| (Side::Left, Point::on_line(sample_side(a, split, k, n))));
    let right = (0..n).map(|k| (Side::Right, Point::on_line(sample_side(split, b, k, n))));
    check_fields(&problem.beta, &problem.sigma, left.chain(right), &mut out);
    out
}

/// Two-dimensional counterpart of [`validate`]: 1000 lattice points per side.
pub fn validate_2d(problem: &InterfaceProblem2D) -> Vec<Violation> {
    let mut out = Vec::new();
    let (a, b, alpha) = (problem.a, problem.b, problem.alpha);
    if !(a < b && problem.c < problem.d) {
        out.push(Violation::EmptyDomain);
        return out;
    }
    if !(a < alpha && alpha < b) {
        out.push(Violation::InterfaceOutsideDomain { alpha, lo: a, hi: b });
    }
    let split = alpha.clamp(a, b);
    let (nx, ny) = (40, VALIDATION_SAMPLES / 40);
    let (c, d) = (problem.c, problem.d);
    let lattice = move |side: Side, lo: f64, hi: f64| {
        (0..nx).flat_map(move |i| {
            (0..ny).map(move |j| {
                (
                    side,
                    Point::new(sample_side(lo, hi, i, nx), sample_side(c, d, j, ny)),
                )
            })
        })
    };
    let pts = lattice(Side::Left, a, split).chain(lattice(Side::Right, split, b));
    check_fields(&problem.beta, &problem.sigma, pts, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(l: &str, r: &str, alpha: f64) -> PiecewiseField {
        PiecewiseField::parse("test", l, r, alpha, &Params::new()).unwrap()
    }

    #[test]
    fn delta_to_jump_conversion() {
        assert_eq!(jumps_from_delta(0.0, 0.0, 1.0, 2.0).unwrap(), JumpValues::ZERO);
        let j = jumps_from_delta(3.0, 0.0, 1.5, 3.0).unwrap();
        assert_eq!((j.jump_u, j.jump_flux), (0.0, 3.0));
        let j = jumps_from_delta(0.0, 1.0, 1.0, 3.0).unwrap();
        assert_eq!((j.jump_u, j.jump_flux), (0.5, 0.0));
        assert!(jumps_from_delta(1.0, 1.0, 0.0, 3.0).is_err());
        assert!(jumps_from_delta(1.0, 1.0, 2.0, -3.0).is_err());
    }

    #[test]
    fn piecewise_field_sides() {
        let f = field("1 + x^2", "log(2 + x)", 0.5);
        assert_eq!(f.at_x(0.5).unwrap(), 1.25);
        assert_eq!(f.at_x(0.75).unwrap(), 2.75f64.ln());
        assert_eq!(f.limit(Side::Right, 0.0).unwrap(), 2.5f64.ln());
    }

    fn simple_problem(beta_left: &str, alpha: f64) -> InterfaceProblem1D {
        InterfaceProblem1D {
            a: 0.0,
            b: 1.0,
            alpha,
            beta: field(beta_left, "2", alpha),
            sigma: field("0", "0", alpha),
            source: field("0", "0", alpha),
            jumps: JumpSpec::homogeneous(),
            dirichlet: (0.0, 0.0),
        }
    }

    #[test]
    fn validation_reports_violations() {
        assert!(validate(&simple_problem("1", 0.3)).is_empty());
        let v = validate(&simple_problem("x - 1", 0.3));
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().starts_with("β non-positive"));
        let v = validate(&simple_problem("1", 1.5));
        assert!(v
            .iter()
            .any(|v| v.to_string().starts_with("interface outside domain")));
        let mut p = simple_problem("1", 0.3);
        p.sigma = field("0", "x - 0.5", 0.3);
        let v = validate(&p);
        assert!(matches!(v[..], [Violation::SigmaNegative { .. }]));
        let mut p = simple_problem("1", 0.3);
        p.beta = field("log(x - 0.5)", "1", 0.3);
        assert!(matches!(validate(&p)[..], [Violation::Unevaluable { field: "beta", .. }]));
    }

    #[test]
    fn delta_jump_spec_resolves_with_beta_limits() {
        let spec = JumpSpec::Delta {
            v: Expr::num(2.0),
            w: Expr::num(4.0),
        };
        let j = spec.values(0.0, 1.0, 3.0).unwrap();
        assert_eq!(j.jump_u, 2.0);
        assert_eq!(j.jump_flux, 2.0);
    }
}
