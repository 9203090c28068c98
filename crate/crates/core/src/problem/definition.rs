//! Text-level problem description shared by the built-in catalog and
//! user config files.

use serde::{Deserialize, Serialize};

use super::{
    parse_bound, InterfaceProblem, InterfaceProblem1D, InterfaceProblem2D, JumpSpec,
    ManufacturedCase, PiecewiseField, ProblemError, Side,
};
use crate::expr::{Params, Point};

/// Left/right expression pair, e.g. `left = "1 + x^2"`, `right = "log(2 + x)"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branches {
    pub left: String,
    pub right: String,
}

impl Branches {
    pub fn new(left: impl Into<String>, right: impl Into<String>) -> Self {
        Self {
            left: left.into(),
            right: right.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JumpDefinition {
    Jump { jump_u: String, jump_flux: String },
    Delta { v: String, w: String },
}

fn one() -> u8 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemDefinition {
    #[serde(default = "one")]
    pub dimension: u8,
    /// `[a, b]` in 1D, `[a, b, c, d]` in 2D.
    pub domain: Vec<f64>,
    pub alpha: f64,
    #[serde(default)]
    pub params: Params,
    pub beta: Branches,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Branches>,
    pub f: Branches,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<JumpDefinition>,
    /// Dirichlet data; falls back to `exact` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Branches>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Branches>,
}

/// An instantiated definition; `exact` is present for manufactured problems.
#[derive(Clone, Debug, PartialEq)]
pub struct DefinedProblem {
    pub problem: InterfaceProblem,
    pub exact: Option<PiecewiseField>,
    pub params: Params,
}

impl DefinedProblem {
    pub fn into_case(self, name: impl Into<String>) -> Result<ManufacturedCase, ProblemError> {
        let exact = self
            .exact
            .ok_or_else(|| ProblemError::Invalid("no exact solution given".into()))?;
        Ok(ManufacturedCase {
            name: name.into(),
            problem: self.problem,
            exact,
            params: self.params,
        })
    }
}

impl ProblemDefinition {
    /// Parameters visible to expressions: the `[params]` table plus `alpha`.
    pub fn effective_params(&self) -> Params {
        let mut p = self.params.clone();
        p.entry("alpha".to_string()).or_insert(self.alpha);
        p
    }

    pub fn instantiate(&self) -> Result<DefinedProblem, ProblemError> {
        let params = self.effective_params();
        let alpha = self.alpha;
        let pair = |name: &str, b: &Branches| PiecewiseField::parse(name, &b.left, &b.right, alpha, &params);
        let beta = pair("beta", &self.beta)?;
        let sigma = match &self.sigma {
            Some(s) => pair("sigma", s)?,
            None => PiecewiseField::constant(0.0, 0.0, alpha),
        };
        let source = pair("f", &self.f)?;
        let exact = self.exact.as_ref().map(|e| pair("exact", e)).transpose()?;
        let boundary = match (&self.boundary, &exact) {
            (Some(b), _) => pair("boundary", b)?,
            (None, Some(e)) => e.clone(),
            (None, None) => {
                return Err(ProblemError::Invalid(
                    "either [boundary] or [exact] must be given".into(),
                ))
            }
        };
        let jumps = match &self.jumps {
            None => JumpSpec::homogeneous(),
            Some(JumpDefinition::Jump { jump_u, jump_flux }) => JumpSpec::Jump {
                jump_u: parse_bound("jumps.jump_u", jump_u, &params)?,
                jump_flux: parse_bound("jumps.jump_flux", jump_flux, &params)?,
            },
            Some(JumpDefinition::Delta { v, w }) => JumpSpec::Delta {
                v: parse_bound("jumps.v", v, &params)?,
                w: parse_bound("jumps.w", w, &params)?,
            },
        };
        let problem = match (self.dimension, self.domain.as_slice()) {
            (1, &[a, b]) => InterfaceProblem::OneD(InterfaceProblem1D {
                a,
                b,
                alpha,
                dirichlet: (
                    boundary.eval_side(Side::Left, Point::on_line(a))?,
                    boundary.eval_side(Side::Right, Point::on_line(b))?,
                ),
                beta,
                sigma,
                source,
                jumps,
            }),
            (2, &[a, b, c, d]) => InterfaceProblem::TwoD(InterfaceProblem2D {
                a,
                b,
                c,
                d,
                alpha,
                beta,
                sigma,
                source,
                jumps,
                boundary,
            }),
            (dim @ (1 | 2), dom) => {
                return Err(ProblemError::Invalid(format!(
                    "a {dim}D problem needs {} domain bounds, got {}",
                    2 * dim,
                    dom.len()
                )))
            }
            (dim, _) => return Err(ProblemError::Invalid(format!("unsupported dimension {dim}"))),
        };
        Ok(DefinedProblem {
            problem,
            exact,
            params,
        })
    }
}
