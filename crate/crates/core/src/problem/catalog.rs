//! Built-in manufactured cases.
//!
//! Every case is written as a [`ProblemDefinition`], so a catalog case and a
//! config file containing the same strings instantiate identical problems.
//! Jump data are closed forms of the one-sided limits of the exact solution
//! and flux.

use super::{Branches, JumpDefinition, ManufacturedCase, ProblemDefinition, ProblemError};
use crate::expr::Params;

#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Required parameters and the values used when none are given.
    pub params: &'static [(&'static str, f64)],
}

impl CatalogEntry {
    pub fn default_params(&self) -> Params {
        self.params.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    pub fn signature(&self) -> String {
        let names: Vec<&str> = self.params.iter().map(|(k, _)| *k).collect();
        format!("{}({})", self.name, names.join(", "))
    }
}

const ONE_THIRD: f64 = 1.0 / 3.0;

static CATALOG: [CatalogEntry; 4] = [
    CatalogEntry {
        name: "ex1",
        summary: "variable beta = 1+x^2 | log(2+x), u = sin(k1 x) | cos(k2 x)",
        params: &[("k1", 5.0), ("k2", 3.0), ("alpha", ONE_THIRD)],
    },
    CatalogEntry {
        name: "ex2",
        summary: "piecewise-constant beta-/beta+, u = sin(k1 x) | cos(k2 x)",
        params: &[
            ("k1", 5.0),
            ("k2", 3.0),
            ("alpha", ONE_THIRD),
            ("beta_minus", 1.5),
            ("beta_plus", 3.0),
        ],
    },
    CatalogEntry {
        name: "ex3",
        summary: "self-adjoint with sigma = x, u = x^2 | x^4",
        params: &[("alpha", 5.0 / 9.0)],
    },
    CatalogEntry {
        name: "ex2d",
        summary: "2D line interface x = alpha, u = sin(k1 x) cos y | cos(k2 x) cos y",
        params: &[
            ("k1", 5.0),
            ("k2", 3.0),
            ("alpha", ONE_THIRD),
            ("beta_minus", 1.5),
            ("beta_plus", 3.0),
        ],
    },
];

pub fn catalog() -> &'static [CatalogEntry] {
    &CATALOG
}

fn jump(u: &str, flux: &str) -> Option<JumpDefinition> {
    Some(JumpDefinition::Jump {
        jump_u: u.into(),
        jump_flux: flux.into(),
    })
}

/// The text definition of catalog case `name` with the given parameters.
pub fn catalog_definition(name: &str, params: &Params) -> Result<ProblemDefinition, ProblemError> {
    let entry = CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| ProblemError::UnknownCase(name.to_string()))?;
    for (p, _) in entry.params {
        if !params.contains_key(*p) {
            return Err(ProblemError::MissingParam {
                case: name.to_string(),
                name: p.to_string(),
            });
        }
    }
    let alpha = params["alpha"];
    let params = params.clone();
    let def = match name {
        "ex1" => ProblemDefinition {
            dimension: 1,
            domain: vec![0.0, 1.0],
            alpha,
            params,
            beta: Branches::new("1 + x^2", "log(2 + x)"),
            sigma: None,
            f: Branches::new(
                "2*x*k1*cos(k1*x) - (x^2 + 1)*k1^2*sin(k1*x)",
                "-k2*sin(k2*x)/(2 + x) - log(x + 2)*k2^2*cos(k2*x)",
            ),
            jumps: jump(
                "cos(k2*alpha) - sin(k1*alpha)",
                "-log(2 + alpha)*k2*sin(k2*alpha) - (1 + alpha^2)*k1*cos(k1*alpha)",
            ),
            boundary: None,
            exact: Some(Branches::new("sin(k1*x)", "cos(k2*x)")),
        },
        "ex2" => ProblemDefinition {
            dimension: 1,
            domain: vec![0.0, 1.0],
            alpha,
            params,
            beta: Branches::new("beta_minus", "beta_plus"),
            sigma: None,
            f: Branches::new("-beta_minus*k1^2*sin(k1*x)", "-beta_plus*k2^2*cos(k2*x)"),
            jumps: jump(
                "cos(k2*alpha) - sin(k1*alpha)",
                "-beta_plus*k2*sin(k2*alpha) - beta_minus*k1*cos(k1*alpha)",
            ),
            boundary: None,
            exact: Some(Branches::new("sin(k1*x)", "cos(k2*x)")),
        },
        // right source derived from the exact solution: (1.1*4x^3)' - x*x^4
        "ex3" => ProblemDefinition {
            dimension: 1,
            domain: vec![0.0, 1.0],
            alpha,
            params,
            beta: Branches::new("1 + x^2", "1.1"),
            sigma: Some(Branches::new("x", "x")),
            f: Branches::new("2 + 6*x^2 - x^3", "13.2*x^2 - x^5"),
            jumps: jump("alpha^4 - alpha^2", "4.4*alpha^3 - 2*alpha*(1 + alpha^2)"),
            boundary: None,
            exact: Some(Branches::new("x^2", "x^4")),
        },
        "ex2d" => ProblemDefinition {
            dimension: 2,
            domain: vec![0.0, 1.0, 0.0, 1.0],
            alpha,
            params,
            beta: Branches::new("beta_minus", "beta_plus"),
            sigma: None,
            f: Branches::new(
                "-beta_minus*(k1^2 + 1)*sin(k1*x)*cos(y)",
                "-beta_plus*(k2^2 + 1)*cos(k2*x)*cos(y)",
            ),
            jumps: jump(
                "(cos(k2*alpha) - sin(k1*alpha))*cos(y)",
                "(-beta_plus*k2*sin(k2*alpha) - beta_minus*k1*cos(k1*alpha))*cos(y)",
            ),
            boundary: None,
            exact: Some(Branches::new("sin(k1*x)*cos(y)", "cos(k2*x)*cos(y)")),
        },
        _ => unreachable!("catalog entry without a definition"),
    };
    Ok(def)
}

/// Instantiates catalog case `name`.
pub fn catalog_case(name: &str, params: &Params) -> Result<ManufacturedCase, ProblemError> {
    catalog_definition(name, params)?.instantiate()?.into_case(name)
}
