//! One-dimensional harmonic-average finite differences.
//!
//! Unknowns are the interior nodes `U_1 .. U_{N-1}`; Dirichlet values are
//! folded into the right-hand side. The irregular nodes are `x_j` and
//! `x_{j+1}` with `x_j <= alpha < x_{j+1}`.

mod tridiag;

pub use tridiag::{is_m_matrix, thomas_solve, MMatrixReport, TridiagonalSystem};

use crate::averaging::{harmonic_average_interval, interface_average, AveragingPolicy};
use crate::error::SolveError;
use crate::exec;
use crate::options::{Method, SolveOptions};
use crate::problem::{validate, InterfaceProblem1D, JumpValues};

/// Smallest number of cells accepted by the assemblers.
pub const MIN_CELLS: usize = 4;

/// Uniform grid `x_i = a + i h`, `i = 0..=N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self, SolveError> {
        if n < 1 || !(a < b) {
            return Err(SolveError::GridTooCoarse { n, min: 1 });
        }
        Ok(Self {
            a,
            b,
            n,
            h: (b - a) / n as f64,
        })
    }

    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.b
        } else {
            self.a + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(|i| self.node(i))
    }
}

/// Geometry of the two irregular nodes around the interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IrregularPair {
    /// Index with `x_j <= alpha < x_{j+1}`.
    pub j: usize,
    pub x_j: f64,
    pub x_j1: f64,
    pub alpha: f64,
    pub h: f64,
    /// `alpha - x_{j-1/2}`
    pub h_l: f64,
    /// `x_{j+3/2} - alpha`
    pub h_r: f64,
}

/// Finds `j` with `x_j <= alpha < x_{j+1}` (half-open, so a node at `alpha`
/// owns the interface).
pub fn locate_interface(grid: &Grid1D, alpha: f64) -> Result<IrregularPair, SolveError> {
    if !(grid.a < alpha && alpha < grid.b) {
        return Err(SolveError::InterfaceOutside {
            alpha,
            a: grid.a,
            b: grid.b,
        });
    }
    let n = grid.n;
    let mut j = (((alpha - grid.a) / grid.h).floor().max(0.0) as usize).min(n - 1);
    while j > 0 && grid.node(j) > alpha {
        j -= 1;
    }
    while j + 1 < n && grid.node(j + 1) <= alpha {
        j += 1;
    }
    let (x_j, x_j1, h) = (grid.node(j), grid.node(j + 1), grid.h);
    Ok(IrregularPair {
        j,
        x_j,
        x_j1,
        alpha,
        h,
        h_l: alpha - (x_j - 0.5 * h),
        h_r: (x_j1 + 0.5 * h) - alpha,
    })
}

/// Right-hand-side corrections `(C_j, C_{j+1})` for the jump conditions.
pub fn correction_terms(
    pair: &IrregularPair,
    bar_beta: f64,
    beta_minus: f64,
    beta_plus: f64,
    jumps: JumpValues,
) -> (f64, f64) {
    let IrregularPair {
        x_j,
        x_j1,
        alpha,
        h,
        h_l,
        h_r,
        ..
    } = *pair;
    let c_j = bar_beta / (h_l * h) * (jumps.jump_u + jumps.jump_flux / beta_plus * (x_j1 - alpha));
    let c_j1 = -bar_beta / (h_r * h) * (jumps.jump_u + jumps.jump_flux / beta_minus * (x_j - alpha));
    (c_j, c_j1)
}

/// Harmonic averages on every cell `(x_k, x_{k+1})`, `k = 0..N`.
///
/// The classical scheme uses integral averages everywhere; the improved
/// scheme uses the policy on regular cells and the interface-weighted
/// average on the cell containing `alpha`.
pub(crate) fn cell_averages(
    problem: &InterfaceProblem1D,
    grid: &Grid1D,
    pair: &IrregularPair,
    method: Method,
    options: &SolveOptions,
    bar_beta: f64,
) -> Result<Vec<f64>, SolveError> {
    let policy: AveragingPolicy = match method {
        Method::Classical => options.averaging.with_mode(crate::averaging::AveragingMode::IntegralHarmonic),
        Method::Improved => options.averaging,
    };
    exec::map_range(options.execution, grid.n, |k| {
        if method == Method::Improved && k == pair.j {
            Ok(bar_beta)
        } else {
            harmonic_average_interval(&problem.beta, grid.node(k), grid.node(k + 1), &policy)
                .map_err(SolveError::from)
        }
    })
    .into_iter()
    .collect()
}

/// Assembles the tridiagonal system for `problem` on `grid`.
pub fn assemble1d(
    problem: &InterfaceProblem1D,
    grid: &Grid1D,
    method: Method,
    options: &SolveOptions,
) -> Result<TridiagonalSystem, SolveError> {
    let violations = validate(problem);
    if !violations.is_empty() {
        return Err(SolveError::Validation(violations));
    }
    if grid.n < MIN_CELLS {
        return Err(SolveError::GridTooCoarse {
            n: grid.n,
            min: MIN_CELLS,
        });
    }
    let pair = locate_interface(grid, problem.alpha)?;
    let (beta_minus, beta_plus) = problem.beta_limits()?;
    let bar_beta = interface_average(beta_minus, beta_plus, pair.x_j, pair.x_j1, pair.alpha)?;
    let (c_j, c_j1) = match method {
        Method::Improved => {
            let jumps = problem.jump_values()?;
            correction_terms(&pair, bar_beta, beta_minus, beta_plus, jumps)
        }
        Method::Classical => (0.0, 0.0),
    };
    let avg = cell_averages(problem, grid, &pair, method, options, bar_beta)?;

    let n = grid.n;
    let h = grid.h;
    let h2 = h * h;
    let mut sys = TridiagonalSystem::zeros(n - 1);
    for i in 1..n {
        let r = i - 1;
        let x = grid.node(i);
        let sigma = problem.sigma.at_x(x)?;
        let mut f = problem.source.at_x(x)?;
        let (mut cl, mut cr) = (avg[i - 1] / h2, avg[i] / h2);
        let mut scale = 1.0;
        if method == Method::Improved {
            if i == pair.j {
                cl = avg[i - 1] / (h * pair.h_l);
                cr = bar_beta / (h * pair.h_l);
                f += c_j;
                scale = pair.h_l / h;
            } else if i == pair.j + 1 {
                cl = bar_beta / (h * pair.h_r);
                cr = avg[i] / (h * pair.h_r);
                f += c_j1;
                scale = pair.h_r / h;
            }
        }
        let mut sigma_term = sigma;
        if options.symmetrize && scale != 1.0 {
            cl *= scale;
            cr *= scale;
            f *= scale;
            sigma_term *= scale;
        }
        sys.diag[r] = -(cl + cr) - sigma_term;
        if i > 1 {
            sys.lower[r] = cl;
        } else {
            f -= cl * problem.dirichlet.0;
        }
        if i + 1 < n {
            sys.upper[r] = cr;
        } else {
            f -= cr * problem.dirichlet.1;
        }
        sys.rhs[r] = f;
    }
    Ok(sys)
}

/// Nodal solution including both boundary values.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution1D {
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

impl Solution1D {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.nodes().zip(self.values.iter().copied())
    }
}

pub fn solve1d(
    problem: &InterfaceProblem1D,
    n: usize,
    method: Method,
    options: &SolveOptions,
) -> Result<Solution1D, SolveError> {
    let grid = Grid1D::new(problem.a, problem.b, n)?;
    let sys = assemble1d(problem, &grid, method, options)?;
    let interior = thomas_solve(&sys)?;
    let mut values = Vec::with_capacity(n + 1);
    values.push(problem.dirichlet.0);
    values.extend(interior);
    values.push(problem.dirichlet.1);
    Ok(Solution1D { grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Params;
    use crate::problem::{JumpSpec, PiecewiseField};

    fn grid32() -> Grid1D {
        Grid1D::new(0.0, 1.0, 32).unwrap()
    }

    #[test]
    fn locate_one_third() {
        let p = locate_interface(&grid32(), 1.0 / 3.0).unwrap();
        assert_eq!(p.j, 10);
        assert!((p.h_l - (1.0 / 3.0 - 19.0 / 64.0)).abs() < 1e-15);
        assert!((p.h_r - (23.0 / 64.0 - 1.0 / 3.0)).abs() < 1e-15);
        assert!((p.h_l + p.h_r - 2.0 * p.h).abs() < 1e-15);
    }

    #[test]
    fn locate_on_node_and_midpoint() {
        let g = grid32();
        let h = g.h();
        let p = locate_interface(&g, 10.0 / 32.0).unwrap();
        assert_eq!(p.j, 10);
        assert!((p.h_l - h / 2.0).abs() < 1e-16);
        assert!((p.h_r - 1.5 * h).abs() < 1e-16);
        let p = locate_interface(&g, 10.5 / 32.0).unwrap();
        assert_eq!(p.j, 10);
        assert!((p.h_l - h).abs() < 1e-15 && (p.h_r - h).abs() < 1e-15);
        assert!(locate_interface(&g, 1.0).is_err());
        assert!(locate_interface(&g, -0.1).is_err());
    }

    #[test]
    fn corrections() {
        let g = Grid1D::new(0.0, 1.0, 10).unwrap();
        let pair = locate_interface(&g, 0.35).unwrap();
        let bar = interface_average(1.0, 2.0, pair.x_j, pair.x_j1, 0.35).unwrap();
        assert_eq!(correction_terms(&pair, bar, 1.0, 2.0, JumpValues::ZERO), (0.0, 0.0));

        // hand evaluation: h = 0.1, alpha midway between 0.3 and 0.4,
        // bar = 1/(0.05/0.2 + 0.05/0.1) = 4/3, h_l = h_r = 0.1
        let jumps = JumpValues {
            jump_u: 1.0,
            jump_flux: 1.0,
        };
        let (cj, cj1) = correction_terms(&pair, bar, 1.0, 2.0, jumps);
        assert!((bar - 4.0 / 3.0).abs() < 1e-14);
        assert!((cj - (4.0 / 3.0) / 0.01 * (1.0 + 0.5 * 0.05)).abs() < 1e-10, "{cj}");
        assert!((cj1 + (4.0 / 3.0) / 0.01 * (1.0 - 0.05)).abs() < 1e-10, "{cj1}");

        // solution jump only: C_j = bar/(h_l h) * 2W/(β- + β+)
        let w = 0.7;
        let jumps = JumpValues {
            jump_u: 2.0 * w / 3.0,
            jump_flux: 0.0,
        };
        let (cj, _) = correction_terms(&pair, bar, 1.0, 2.0, jumps);
        assert!((cj - bar / (pair.h_l * pair.h) * 2.0 * w / 3.0).abs() < 1e-12);
    }

    fn constant_problem(bm: f64, bp: f64, alpha: f64, jumps: JumpSpec, ua: f64, ub: f64) -> InterfaceProblem1D {
        InterfaceProblem1D {
            a: 0.0,
            b: 1.0,
            alpha,
            beta: PiecewiseField::constant(bm, bp, alpha),
            sigma: PiecewiseField::constant(0.0, 0.0, alpha),
            source: PiecewiseField::constant(0.0, 0.0, alpha),
            jumps,
            dirichlet: (ua, ub),
        }
    }

    #[test]
    fn laplacian_rows() {
        // alpha at a cell midpoint gives h_l = h_r = h
        let p = constant_problem(1.0, 1.0, 0.4375, JumpSpec::homogeneous(), 0.0, 0.0);
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let s = assemble1d(&p, &g, Method::Improved, &SolveOptions::default()).unwrap();
        let h2 = g.h() * g.h();
        for r in 0..7 {
            assert!((s.diag[r] + 2.0 / h2).abs() < 1e-12);
            if r > 0 {
                assert!((s.lower[r] - 1.0 / h2).abs() < 1e-12);
            }
            if r < 6 {
                assert!((s.upper[r] - 1.0 / h2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetrized_matrix_is_symmetric() {
        let params = Params::new();
        let p = InterfaceProblem1D {
            beta: PiecewiseField::parse("beta", "1 + x^2", "log(2 + x)", 0.3, &params).unwrap(),
            sigma: PiecewiseField::parse("sigma", "x", "x", 0.3, &params).unwrap(),
            ..constant_problem(1.0, 1.0, 0.3, JumpSpec::constant(0.4, -1.0), 0.0, 1.0)
        };
        let opts = SolveOptions::default();
        let sym = assemble1d(&p, &grid32(), Method::Improved, &opts.symmetrized()).unwrap();
        assert!(sym.asymmetry() < 1e-14);
        let plain = assemble1d(&p, &grid32(), Method::Improved, &opts).unwrap();
        assert!(plain.asymmetry() > 1e-6);
        let a = thomas_solve(&sym).unwrap();
        let b = thomas_solve(&plain).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn piecewise_linear_reproduced() {
        // slopes 2 (left) and 5 (right), solution jump 0.5
        let (bm, bp, alpha) = (3.0, 1.5, 0.41);
        let ul = |x: f64| 1.0 + 2.0 * x;
        let ur = |x: f64| ul(alpha) + 0.5 + 5.0 * (x - alpha);
        let flux_jump = bp * 5.0 - bm * 2.0;
        let p = constant_problem(bm, bp, alpha, JumpSpec::constant(0.5, flux_jump), ul(0.0), ur(1.0));
        for n in [8, 13, 32, 77] {
            let s = solve1d(&p, n, Method::Improved, &SolveOptions::default()).unwrap();
            for (x, u) in s.points() {
                let exact = if x <= alpha { ul(x) } else { ur(x) };
                assert!((u - exact).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn regular_rows_coincide_across_methods() {
        let params = Params::new();
        let beta = PiecewiseField::parse("beta", "1 + x^2", "1 + x^2", 0.43, &params).unwrap();
        let p = InterfaceProblem1D {
            beta,
            ..constant_problem(1.0, 1.0, 0.43, JumpSpec::homogeneous(), 0.0, 0.0)
        };
        let g = grid32();
        let opts = SolveOptions {
            averaging: AveragingPolicy::integral(),
            ..SolveOptions::default()
        };
        let imp = assemble1d(&p, &g, Method::Improved, &opts).unwrap();
        let cls = assemble1d(&p, &g, Method::Classical, &opts).unwrap();
        let pair = locate_interface(&g, 0.43).unwrap();
        for r in 0..imp.len() {
            let i = r + 1;
            if i + 1 >= pair.j && i <= pair.j + 2 {
                continue;
            }
            assert_eq!(imp.diag[r], cls.diag[r]);
            assert_eq!(imp.lower[r], cls.lower[r]);
            assert_eq!(imp.upper[r], cls.upper[r]);
            assert_eq!(imp.rhs[r], cls.rhs[r]);
        }
    }

    #[test]
    fn too_coarse_and_invalid() {
        let p = constant_problem(1.0, 1.0, 0.5, JumpSpec::homogeneous(), 0.0, 0.0);
        let g = Grid1D::new(0.0, 1.0, 3).unwrap();
        assert!(matches!(
            assemble1d(&p, &g, Method::Improved, &SolveOptions::default()),
            Err(SolveError::GridTooCoarse { .. })
        ));
        let bad = constant_problem(-1.0, 1.0, 0.5, JumpSpec::homogeneous(), 0.0, 0.0);
        assert!(matches!(
            solve1d(&bad, 16, Method::Improved, &SolveOptions::default()),
            Err(SolveError::Validation(_))
        ));
    }
}
