//! Two-dimensional five-point scheme with the interface line `x = alpha`.
//!
//! Interior unknowns `(x_i, y_j)`, `1 <= i < m`, `1 <= j < n`, are numbered
//! lexicographically with `i` running fastest. The interface sits between
//! columns `k` and `k + 1`.

mod solvers;
mod sparse;

pub use solvers::{default_max_iter, solve2d, solve_banded, CgReport};
pub use sparse::SparseSystem;

use crate::averaging::interface_average;
use crate::error::SolveError;
use crate::exec;
use crate::expr::Point;
use crate::fd1d::{correction_terms, locate_interface, Grid1D, IrregularPair, MIN_CELLS};
use crate::options::SolveOptions;
use crate::problem::{validate_2d, InterfaceProblem2D};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(a: f64, b: f64, c: f64, d: f64, m: usize, n: usize) -> Result<Self, SolveError> {
        for cells in [m, n] {
            if cells < MIN_CELLS {
                return Err(SolveError::GridTooCoarse {
                    n: cells,
                    min: MIN_CELLS,
                });
            }
        }
        Ok(Self {
            x: Grid1D::new(a, b, m)?,
            y: Grid1D::new(c, d, n)?,
        })
    }

    pub fn for_problem(problem: &InterfaceProblem2D, m: usize, n: usize) -> Result<Self, SolveError> {
        Self::new(problem.a, problem.b, problem.c, problem.d, m, n)
    }

    pub fn m(&self) -> usize {
        self.x.cells()
    }

    pub fn n(&self) -> usize {
        self.y.cells()
    }

    pub fn hx(&self) -> f64 {
        self.x.h()
    }

    pub fn hy(&self) -> f64 {
        self.y.h()
    }

    pub fn unknowns(&self) -> usize {
        (self.m() - 1) * (self.n() - 1)
    }

    /// Unknown index of interior node `(i, j)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        (j - 1) * (self.m() - 1) + (i - 1)
    }

    pub fn interface_column(&self, alpha: f64) -> Result<IrregularPair, SolveError> {
        locate_interface(&self.x, alpha)
    }
}

fn interior(grid: &Grid2D, i: usize, j: usize) -> bool {
    i > 0 && i < grid.m() && j > 0 && j < grid.n()
}

/// Assembles the five-point system. Rows in columns `k` and `k + 1` carry
/// the interface average and jump corrections of row `j`.
pub fn assemble2d(
    problem: &InterfaceProblem2D,
    grid: &Grid2D,
    options: &SolveOptions,
) -> Result<SparseSystem, SolveError> {
    let violations = validate_2d(problem);
    if !violations.is_empty() {
        return Err(SolveError::Validation(violations));
    }
    let pair = grid.interface_column(problem.alpha)?;
    let (m, n) = (grid.m(), grid.n());
    let (hx, hy) = (grid.hx(), grid.hy());
    let k = pair.j;

    let blocks = exec::map_range(options.execution, n - 1, |r| -> Result<_, SolveError> {
        let j = r + 1;
        let y = grid.y.node(j);
        let (bm, bp) = problem.beta_limits(y)?;
        let bar = interface_average(bm, bp, pair.x_j, pair.x_j1, pair.alpha)?;
        let jumps = problem.jumps.values(y, bm, bp)?;
        let (c_k, c_k1) = correction_terms(&pair, bar, bm, bp, jumps);
        let mut rows = Vec::with_capacity(m - 1);
        let mut rhs = Vec::with_capacity(m - 1);
        for i in 1..m {
            let x = grid.x.node(i);
            let beta = |px: f64, py: f64| problem.beta.at(Point::new(px, py));
            let mut cl = beta(x - 0.5 * hx, y)? / (hx * hx);
            let mut cr = beta(x + 0.5 * hx, y)? / (hx * hx);
            let mut cd = beta(x, y - 0.5 * hy)? / (hy * hy);
            let mut cu = beta(x, y + 0.5 * hy)? / (hy * hy);
            let mut sigma = problem.sigma.at(Point::new(x, y))?;
            let mut f = problem.source.at(Point::new(x, y))?;
            let mut scale = 1.0;
            if i == k {
                cl = beta(x - 0.5 * hx, y)? / (hx * pair.h_l);
                cr = bar / (hx * pair.h_l);
                f += c_k;
                scale = pair.h_l / hx;
            } else if i == k + 1 {
                cl = bar / (hx * pair.h_r);
                cr = beta(x + 0.5 * hx, y)? / (hx * pair.h_r);
                f += c_k1;
                scale = pair.h_r / hx;
            }
            if options.symmetrize && scale != 1.0 {
                for c in [&mut cl, &mut cr, &mut cd, &mut cu, &mut sigma, &mut f] {
                    *c *= scale;
                }
            }
            let diag = -(cl + cr + cd + cu) - sigma;
            let mut row = Vec::with_capacity(5);
            for (ii, jj, c) in [(i, j - 1, cd), (i - 1, j, cl)] {
                if interior(grid, ii, jj) {
                    row.push((grid.index(ii, jj), c));
                } else {
                    f -= c * problem.boundary.at(Point::new(grid.x.node(ii), grid.y.node(jj)))?;
                }
            }
            row.push((grid.index(i, j), diag));
            for (ii, jj, c) in [(i + 1, j, cr), (i, j + 1, cu)] {
                if interior(grid, ii, jj) {
                    row.push((grid.index(ii, jj), c));
                } else {
                    f -= c * problem.boundary.at(Point::new(grid.x.node(ii), grid.y.node(jj)))?;
                }
            }
            rows.push(row);
            rhs.push(f);
        }
        Ok((rows, rhs))
    });

    let mut rows = Vec::with_capacity(grid.unknowns());
    let mut rhs = Vec::with_capacity(grid.unknowns());
    for block in blocks {
        let (r, f) = block?;
        rows.extend(r);
        rhs.extend(f);
    }
    Ok(SparseSystem::from_rows(rows, rhs))
}

/// Nodal values on the full grid, boundary included, row-major in `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution2D {
    pub grid: Grid2D,
    pub values: Vec<f64>,
    pub report: CgReport,
}

impl Solution2D {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * (self.grid.m() + 1) + i]
    }

    /// `(x, y, u)` for every node.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let m = self.grid.m();
        (0..=self.grid.n()).flat_map(move |j| {
            (0..=m).map(move |i| (self.grid.x.node(i), self.grid.y.node(j), self.value(i, j)))
        })
    }
}

/// Assembles the symmetrized system on an `m x n` grid, solves it by PCG and
/// fills in the boundary trace.
pub fn solve_problem_2d(
    problem: &InterfaceProblem2D,
    m: usize,
    n: usize,
    options: &SolveOptions,
) -> Result<Solution2D, SolveError> {
    let grid = Grid2D::for_problem(problem, m, n)?;
    let system = assemble2d(problem, &grid, &options.symmetrized())?;
    let (interior_values, report) = solve2d(&system, options.cg_tol, options.max_iter, options.execution)?;
    let mut values = Vec::with_capacity((m + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=m {
            let v = if interior(&grid, i, j) {
                interior_values[grid.index(i, j)]
            } else {
                problem.boundary.at(Point::new(grid.x.node(i), grid.y.node(j)))?
            };
            values.push(v);
        }
    }
    Ok(Solution2D { grid, values, report })
}
