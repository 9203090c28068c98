//! Truncation errors, error norms and grid-refinement studies.

use std::fmt::Write as _;

use crate::error::SolveError;
use crate::exec;
use crate::expr::{EvalError, Point};
use crate::fd1d::{assemble1d, locate_interface, solve1d, Grid1D, Solution1D};
use crate::fd2d::{solve_problem_2d, Solution2D};
use crate::options::{Method, SolveOptions};
use crate::problem::{InterfaceProblem, ManufacturedCase, PiecewiseField};

/// Local truncation errors `T_i = (A u)_i - F_i` on the unscaled rows.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationReport {
    pub grid: Grid1D,
    /// `T_i` for the interior nodes `i = 1..N`; entry `r` belongs to node `r + 1`.
    pub values: Vec<f64>,
    pub j: usize,
    pub t_j: f64,
    pub t_j1: f64,
    pub h_l: f64,
    pub h_r: f64,
}

impl TruncationReport {
    pub fn at(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    /// `|T_{j+1} + (h_l / h_r) T_j|`, small when the irregular pair cancels.
    pub fn cancellation_residual(&self) -> f64 {
        (self.t_j1 + self.h_l / self.h_r * self.t_j).abs()
    }

    /// Largest `|T_i|` away from the irregular pair.
    pub fn max_regular(&self) -> f64 {
        (1..=self.values.len())
            .filter(|&i| i != self.j && i != self.j + 1)
            .map(|i| self.at(i).abs())
            .fold(0.0, f64::max)
    }
}

fn exact_at(exact: &PiecewiseField, x: f64, y: f64) -> Result<f64, EvalError> {
    exact.at(Point::new(x, y))
}

pub fn truncation_errors(
    case: &ManufacturedCase,
    n: usize,
    method: Method,
    options: &SolveOptions,
) -> Result<TruncationReport, SolveError> {
    let InterfaceProblem::OneD(problem) = &case.problem else {
        return Err(SolveError::WrongDimension { expected: 1 });
    };
    let grid = Grid1D::new(problem.a, problem.b, n)?;
    let unscaled = SolveOptions {
        symmetrize: false,
        ..*options
    };
    let sys = assemble1d(problem, &grid, method, &unscaled)?;
    let u = (1..n)
        .map(|i| exact_at(&case.exact, grid.node(i), 0.0))
        .collect::<Result<Vec<_>, _>>()?;
    let values: Vec<f64> = sys.apply(&u).iter().zip(&sys.rhs).map(|(a, f)| a - f).collect();
    let pair = locate_interface(&grid, problem.alpha)?;
    let pick = |i: usize| if i >= 1 && i < n { values[i - 1] } else { 0.0 };
    Ok(TruncationReport {
        grid,
        j: pair.j,
        t_j: pick(pair.j),
        t_j1: pick(pair.j + 1),
        h_l: pair.h_l,
        h_r: pair.h_r,
        values,
    })
}

/// `max_i |U_i - u(x_i)|`; a node on the interface is compared with the left limit.
pub fn infinity_error(solution: &Solution1D, exact: &PiecewiseField) -> Result<f64, EvalError> {
    solution.points().try_fold(0.0, |acc: f64, (x, u)| {
        Ok(acc.max((u - exact_at(exact, x, 0.0)?).abs()))
    })
}

pub fn infinity_error_2d(solution: &Solution2D, exact: &PiecewiseField) -> Result<f64, EvalError> {
    solution.points().try_fold(0.0, |acc: f64, (x, y, u)| {
        Ok(acc.max((u - exact_at(exact, x, y)?).abs()))
    })
}

/// `log2(e_coarse / e_fine)`
pub fn order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinementRow {
    pub n: usize,
    pub error: f64,
    /// Order against the previous row.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefinementTable {
    pub rows: Vec<RefinementRow>,
}

impl RefinementTable {
    /// Builds rows and pairwise orders from `(N, error)` pairs.
    pub fn from_errors(levels: &[(usize, f64)]) -> Self {
        let rows = levels
            .iter()
            .enumerate()
            .map(|(k, &(n, error))| RefinementRow {
                n,
                error,
                order: (k > 0).then(|| order(levels[k - 1].1, error)),
            })
            .collect();
        Self { rows }
    }

    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    /// Plain mean of the pairwise orders.
    pub fn average(&self) -> Option<f64> {
        let o = self.orders();
        (!o.is_empty()).then(|| o.iter().sum::<f64>() / o.len() as f64)
    }

    /// Least-squares slope of `log E` against `log h`.
    pub fn fitted_slope(&self) -> Option<f64> {
        if self.rows.len() < 2 {
            return None;
        }
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .map(|r| (-(r.n as f64).ln(), r.error.ln()))
            .collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        Some(sxy / sxx)
    }

    /// `N,error,order` rows followed by `average,,<mean>`.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("N,error,order\n");
        for r in &self.rows {
            let o = r.order.map(|v| fixed(v, digits)).unwrap_or_default();
            let _ = writeln!(out, "{},{},{}", r.n, scientific(r.error, digits), o);
        }
        let avg = self.average().map(|v| fixed(v, digits)).unwrap_or_default();
        let _ = writeln!(out, "average,,{avg}");
        out
    }

    /// Aligned text table.
    pub fn to_text(&self, digits: usize) -> String {
        let cells: Vec<[String; 3]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.n.to_string(),
                    scientific(r.error, digits),
                    r.order.map(|v| fixed(v, digits)).unwrap_or_default(),
                ]
            })
            .chain(std::iter::once([
                "average".to_string(),
                String::new(),
                self.average().map(|v| fixed(v, digits)).unwrap_or_default(),
            ]))
            .collect();
        let header = ["N", "error", "order"];
        let width: Vec<usize> = (0..3)
            .map(|c| cells.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let mut line = |row: [&str; 3]| {
            let _ = writeln!(
                out,
                "{:>w0$}  {:>w1$}  {:>w2$}",
                row[0],
                row[1],
                row[2],
                w0 = width[0],
                w1 = width[1],
                w2 = width[2]
            );
        };
        line(header);
        for r in &cells {
            line([&r[0], &r[1], &r[2]]);
        }
        out
    }
}

/// `digits` significant digits with a signed two-digit exponent, e.g. `2.7133e-03`.
pub fn scientific(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{:.*e}", digits.max(1) - 1, v);
    let (mantissa, exp) = s.split_once('e').unwrap_or((&s, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// `digits` significant digits for values of order one.
pub fn fixed(v: f64, digits: usize) -> String {
    format!("{:.*}", digits.max(1) - 1, v)
}

/// Accepts strictly increasing levels where each doubles the previous.
pub fn check_levels(levels: &[usize]) -> Result<(), SolveError> {
    let ok = !levels.is_empty() && levels.windows(2).all(|w| w[1] == 2 * w[0]);
    if ok {
        Ok(())
    } else {
        Err(SolveError::BadLevels(levels.to_vec()))
    }
}

/// Solves `case` at every level (an `N x N` grid in 2D) and tabulates errors.
/// Levels run concurrently under parallel execution.
pub fn refinement_study(
    case: &ManufacturedCase,
    levels: &[usize],
    method: Method,
    options: &SolveOptions,
) -> Result<RefinementTable, SolveError> {
    check_levels(levels)?;
    let errors = exec::map_slice(options.execution, levels, |&n| -> Result<(usize, f64), SolveError> {
        let e = match &case.problem {
            InterfaceProblem::OneD(p) => infinity_error(&solve1d(p, n, method, options)?, &case.exact)?,
            InterfaceProblem::TwoD(p) => {
                if method == Method::Classical {
                    return Err(SolveError::WrongDimension { expected: 1 });
                }
                infinity_error_2d(&solve_problem_2d(p, n, n, options)?, &case.exact)?
            }
        };
        Ok((n, e))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(RefinementTable::from_errors(&errors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Params;
    use crate::problem::catalog_case;

    fn params(kv: &[(&str, f64)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn ex1() -> ManufacturedCase {
        catalog_case("ex1", &params(&[("k1", 5.0), ("k2", 3.0), ("alpha", 1.0 / 3.0)])).unwrap()
    }

    #[test]
    fn exact_orders() {
        let t = RefinementTable::from_errors(&[(8, 1.0), (16, 0.25), (32, 0.0625)]);
        assert_eq!(t.orders(), vec![2.0, 2.0]);
        assert_eq!(t.average(), Some(2.0));
        assert!((t.fitted_slope().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let t = RefinementTable::from_errors(&[(32, 2.7133e-3), (64, 6.1e-4)]);
        let csv = t.to_csv(5);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "N,error,order");
        assert_eq!(lines[1], "32,2.7133e-03,");
        assert!(lines[2].starts_with("64,6.1000e-04,2.15"));
        assert!(lines[3].starts_with("average,,2.15"));
        let full = t.to_csv(17);
        let v: f64 = full.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 2.7133e-3);
    }

    #[test]
    fn scientific_format() {
        assert_eq!(scientific(1.0953e-5, 5), "1.0953e-05");
        assert_eq!(scientific(123.0, 3), "1.23e+02");
        assert_eq!(scientific(0.0, 2), "0.0e+00");
    }

    #[test]
    fn levels_must_double() {
        assert!(check_levels(&[32, 64, 128]).is_ok());
        assert!(check_levels(&[32, 64, 100]).is_err());
        assert!(check_levels(&[]).is_err());
    }

    #[test]
    fn exact_solution_has_zero_error() {
        let case = ex1();
        let InterfaceProblem::OneD(p) = &case.problem else { unreachable!() };
        let grid = Grid1D::new(p.a, p.b, 16).unwrap();
        let values = grid.nodes().map(|x| case.exact.at(Point::on_line(x)).unwrap()).collect();
        let sol = Solution1D { grid, values };
        assert_eq!(infinity_error(&sol, &case.exact).unwrap(), 0.0);
    }

    #[test]
    fn ex1_truncation_pair() {
        let r = truncation_errors(&ex1(), 32, Method::Improved, &SolveOptions::default()).unwrap();
        assert_eq!(r.j, 10);
        assert!((r.t_j - 4.5144).abs() < 1e-3 * 4.5144, "{}", r.t_j);
        assert!((r.t_j1 + 6.2990).abs() < 1e-3 * 6.2990, "{}", r.t_j1);
        let predicted = -(r.h_l / r.h_r) * r.t_j;
        assert!((predicted - r.t_j1).abs() < 0.02 * r.t_j1.abs());
    }

    #[test]
    fn regular_truncation_is_second_order() {
        let case = ex1();
        let a = truncation_errors(&case, 64, Method::Improved, &SolveOptions::default()).unwrap();
        let b = truncation_errors(&case, 128, Method::Improved, &SolveOptions::default()).unwrap();
        let ratio = a.max_regular() / b.max_regular();
        assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn ex1_errors_and_determinism() {
        let case = ex1();
        let par = refinement_study(&case, &[32, 64, 128], Method::Improved, &SolveOptions::default()).unwrap();
        let seq = refinement_study(
            &case,
            &[32, 64, 128],
            Method::Improved,
            &SolveOptions::default().sequential(),
        )
        .unwrap();
        assert_eq!(par, seq);
        assert!((par.rows[0].error - 2.7133e-3).abs() < 1e-2 * 2.7133e-3);
    }
}
