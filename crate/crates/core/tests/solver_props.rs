use iham::exec::Execution;
use iham::fd1d::{assemble1d, is_m_matrix, solve1d, thomas_solve, Grid1D, TridiagonalSystem};
use iham::fd2d::{assemble2d, solve2d, solve_banded, solve_problem_2d, Grid2D};
use iham::problem::{InterfaceProblem1D, InterfaceProblem2D, JumpSpec, PiecewiseField};
use iham::{Method, SolveOptions};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn constant(l: f64, r: f64, alpha: f64) -> PiecewiseField {
    PiecewiseField::constant(l, r, alpha)
}

#[test]
fn thomas_matches_dense_lu() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let n = 50;
        let mut s = TridiagonalSystem::zeros(n);
        for r in 0..n {
            if r > 0 {
                s.lower[r] = rng.random_range(-1.0..1.0);
            }
            if r + 1 < n {
                s.upper[r] = rng.random_range(-1.0..1.0);
            }
            s.diag[r] = rng.random_range(2.5..4.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            s.rhs[r] = rng.random_range(-10.0..10.0);
        }
        let dense = DMatrix::from_fn(n, n, |r, c| match c as isize - r as isize {
            -1 => s.lower[r],
            0 => s.diag[r],
            1 => s.upper[r],
            _ => 0.0,
        });
        let want = dense.lu().solve(&DVector::from_vec(s.rhs.clone())).unwrap();
        let got = thomas_solve(&s).unwrap();
        let scale = want.amax();
        for (a, b) in got.iter().zip(want.iter()) {
            assert!((a - b).abs() <= 1e-12 * scale, "{a} {b}");
        }
    }
}

#[test]
fn cg_matches_banded_on_random_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let alpha = rng.random_range(0.1..0.9);
        let (bm, bp) = (rng.random_range(0.1..100.0), rng.random_range(0.1..100.0));
        let p = InterfaceProblem2D {
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 1.0,
            alpha,
            beta: constant(bm, bp, alpha),
            sigma: constant(rng.random_range(0.0..5.0), 0.0, alpha),
            source: constant(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), alpha),
            jumps: JumpSpec::constant(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            boundary: constant(1.0, -2.0, alpha),
        };
        let g = Grid2D::for_problem(&p, 32, 32).unwrap();
        let s = assemble2d(&p, &g, &SolveOptions::default().symmetrized()).unwrap();
        let (cg, report) = solve2d(&s, 1e-13, None, Execution::Parallel).unwrap();
        assert!(report.residual <= 1e-13);
        let direct = solve_banded(&s).unwrap();
        let scale = direct.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for (a, b) in cg.iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-10 * scale, "{a} {b}");
        }
    }
}

#[test]
fn cg_reports_iteration_cap() {
    let alpha = 0.4;
    let p = InterfaceProblem2D {
        a: 0.0,
        b: 1.0,
        c: 0.0,
        d: 1.0,
        alpha,
        beta: constant(1.0, 10.0, alpha),
        sigma: constant(0.0, 0.0, alpha),
        source: constant(1.0, 1.0, alpha),
        jumps: JumpSpec::homogeneous(),
        boundary: constant(0.0, 0.0, alpha),
    };
    let opts = SolveOptions {
        max_iter: Some(3),
        ..SolveOptions::default()
    };
    let err = solve_problem_2d(&p, 32, 32, &opts).unwrap_err();
    assert!(err.is_numerical());
    assert!(matches!(err, iham::SolveError::NotConverged { iterations: 3, .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn m_matrix_and_maximum_principle(
        alpha in 0.02f64..0.98,
        bm in 0.1f64..2000.0,
        bp in 0.1f64..2000.0,
        sm in 0.0f64..50.0,
        sp in 0.0f64..50.0,
        fm in -100.0f64..0.0,
        fp in -100.0f64..0.0,
        ua in 0.0f64..2.0,
        ub in 0.0f64..2.0,
        n in 8usize..300,
        symmetrize in any::<bool>(),
    ) {
        let p = InterfaceProblem1D {
            a: 0.0,
            b: 1.0,
            alpha,
            beta: constant(bm, bp, alpha),
            sigma: constant(sm, sp, alpha),
            source: constant(fm, fp, alpha),
            jumps: JumpSpec::homogeneous(),
            dirichlet: (ua, ub),
        };
        let opts = SolveOptions { symmetrize, ..SolveOptions::default() };
        let grid = Grid1D::new(0.0, 1.0, n).unwrap();
        for method in [Method::Improved, Method::Classical] {
            let s = assemble1d(&p, &grid, method, &opts).unwrap();
            let report = is_m_matrix(&s);
            prop_assert!(report.passed(), "{report:?}");
            let sol = solve1d(&p, n, method, &opts).unwrap();
            let min = sol.values.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert!(min >= -1e-12, "{min}");
        }
    }

    #[test]
    fn piecewise_linear_exact_1d(
        alpha in 0.02f64..0.98,
        bm in 0.1f64..2000.0,
        bp in 0.1f64..2000.0,
        c0 in -5.0f64..5.0,
        sl in -5.0f64..5.0,
        jump in -3.0f64..3.0,
        n in 8usize..400,
    ) {
        // u = c0 + sl x on the left; flux continuous, so the right slope is sl bm / bp
        let sr = sl * bm / bp;
        let left = |x: f64| c0 + sl * x;
        let right = |x: f64| left(alpha) + jump + sr * (x - alpha);
        let p = InterfaceProblem1D {
            a: 0.0,
            b: 1.0,
            alpha,
            beta: constant(bm, bp, alpha),
            sigma: constant(0.0, 0.0, alpha),
            source: constant(0.0, 0.0, alpha),
            jumps: JumpSpec::constant(jump, 0.0),
            dirichlet: (left(0.0), right(1.0)),
        };
        let sol = solve1d(&p, n, Method::Improved, &SolveOptions::default()).unwrap();
        for (x, u) in sol.points() {
            let exact = if x <= alpha { left(x) } else { right(x) };
            prop_assert!((u - exact).abs() <= 1e-11 * (1.0 + exact.abs()), "{x}: {u} {exact}");
        }
    }

    #[test]
    fn piecewise_linear_exact_2d(
        alpha in 0.05f64..0.95,
        bm in 0.1f64..100.0,
        bp in 0.1f64..100.0,
        sl in -3.0f64..3.0,
        ty in -3.0f64..3.0,
        jump in -2.0f64..2.0,
        m in 8usize..40,
        n in 8usize..40,
    ) {
        let sr = sl * bm / bp;
        let left = |x: f64, y: f64| sl * x + ty * y;
        let right = |x: f64, y: f64| left(alpha, y) + jump + sr * (x - alpha);
        let boundary = PiecewiseField::parse(
            "boundary",
            &format!("{sl:?} * x + {ty:?} * y"),
            &format!("{:?} + {ty:?} * y + {sr:?} * (x - {alpha:?})", sl * alpha + jump),
            alpha,
            &Default::default(),
        )
        .unwrap();
        let p = InterfaceProblem2D {
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 1.0,
            alpha,
            beta: constant(bm, bp, alpha),
            sigma: constant(0.0, 0.0, alpha),
            source: constant(0.0, 0.0, alpha),
            jumps: JumpSpec::constant(jump, 0.0),
            boundary,
        };
        let opts = SolveOptions { cg_tol: 1e-14, ..SolveOptions::default() };
        let g = Grid2D::for_problem(&p, m, n).unwrap();
        let s = assemble2d(&p, &g, &opts.symmetrized()).unwrap();
        let direct = solve_banded(&s).unwrap();
        let sol = solve_problem_2d(&p, m, n, &opts).unwrap();
        for j in 1..n {
            for i in 1..m {
                let (x, y) = (g.x.node(i), g.y.node(j));
                let exact = if x <= alpha { left(x, y) } else { right(x, y) };
                let u = direct[g.index(i, j)];
                prop_assert!((u - exact).abs() <= 1e-11 * (1.0 + exact.abs()), "({x},{y}): {u} {exact}");
            }
        }
        for (x, y, u) in sol.points() {
            let exact = if x <= alpha { left(x, y) } else { right(x, y) };
            prop_assert!((u - exact).abs() <= 1e-11 * (1.0 + exact.abs()), "({x},{y}): {u} {exact}");
        }
    }
}
