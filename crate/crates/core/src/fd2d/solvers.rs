use super::SparseSystem;
use crate::error::SolveError;
use crate::exec::{self, Execution};

/// Convergence record of a conjugate-gradient run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    /// True relative residual `‖b - A x‖₂ / ‖b‖₂` of the returned iterate.
    pub residual: f64,
}

/// Default iteration cap: `20 * sqrt(unknowns)`.
pub fn default_max_iter(unknowns: usize) -> usize {
    ((20.0 * (unknowns as f64).sqrt()).ceil() as usize).max(20)
}

fn true_residual(exec: Execution, sys: &SparseSystem, x: &[f64], r: &mut [f64]) {
    sys.apply_into(exec, x, r);
    exec::for_each_chunk_mut(exec, r, |off, chunk| {
        for (k, v) in chunk.iter_mut().enumerate() {
            *v = sys.rhs[off + k] - *v;
        }
    });
}

/// Jacobi-preconditioned conjugate gradients for a symmetric system with
/// negative diagonal (the assembled operator is negative definite).
///
/// Stops when the relative residual drops to `tol`; the recurrence residual
/// is checked against a freshly computed one before returning.
pub fn solve2d(
    system: &SparseSystem,
    tol: f64,
    max_iter: Option<usize>,
    exec: Execution,
) -> Result<(Vec<f64>, CgReport), SolveError> {
    if let Some((row, col)) = system.find_asymmetry(1e-12) {
        return Err(SolveError::NotSymmetric { row, col });
    }
    let n = system.len();
    let cap = max_iter.unwrap_or_else(|| default_max_iter(n));
    let b_norm = exec::dot(exec, &system.rhs, &system.rhs).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok((
            x,
            CgReport {
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    // work with S = -A, which is positive definite
    let inv_diag: Vec<f64> = system
        .diagonal()
        .iter()
        .map(|d| if *d != 0.0 { -1.0 / d } else { 1.0 })
        .collect();
    let mut r = system.rhs.iter().map(|v| -v).collect::<Vec<f64>>();
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    let precondition = |r: &[f64], z: &mut [f64]| {
        exec::for_each_chunk_mut(exec, z, |off, chunk| {
            for (k, v) in chunk.iter_mut().enumerate() {
                *v = inv_diag[off + k] * r[off + k];
            }
        });
    };
    precondition(&r, &mut z);
    p.copy_from_slice(&z);
    let mut rz = exec::dot(exec, &r, &z);
    let mut iterations = 0;
    loop {
        let res = exec::dot(exec, &r, &r).sqrt() / b_norm;
        if res <= tol {
            // confirm against the true residual; restart from it if the
            // recurrence has drifted
            true_residual(exec, system, &x, &mut r);
            let actual = exec::dot(exec, &r, &r).sqrt() / b_norm;
            if actual <= tol {
                return Ok((
                    x,
                    CgReport {
                        iterations,
                        residual: actual,
                    },
                ));
            }
            r.iter_mut().for_each(|v| *v = -*v);
            precondition(&r, &mut z);
            p.copy_from_slice(&z);
            rz = exec::dot(exec, &r, &z);
        }
        if iterations >= cap {
            true_residual(exec, system, &x, &mut r);
            let actual = exec::dot(exec, &r, &r).sqrt() / b_norm;
            return Err(SolveError::NotConverged {
                iterations,
                residual: actual,
            });
        }
        iterations += 1;
        // q = S p = -A p
        system.apply_into(exec, &p, &mut q);
        let pq = -exec::dot(exec, &p, &q);
        if pq <= 0.0 {
            return Err(SolveError::NotConverged {
                iterations,
                residual: res,
            });
        }
        let step = rz / pq;
        exec::for_each_chunk_mut(exec, &mut x, |off, chunk| {
            for (k, v) in chunk.iter_mut().enumerate() {
                *v += step * p[off + k];
            }
        });
        exec::for_each_chunk_mut(exec, &mut r, |off, chunk| {
            for (k, v) in chunk.iter_mut().enumerate() {
                // r -= step * S p  ==  r += step * A p
                *v += step * q[off + k];
            }
        });
        precondition(&r, &mut z);
        let rz_new = exec::dot(exec, &r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        exec::for_each_chunk_mut(exec, &mut p, |off, chunk| {
            for (k, v) in chunk.iter_mut().enumerate() {
                *v = z[off + k] + beta * *v;
            }
        });
    }
}

/// Direct solve by banded LU factorization without pivoting. Intended for
/// small grids and for cross-checking [`solve2d`].
pub fn solve_banded(system: &SparseSystem) -> Result<Vec<f64>, SolveError> {
    let n = system.len();
    let bw = (0..n)
        .flat_map(|r| system.row(r).map(move |(c, _)| r.abs_diff(c)))
        .max()
        .unwrap_or(0);
    let width = 2 * bw + 1;
    // band[r][bw + c - r] = A[r][c]
    let mut band = vec![0.0; n * width];
    for r in 0..n {
        for (c, v) in system.row(r) {
            band[r * width + bw + c - r] = v;
        }
    }
    let at = |r: usize, c: usize| r * width + bw + c - r;
    for k in 0..n {
        let pivot = band[at(k, k)];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(SolveError::ZeroPivot { row: k });
        }
        let last = (k + bw).min(n - 1);
        for r in k + 1..=last {
            let factor = band[at(r, k)] / pivot;
            if factor == 0.0 {
                continue;
            }
            band[at(r, k)] = factor;
            for c in k + 1..=last {
                band[at(r, c)] -= factor * band[at(k, c)];
            }
        }
    }
    let mut y = system.rhs.clone();
    for r in 0..n {
        let first = r.saturating_sub(bw);
        let s: f64 = (first..r).map(|c| band[at(r, c)] * y[c]).sum();
        y[r] -= s;
    }
    for r in (0..n).rev() {
        let last = (r + bw).min(n - 1);
        let s: f64 = (r + 1..=last).map(|c| band[at(r, c)] * y[c]).sum();
        y[r] = (y[r] - s) / band[at(r, r)];
    }
    Ok(y)
}
