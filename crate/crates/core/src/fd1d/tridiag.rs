use crate::error::SolveError;

/// Tridiagonal system over the interior unknowns.
///
/// Row `r` reads `lower[r] * U[r-1] + diag[r] * U[r] + upper[r] * U[r+1] = rhs[r]`;
/// `lower[0]` and `upper[n-1]` are always zero. Assembled systems follow the
/// operator sign convention: negative diagonal, positive off-diagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            rhs: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|r| {
                let mut s = self.diag[r] * x[r];
                if r > 0 {
                    s += self.lower[r] * x[r - 1];
                }
                if r + 1 < n {
                    s += self.upper[r] * x[r + 1];
                }
                s
            })
            .collect()
    }

    /// `‖A x - b‖∞ / ‖b‖∞` (or the absolute residual when `b = 0`).
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let ax = self.apply(x);
        let res = ax
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let norm = self.rhs.iter().map(|b| b.abs()).fold(0.0, f64::max);
        if norm > 0.0 {
            res / norm
        } else {
            res
        }
    }

    /// Largest `|A[r][r+1] - A[r+1][r]|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self
            .diag
            .iter()
            .chain(&self.lower)
            .chain(&self.upper)
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        let worst = (0..self.len().saturating_sub(1))
            .map(|r| (self.upper[r] - self.lower[r + 1]).abs())
            .fold(0.0, f64::max);
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }
}

/// Thomas algorithm: forward elimination and back substitution, no pivoting.
pub fn thomas_solve(system: &TridiagonalSystem) -> Result<Vec<f64>, SolveError> {
    let n = system.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (a, b, c, d) = (&system.lower, &system.diag, &system.upper, &system.rhs);
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut pivot = b[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(SolveError::ZeroPivot { row: 0 });
    }
    cp[0] = c[0] / pivot;
    dp[0] = d[0] / pivot;
    for i in 1..n {
        pivot = b[i] - a[i] * cp[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(SolveError::ZeroPivot { row: i });
        }
        cp[i] = c[i] / pivot;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / pivot;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        x[i] -= cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Outcome of [`is_m_matrix`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MMatrixReport {
    /// Negative diagonal and positive couplings.
    pub sign_pattern: bool,
    /// `|diag| >= |lower| + |upper|` in every row.
    pub weakly_dominant: bool,
    /// Rows with strict dominance.
    pub strict_rows: usize,
    /// Every neighbouring pair of unknowns is coupled in both directions.
    pub irreducible: bool,
}

impl MMatrixReport {
    pub fn passed(&self) -> bool {
        self.sign_pattern && self.weakly_dominant && self.strict_rows > 0 && self.irreducible
    }
}

/// Checks the sufficient conditions for `-A` to be a nonsingular M-matrix:
/// sign pattern, weak diagonal dominance with at least one strict row, and
/// irreducibility.
pub fn is_m_matrix(system: &TridiagonalSystem) -> MMatrixReport {
    let n = system.len();
    let mut report = MMatrixReport {
        sign_pattern: true,
        weakly_dominant: true,
        strict_rows: 0,
        irreducible: true,
    };
    for r in 0..n {
        let d = system.diag[r];
        let l = if r > 0 { system.lower[r] } else { 0.0 };
        let u = if r + 1 < n { system.upper[r] } else { 0.0 };
        if !(d < 0.0) || l < 0.0 || u < 0.0 {
            report.sign_pattern = false;
        }
        if (r > 0 && l == 0.0) || (r + 1 < n && u == 0.0) {
            report.irreducible = false;
        }
        let off = l.abs() + u.abs();
        // a few ulps of slack for rows whose diagonal was formed as -(l + u)
        if d.abs() < off * (1.0 - 4.0 * f64::EPSILON) {
            report.weakly_dominant = false;
        } else if d.abs() > off * (1.0 + 4.0 * f64::EPSILON) {
            report.strict_rows += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_system() {
        let v = [1.0, -2.0, 3.5, 0.25];
        let mut s = TridiagonalSystem::zeros(4);
        s.diag.fill(-1.0);
        s.rhs = v.iter().map(|x| -x).collect();
        assert_eq!(thomas_solve(&s).unwrap(), v.to_vec());
    }

    #[test]
    fn laplacian_is_exact_for_quadratics() {
        // u = x(1-x), u'' = -2
        let n = 16;
        let h = 1.0 / n as f64;
        let mut s = TridiagonalSystem::zeros(n - 1);
        for r in 0..n - 1 {
            s.diag[r] = -2.0 / (h * h);
            if r > 0 {
                s.lower[r] = 1.0 / (h * h);
            }
            if r + 2 < n {
                s.upper[r] = 1.0 / (h * h);
            }
            s.rhs[r] = -2.0;
        }
        let u = thomas_solve(&s).unwrap();
        for (r, v) in u.iter().enumerate() {
            let x = (r + 1) as f64 * h;
            assert!((v - x * (1.0 - x)).abs() < 1e-12);
        }
        assert!(s.relative_residual(&u) < 1e-12);
        assert!(is_m_matrix(&s).passed());
    }

    #[test]
    fn zero_pivot_detected() {
        let mut s = TridiagonalSystem::zeros(3);
        s.diag = vec![0.0, -1.0, -1.0];
        assert_eq!(thomas_solve(&s), Err(SolveError::ZeroPivot { row: 0 }));
    }

    #[test]
    fn positive_diagonal_fails_m_matrix() {
        let mut s = TridiagonalSystem::zeros(3);
        s.diag = vec![-2.0, 2.0, -2.0];
        s.lower = vec![0.0, 1.0, 1.0];
        s.upper = vec![1.0, 1.0, 0.0];
        let r = is_m_matrix(&s);
        assert!(!r.sign_pattern);
        assert!(!r.passed());
        s.diag[1] = -2.0;
        assert!(is_m_matrix(&s).passed());
        s.upper[1] = 0.0;
        assert!(!is_m_matrix(&s).irreducible);
    }
}
