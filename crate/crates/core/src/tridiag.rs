//! Thomas algorithm for tridiagonal systems.

/// Solve `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]` in place;
/// the solution overwrites `rhs`. `lower[0]` and `upper[n-1]` are ignored.
///
/// No pivoting: callers supply diagonally dominant systems.
pub fn solve_in_place(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut Vec<f64>) {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n == 0 {
        return;
    }
    scratch.clear();
    scratch.resize(n, 0.0);
    let mut beta = diag[0];
    scratch[0] = upper[0] / beta;
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * scratch[i - 1];
        scratch[i] = upper[i] / beta;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_laplacian_system() {
        let n = 50;
        let lower = vec![-1.0; n];
        let upper = vec![-1.0; n];
        let diag = vec![2.5; n];
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| {
                let mut r = diag[i] * x[i];
                if i > 0 {
                    r += lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    r += upper[i] * x[i + 1];
                }
                r
            })
            .collect();
        let mut scratch = Vec::new();
        solve_in_place(&lower, &diag, &upper, &mut rhs, &mut scratch);
        for i in 0..n {
            assert!((rhs[i] - x[i]).abs() < 1e-12);
        }
    }
}
