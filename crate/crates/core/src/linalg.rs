//! Perron-Frobenius kernel for small dense nonnegative matrices.

use crate::error::{Error, Result};

/// Relative spread of the Collatz-Wielandt bounds at which iteration stops.
pub const EIGEN_TOL: f64 = 1e-13;
pub const MAX_POWER_ITERATIONS: usize = 100_000;

/// Output of [`spectral_radius`].
#[derive(Debug, Clone, PartialEq)]
pub struct PerronPair {
    pub eigenvalue: f64,
    /// Strictly positive, normalized to unit sum.
    pub eigenvector: Vec<f64>,
    pub iterations: usize,
}

fn check_nonnegative_square(m: &[Vec<f64>]) -> Result<()> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err(Error::NotSquare);
    }
    if m.iter().flatten().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::NegativeEntry);
    }
    Ok(())
}

/// Vertices reachable from `start` along positive entries (row -> column).
fn reachable(m: &[Vec<f64>], start: usize, transpose: bool) -> Vec<bool> {
    let n = m.len();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            let w = if transpose { m[j][i] } else { m[i][j] };
            if w > 0.0 && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// Strong connectivity of the support graph of `m`.
pub fn is_irreducible(m: &[Vec<f64>]) -> bool {
    if m.is_empty() {
        return false;
    }
    reachable(m, 0, false).iter().all(|&b| b) && reachable(m, 0, true).iter().all(|&b| b)
}

/// Primitivity: some power of `m` is entrywise positive. Checked directly at
/// the Wielandt exponent `n² - 2n + 2`.
pub fn is_primitive(m: &[Vec<f64>]) -> bool {
    if !is_irreducible(m) {
        return false;
    }
    let n = m.len();
    let pattern: Vec<Vec<bool>> = m.iter().map(|r| r.iter().map(|&x| x > 0.0).collect()).collect();
    let exponent = n * n + 2 - 2 * n;
    let mul = |a: &[Vec<bool>], b: &[Vec<bool>]| -> Vec<Vec<bool>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect()).collect()
    };
    // square-and-multiply on the boolean pattern
    let mut result: Option<Vec<Vec<bool>>> = None;
    let mut base = pattern;
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => mul(&r, &base),
            });
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    result.is_some_and(|r| r.iter().flatten().all(|&b| b))
}

pub fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Perron eigenvalue and positive right eigenvector of an irreducible
/// nonnegative matrix.
///
/// Power iteration runs on `M + I`, which is primitive whenever `M` is
/// irreducible, so periodic matrices converge as well. Iteration stops when
/// the Collatz-Wielandt bounds `min (Mv)_i / v_i <= λ <= max (Mv)_i / v_i`
/// agree to [`EIGEN_TOL`] relative, or after [`MAX_POWER_ITERATIONS`].
pub fn spectral_radius(m: &[Vec<f64>]) -> Result<PerronPair> {
    check_nonnegative_square(m)?;
    if !is_irreducible(m) {
        return Err(Error::Reducible);
    }
    let n = m.len();
    let mut v = vec![1.0 / n as f64; n];
    // rounding can stall the spread slightly above EIGEN_TOL
    let mut best_spread = f64::INFINITY;
    let mut stalled = 0;
    for it in 1..=MAX_POWER_ITERATIONS {
        let mv = mat_vec(m, &v);
        let (lo, hi) = mv.iter().zip(&v).fold((f64::INFINITY, 0.0f64), |(lo, hi), (a, b)| {
            let q = a / b;
            (lo.min(q), hi.max(q))
        });
        let lambda = 0.5 * (lo + hi);
        let spread = (hi - lo) / hi;
        if spread < best_spread {
            best_spread = spread;
            stalled = 0;
        } else {
            stalled += 1;
        }
        let converged = spread <= EIGEN_TOL || (spread <= 1e3 * EIGEN_TOL && stalled >= 100);
        if converged {
            // one more normalization so v is consistent with lambda
            let s: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= s);
            return Ok(PerronPair { eigenvalue: lambda, eigenvector: v, iterations: it });
        }
        let mut next: Vec<f64> = mv.iter().zip(&v).map(|(a, b)| a + b).collect();
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= s);
        v = next;
    }
    Err(Error::NoConvergence(MAX_POWER_ITERATIONS))
}

/// Perron eigenvalue and positive left eigenvector (`νᵀ M = λ νᵀ`).
pub fn left_spectral_radius(m: &[Vec<f64>]) -> Result<PerronPair> {
    check_nonnegative_square(m)?;
    spectral_radius(&transpose(m))
}

/// `‖Mv - λv‖_∞`.
pub fn eigen_residual(m: &[Vec<f64>], lambda: f64, v: &[f64]) -> f64 {
    mat_vec(m, v).iter().zip(v).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max)
}
