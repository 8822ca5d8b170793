//! Expanding self-coverings of the circle `T(x) = ∫_0^x f mod 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::expr::Expr;
use super::quadrature::{integrate, QUAD_TOL};
use crate::error::{Error, Result};

/// Allowed distance of `∫_0^1 f` from the nearest integer.
pub const DEGREE_TOL: f64 = 1e-10;
/// Tolerance of [`circle_inverse_branch`].
pub const BRANCH_TOL: f64 = 1e-12;
/// Grid used to estimate the extrema of `f`.
const SAMPLE_POINTS: usize = 4096;

#[derive(Debug, Clone)]
pub struct CircleMap {
    source: String,
    expr: Expr,
    degree: usize,
    min_f: f64,
    max_f: f64,
    warnings: Vec<String>,
}

impl CircleMap {
    /// Parses and validates a weight: `f > 0`, `f(0) = f(1)` and
    /// `∫_0^1 f` an integer `n >= 2`.
    pub fn parse(source: &str) -> Result<Self> {
        let expr = Expr::parse(source)?;
        let f = |t: f64| expr.eval(t);
        let (f0, f1) = (f(0.0), f(1.0));
        if (f0 - f1).abs() > 1e-12 * f0.abs().max(1.0) {
            return Err(Error::InvalidCircleMap(format!("f(0) = {f0} differs from f(1) = {f1}")));
        }
        let samples: Vec<f64> = (0..=SAMPLE_POINTS).map(|i| f(i as f64 / SAMPLE_POINTS as f64)).collect();
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCircleMap("f is not finite on [0, 1]".into()));
        }
        let min_f = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max_f = samples.iter().copied().fold(0.0, f64::max);
        if min_f <= 0.0 {
            return Err(Error::InvalidCircleMap(format!("f is not positive (min {min_f})")));
        }
        let total = integrate(f, 0.0, 1.0, QUAD_TOL)?;
        let n = total.round();
        if (total - n).abs() > DEGREE_TOL || n < 2.0 {
            return Err(Error::InvalidCircleMap(format!(
                "∫_0^1 f = {total} is not an integer >= 2"
            )));
        }
        let mut warnings = Vec::new();
        if min_f <= 1.0 {
            warnings.push(format!(
                "min f = {min_f} <= 1: log f is not positive, uniqueness of the KMS state is not guaranteed"
            ));
        }
        Ok(CircleMap { source: source.to_string(), expr, degree: n as usize, min_f, max_f, warnings })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Sampled minimum of `f`.
    pub fn min_f(&self) -> f64 {
        self.min_f
    }

    pub fn max_f(&self) -> f64 {
        self.max_f
    }

    pub fn is_constant(&self) -> bool {
        self.expr.is_constant()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// The weight, extended periodically to the real line.
    pub fn f(&self, t: f64) -> f64 {
        self.expr.eval(t.rem_euclid(1.0))
    }

    /// `φ = log f`.
    pub fn phi(&self, t: f64) -> f64 {
        self.f(t).ln()
    }

    /// `∫_a^b f` of the periodic extension.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        integrate(|t| self.f(t), a, b, QUAD_TOL)
    }

    /// The increasing lift `F(x) = ∫_0^x f` on the real line, with
    /// `F(x + 1) = F(x) + n`.
    pub fn lift(&self, x: f64) -> Result<f64> {
        let k = x.floor();
        Ok(k * self.degree as f64 + self.integral(0.0, x - k)?)
    }

    /// Solves `F(x) = target` on `[lo, hi]` by bisection.
    fn invert_lift(&self, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
        let mut lo_val = self.lift(lo)?;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let mid_val = lo_val + self.integral(lo, mid)?;
            if mid_val < target {
                lo = mid;
                lo_val = mid_val;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Circle distance on `R/Z`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// `T(x) = F(x) mod 1`.
pub fn circle_t(c: &CircleMap, x: f64) -> Result<f64> {
    Ok(c.lift(x)?.rem_euclid(1.0))
}

/// The preimage of `y` on the `branch`-th monotone lap `[x_b, x_{b+1})`,
/// where `F(x_b) = b`.
pub fn circle_inverse_branch(c: &CircleMap, y: f64, branch: usize) -> Result<f64> {
    if branch >= c.degree {
        return Err(Error::BadBranch { branch, degree: c.degree });
    }
    let target = y.rem_euclid(1.0) + branch as f64;
    c.invert_lift(target, 0.0, 1.0, BRANCH_TOL)
}

/// `ρ(Tx, T(x+h)) / h`; tends to `f(x)` as `h -> 0`.
pub fn circle_local_scaling_probe(c: &CircleMap, x: f64, h: f64) -> Result<f64> {
    let image = c.integral(x, x + h)?;
    Ok(circle_distance(0.0, image) / circle_distance(x, x + h))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSweep {
    pub x: f64,
    pub f_x: f64,
    pub steps: Vec<f64>,
    pub probes: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log h`; `None` when the
    /// probe is exact at every step.
    pub observed_order: Option<f64>,
}

/// Runs the scaling probe at each step size and fits the convergence order.
pub fn circle_scaling_sweep(c: &CircleMap, x: f64, steps: &[f64]) -> Result<ScalingSweep> {
    let f_x = c.f(x);
    let probes = steps.iter().map(|&h| circle_local_scaling_probe(c, x, h)).collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = probes.iter().map(|p| (p - f_x).abs()).collect();
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(&errors)
        .filter(|(_, &e)| e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    let observed_order = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(ScalingSweep { x, f_x, steps: steps.to_vec(), probes, errors, observed_order })
}

/// `|μ(U) - ∫_{TU} f(T|_U^{-1} u)^{-β} du|` for Lebesgue `μ` and the section
/// `U = (a, b)`.
///
/// At `β = 1` this is the change of variables `u = F(x)` and vanishes.
pub fn circle_quasi_invariance(c: &CircleMap, a: f64, b: f64, beta: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::NotASection { a, b });
    }
    let (fa, fb) = (c.lift(a)?, c.lift(b)?);
    if fb - fa >= 1.0 {
        return Err(Error::NotASection { a, b });
    }
    let integrand = |u: f64| -> f64 {
        match c.invert_lift(u, a, b, 0.0) {
            Ok(x) => c.f(x).powf(-beta),
            Err(_) => f64::NAN,
        }
    };
    let image_measure = integrate(integrand, fa, fb, QUAD_TOL)?;
    Ok(((b - a) - image_measure).abs())
}

/// `count` random sections `(a, b)` with `a ∈ [0, 1)` and image length in
/// `[0.05, 0.9]`.
pub fn random_sections(c: &CircleMap, count: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: f64 = rng.random_range(0.0..1.0);
            let len: f64 = rng.random_range(0.05..0.9);
            let fa = c.lift(a)?;
            let b = c.invert_lift(fa + len, a, a + 1.0, BRANCH_TOL)?;
            Ok((a, b))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine() -> CircleMap {
        CircleMap::parse("2 + 0.5*sin(2*pi*t)").unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(CircleMap::parse("3").unwrap().degree(), 3);
        assert!(CircleMap::parse("1").is_err());
        assert!(CircleMap::parse("2.5").is_err());
        assert!(CircleMap::parse("2 + t").is_err());
        assert!(CircleMap::parse("2 + 3*sin(2*pi*t)").is_err());
        assert!(sine().warnings().is_empty());
        let low = CircleMap::parse("2 + 1.5*cos(2*pi*t)").unwrap();
        assert_eq!(low.warnings().len(), 1);
    }

    #[test]
    fn constant_map_is_multiplication() {
        let c = CircleMap::parse("3").unwrap();
        for x in [0.0, 0.1, 0.45, 0.99] {
            assert!(circle_distance(circle_t(&c, x).unwrap(), 3.0 * x) < 1e-14);
        }
        assert!(circle_distance(circle_t(&c, 1.0 - 1e-12).unwrap(), 0.0) < 1e-10);
    }

    #[test]
    fn sine_map_matches_antiderivative() {
        let c = sine();
        let closed = |x: f64| 2.0 * x + 0.5 * (1.0 - (2.0 * PI * x).cos()) / (2.0 * PI);
        for x in [0.0, 0.13, 0.5, 0.77, 0.999] {
            assert!(circle_distance(circle_t(&c, x).unwrap(), closed(x)) < 1e-10);
        }
    }

    #[test]
    fn branches() {
        let c = CircleMap::parse("2").unwrap();
        assert!((circle_inverse_branch(&c, 0.5, 0).unwrap() - 0.25).abs() < 1e-12);
        assert!((circle_inverse_branch(&c, 0.5, 1).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(circle_inverse_branch(&c, 0.5, 2), Err(Error::BadBranch { branch: 2, degree: 2 }));
        let s = sine();
        for y in [0.05, 0.4, 0.93] {
            let xs: Vec<f64> = (0..2).map(|b| circle_inverse_branch(&s, y, b).unwrap()).collect();
            assert!(xs[0] < xs[1]);
            for x in xs {
                assert!(circle_distance(circle_t(&s, x).unwrap(), y) < 1e-10);
            }
        }
    }

    #[test]
    fn scaling_probe() {
        let c = CircleMap::parse("3").unwrap();
        assert!((circle_local_scaling_probe(&c, 0.2, 1e-4).unwrap() - 3.0).abs() < 1e-9);
        let s = sine();
        let p = circle_local_scaling_probe(&s, 0.3, 1e-5).unwrap();
        assert!((p - s.f(0.3)).abs() < 1e-3);
        let sweep = circle_scaling_sweep(&s, 0.3, &[1e-2, 1e-3, 1e-4]).unwrap();
        let order = sweep.observed_order.unwrap();
        assert!((order - 1.0).abs() < 0.1, "{order}");
        assert!(sweep.errors.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn quasi_invariance() {
        let c = CircleMap::parse("3").unwrap();
        assert!(circle_quasi_invariance(&c, 0.0, 0.1, 1.0).unwrap() < 1e-12);
        let s = sine();
        assert!(circle_quasi_invariance(&s, 0.2, 0.3, 1.0).unwrap() < 1e-6);
        assert!(circle_quasi_invariance(&s, 0.2, 0.3, 2.0).unwrap() > 1e-3);
        assert!(matches!(circle_quasi_invariance(&s, 0.3, 0.2, 1.0), Err(Error::NotASection { .. })));
        assert!(matches!(circle_quasi_invariance(&s, 0.1, 0.7, 1.0), Err(Error::NotASection { .. })));
    }

    #[test]
    fn random_sections_are_sections() {
        let s = sine();
        let secs = random_sections(&s, 5, 7).unwrap();
        assert_eq!(secs, random_sections(&s, 5, 7).unwrap());
        for (a, b) in secs {
            let len = s.lift(b).unwrap() - s.lift(a).unwrap();
            assert!(a < b && len < 0.95 && len > 0.04);
        }
    }
}
