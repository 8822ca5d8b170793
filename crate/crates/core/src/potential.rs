//! Locally constant potentials `f > 0` on path space (`φ = log f`), the
//! cylinder metrics `ρ_f` they induce, Birkhoff sums and cocycles, and the
//! diagnostics (local scaling, principality, Bowen) that the uniqueness
//! results rely on.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::shift::{periodic_points, EdgeId, Graph, PathPoint, VertexId, Word};

/// Birkhoff sums closer to zero than this count as vanishing.
pub const PRINCIPALITY_TOL: f64 = 1e-9;

const MAX_TABLE_LEN: usize = 1 << 22;

/// A contractive ratio list: one ratio in `(0, 1)` per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioList {
    ratios: Vec<f64>,
}

impl RatioList {
    pub fn new(graph: &Graph, ratios: Vec<f64>) -> Result<Self> {
        if ratios.len() != graph.num_edges() {
            return Err(Error::RatioCountMismatch { expected: graph.num_edges(), got: ratios.len() });
        }
        for (e, &r) in ratios.iter().enumerate() {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::RatioOutOfRange { edge: graph.edge(e).name.clone(), value: r });
            }
        }
        Ok(RatioList { ratios })
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn ratio(&self, e: EdgeId) -> f64 {
        self.ratios[e]
    }

    /// `r_σ = ∏ r_{σ_i}`.
    pub fn word_ratio(&self, letters: &[EdgeId]) -> f64 {
        letters.iter().map(|&e| self.ratios[e]).product()
    }

    /// Whether all ratios coincide; returns the common value.
    pub fn common_ratio(&self) -> Option<f64> {
        let r = self.ratios[0];
        self.ratios.iter().all(|&x| x == r).then_some(r)
    }
}

/// A strictly positive weight `f` that depends on the first `depth` letters.
#[derive(Debug, Clone)]
pub struct Potential {
    graph: Arc<Graph>,
    depth: usize,
    /// Dense table indexed by [`Graph::word_code`]; NaN marks disallowed words.
    table: Vec<f64>,
    log_table: Vec<f64>,
    vertex_weights: Option<Vec<f64>>,
}

impl Potential {
    /// Builds a depth-`depth` potential from `(word, value)` entries covering
    /// every allowed word of that length.
    pub fn from_table<I>(graph: Arc<Graph>, depth: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, f64)>,
    {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        let len = graph
            .num_edges()
            .checked_pow(depth as u32)
            .filter(|&n| n <= MAX_TABLE_LEN)
            .ok_or(Error::TableTooLarge(usize::MAX))?;
        let mut table = vec![f64::NAN; len];
        for (w, v) in entries {
            if w.len() != depth || !graph.is_allowed(&w) {
                return Err(Error::BadTableKey(graph.format_word(&w)));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonPositiveTableEntry { word: graph.format_word(&w), value: v });
            }
            table[graph.word_code(&w)] = v;
        }
        for w in graph.enumerate_cylinders(depth) {
            if table[graph.word_code(&w)].is_nan() {
                return Err(Error::MissingTableEntry(graph.format_word(&w)));
            }
        }
        let log_table = table.iter().map(|v| v.ln()).collect();
        Ok(Potential { graph, depth, table, log_table, vertex_weights: None })
    }

    /// Builds a potential by evaluating `f` on every allowed word of length `depth`.
    pub fn from_fn<F>(graph: Arc<Graph>, depth: usize, f: F) -> Result<Self>
    where
        F: Fn(&[EdgeId]) -> f64,
    {
        let entries: Vec<(Word, f64)> =
            graph.enumerate_cylinders(depth).into_iter().map(|w| { let v = f(&w); (w, v) }).collect();
        Potential::from_table(graph, depth, entries)
    }

    /// `f(x) = 1 / r_{x_0}`.
    pub fn from_ratios(graph: Arc<Graph>, ratios: &RatioList) -> Result<Self> {
        if ratios.ratios().len() != graph.num_edges() {
            return Err(Error::RatioCountMismatch {
                expected: graph.num_edges(),
                got: ratios.ratios().len(),
            });
        }
        Potential::from_fn(graph, 1, |w| 1.0 / ratios.ratio(w[0]))
    }

    pub fn constant(graph: Arc<Graph>, value: f64) -> Result<Self> {
        Potential::from_fn(graph, 1, |_| value)
    }

    /// Attaches the vertex weights `q_v` used by the graph metric.
    pub fn with_vertex_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.graph.num_vertices()
            || weights.iter().any(|q| !(q.is_finite() && *q > 0.0))
        {
            return Err(Error::BadVertexWeights);
        }
        self.vertex_weights = Some(weights);
        Ok(self)
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vertex_weights(&self) -> Option<&[f64]> {
        self.vertex_weights.as_deref()
    }

    pub fn vertex_weight(&self, v: VertexId) -> f64 {
        self.vertex_weights.as_ref().map_or(1.0, |q| q[v])
    }

    /// `f` on the cylinder of the first `depth` letters of `letters`.
    pub fn value(&self, letters: &[EdgeId]) -> f64 {
        self.table[self.graph.word_code(&letters[..self.depth])]
    }

    /// `φ = log f` on the cylinder of the first `depth` letters of `letters`.
    pub fn log_value(&self, letters: &[EdgeId]) -> f64 {
        self.log_table[self.graph.word_code(&letters[..self.depth])]
    }

    pub fn value_at(&self, x: &PathPoint) -> f64 {
        self.value(&x.prefix(self.depth))
    }

    /// Allowed table words with their values, in enumeration order.
    pub fn entries(&self) -> Vec<(Word, f64)> {
        self.graph
            .enumerate_cylinders(self.depth)
            .into_iter()
            .map(|w| {
                let v = self.value(&w);
                (w, v)
            })
            .collect()
    }

    fn defined_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.table.iter().copied().filter(|v| !v.is_nan())
    }

    /// `m = min f`.
    pub fn min_value(&self) -> f64 {
        self.defined_values().fold(f64::INFINITY, f64::min)
    }

    /// `M = max f`.
    pub fn max_value(&self) -> f64 {
        self.defined_values().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Checks `f > 1` everywhere and, with vertex weights, `f(x) > q_{s(x_0)} / q_{r(x_0)}`.
    pub fn check_metric_admissible(&self) -> Result<()> {
        for (w, v) in self.entries() {
            if v <= 1.0 {
                return Err(Error::NotMetricAdmissible(format!(
                    "f = {v} <= 1 on `{}`",
                    self.graph.format_word(&w)
                )));
            }
            if self.vertex_weights.is_some() {
                let e = w[0];
                let bound =
                    self.vertex_weight(self.graph.source(e)) / self.vertex_weight(self.graph.range(e));
                if v <= bound {
                    return Err(Error::NotMetricAdmissible(format!(
                        "f = {v} <= q_s/q_r = {bound} on `{}`",
                        self.graph.format_word(&w)
                    )));
                }
            }
        }
        Ok(())
    }

    /// `∑_{i<n} φ(σ_i σ_{i+1} ...)` for a finite word with at least `n + depth - 1` letters.
    pub fn word_birkhoff_sum(&self, letters: &[EdgeId], n: usize) -> f64 {
        debug_assert!(letters.len() + 1 >= n + self.depth);
        (0..n).map(|i| self.log_value(&letters[i..])).sum()
    }

    /// `∑_{i<n} φ(T^i x)`.
    pub fn birkhoff_sum(&self, x: &PathPoint, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let letters = x.prefix(n + self.depth - 1);
        self.word_birkhoff_sum(&letters, n)
    }

    /// `c_φ(x, m - n, y) = ∑_{i<m} φ(T^i x) - ∑_{i<n} φ(T^i y)`.
    pub fn cocycle_value(&self, x: &PathPoint, m: usize, n: usize, y: &PathPoint) -> Result<f64> {
        if x.shift_by(m) != y.shift_by(n) {
            return Err(Error::NotGroupoidElement { m, n });
        }
        Ok(self.birkhoff_sum(x, m) - self.birkhoff_sum(y, n))
    }

    /// The cylinder diameter weight
    /// `w_σ = max_{z,w ∈ Z(σ)} (∏_{i<|σ|} f(T^i z) f(T^i w))^{-1/2}`.
    ///
    /// Both products only see the first `|σ| + depth - 1` letters, so the
    /// maximum is taken over those extensions and equals `1 / min ∏ f`.
    pub fn w_sigma(&self, sigma: &[EdgeId]) -> Result<f64> {
        if sigma.is_empty() {
            return Err(Error::WordTooShort { min: 1, got: 0 });
        }
        self.graph.check_word(sigma)?;
        let n = sigma.len();
        let min_log = self
            .graph
            .extensions(sigma, n + self.depth - 1)
            .iter()
            .map(|z| self.word_birkhoff_sum(z, n))
            .fold(f64::INFINITY, f64::min);
        Ok((-min_log).exp())
    }

    /// The metric `ρ_f(x, y) = w_σ · q_{s(σ)}`, σ the longest common prefix.
    ///
    /// Points with no common first letter sit at distance
    /// `max(q_{r(x)}, q_{r(y)})`, which is 1 without vertex weights.
    pub fn rho_f(&self, x: &PathPoint, y: &PathPoint) -> Result<f64> {
        let Some(len) = x.common_prefix_len(y) else {
            return Ok(0.0);
        };
        if len == 0 {
            let qx = self.vertex_weight(x.range_vertex(&self.graph));
            let qy = self.vertex_weight(y.range_vertex(&self.graph));
            return Ok(qx.max(qy));
        }
        let sigma = x.prefix(len);
        let q = self.vertex_weight(self.graph.source(sigma[len - 1]));
        Ok(self.w_sigma(&sigma)? * q)
    }

    /// `(min, max)` of `(f(z) f(w))^{1/2}` over `z, w ∈ Z(σ)`; the local
    /// scaling ratio `ρ(Tx, Ty) / ρ(x, y) = w_{σ'} / w_σ` lies in this interval
    /// whenever σ is the longest common prefix of `x` and `y`.
    pub fn local_scaling_ratio_bounds(&self, sigma: &[EdgeId]) -> Result<(f64, f64)> {
        if sigma.len() < 2 {
            return Err(Error::WordTooShort { min: 2, got: sigma.len() });
        }
        self.graph.check_word(sigma)?;
        let exts = self.graph.extensions(sigma, sigma.len().max(self.depth));
        let (lo, hi) = exts.iter().map(|z| self.value(z)).fold(
            (f64::INFINITY, f64::NEG_INFINITY),
            |(lo, hi), v| (lo.min(v), hi.max(v)),
        );
        // sqrt(f(z) f(w)) ranges over [min f, max f]
        Ok((lo, hi))
    }

    /// Checks `φ(x) + ... + φ(T^{n-1} x) != 0` on every periodic point of least
    /// period at most `max_period`.
    pub fn principality_check(&self, max_period: usize) -> PrincipalityReport {
        let positive = self.defined_values().all(|v| v > 1.0);
        let negative = self.defined_values().all(|v| v < 1.0);
        if positive || negative {
            return PrincipalityReport {
                passed: true,
                sign_short_circuit: true,
                points_checked: 0,
                min_abs_sum: None,
                violation: None,
            };
        }
        let mut min_abs = f64::INFINITY;
        let mut checked = 0;
        for x in periodic_points(&self.graph, max_period) {
            checked += 1;
            let n = x.period().len();
            let sum = self.birkhoff_sum(&x, n);
            min_abs = min_abs.min(sum.abs());
            if sum.abs() < PRINCIPALITY_TOL {
                return PrincipalityReport {
                    passed: false,
                    sign_short_circuit: false,
                    points_checked: checked,
                    min_abs_sum: Some(sum.abs()),
                    violation: Some(PrincipalityViolation {
                        point: self.graph.format_point(&x),
                        period: n,
                        sum,
                    }),
                };
            }
        }
        PrincipalityReport {
            passed: true,
            sign_short_circuit: false,
            points_checked: checked,
            min_abs_sum: min_abs.is_finite().then_some(min_abs),
            violation: None,
        }
    }

    /// A Bowen constant `C = (depth - 1) · (max φ - min φ)`.
    pub fn bowen_constant(&self) -> f64 {
        let (lo, hi) = (self.min_value().ln(), self.max_value().ln());
        (self.depth - 1) as f64 * (hi - lo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrincipalityViolation {
    pub point: String,
    pub period: usize,
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrincipalityReport {
    pub passed: bool,
    /// True when `φ` has one strict sign, which settles the question at once.
    pub sign_short_circuit: bool,
    pub points_checked: usize,
    pub min_abs_sum: Option<f64>,
    pub violation: Option<PrincipalityViolation>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o2() -> Arc<Graph> {
        Arc::new(Graph::full_shift(2))
    }

    fn depth2(g: Arc<Graph>) -> Potential {
        let vals = [2.0, 3.0, 4.0, 5.0];
        Potential::from_fn(g, 2, |w| vals[2 * w[0] + w[1]]).unwrap()
    }

    fn ratio_potential(g: Arc<Graph>, rs: Vec<f64>) -> (RatioList, Potential) {
        let r = RatioList::new(&g, rs).unwrap();
        let p = Potential::from_ratios(g, &r).unwrap();
        (r, p)
    }

    #[test]
    fn ratio_list_validation() {
        let g = Graph::full_shift(2);
        assert!(matches!(RatioList::new(&g, vec![0.5, 1.0]), Err(Error::RatioOutOfRange { .. })));
        assert!(matches!(RatioList::new(&g, vec![0.5]), Err(Error::RatioCountMismatch { .. })));
    }

    #[test]
    fn table_validation() {
        let g = o2();
        let missing = Potential::from_table(g.clone(), 2, vec![(Word::from(vec![0, 0]), 2.0)]);
        assert!(matches!(missing, Err(Error::MissingTableEntry(_))));
        let negative = Potential::from_fn(g.clone(), 1, |_| -1.0);
        assert!(matches!(negative, Err(Error::NonPositiveTableEntry { .. })));
        let bad_key = Potential::from_table(g, 1, vec![(Word::from(vec![0, 0]), 2.0)]);
        assert!(matches!(bad_key, Err(Error::BadTableKey(_))));
    }

    #[test]
    fn birkhoff_sums() {
        let g = o2();
        let c = Potential::constant(g.clone(), 2.0).unwrap();
        let x = g.parse_point("1(12)").unwrap();
        assert_eq!(c.birkhoff_sum(&x, 0), 0.0);
        assert!((c.birkhoff_sum(&x, 5) - 5.0 * 2f64.ln()).abs() < 1e-14);

        let (r, p) = ratio_potential(g.clone(), vec![0.3, 0.6]);
        let x = g.parse_point("1221(2)").unwrap();
        let sigma = x.prefix(4);
        let expected = -r.word_ratio(&sigma).ln();
        assert!((p.birkhoff_sum(&x, 4) - expected).abs() < 1e-14);
    }

    #[test]
    fn cocycle_values() {
        let g = o2();
        let (_, p) = ratio_potential(g.clone(), vec![0.3, 0.6]);
        let y = g.parse_point("2(12)").unwrap();
        assert_eq!(p.cocycle_value(&y, 0, 0, &y).unwrap(), 0.0);
        let x = y.prepend(&g, &[0]).unwrap();
        let c = p.cocycle_value(&x, 1, 0, &y).unwrap();
        assert!((c - (-(0.3f64).ln())).abs() < 1e-15);
        assert!(matches!(p.cocycle_value(&x, 0, 0, &y), Err(Error::NotGroupoidElement { .. })));
    }

    #[test]
    fn cocycle_matches_product_formula() {
        let g = o2();
        let p = depth2(g.clone());
        let tail = g.parse_point("(12)").unwrap();
        let x = tail.prepend(&g, &[1, 0, 0]).unwrap();
        let y = tail.prepend(&g, &[0, 1]).unwrap();
        // direct product evaluation
        let fx = |i: usize| p.value(&x.prefix(i + 2)[i..]);
        let fy = |i: usize| p.value(&y.prefix(i + 2)[i..]);
        let prod_x: f64 = (0..3).map(fx).product();
        let prod_y: f64 = (0..2).map(fy).product();
        let c = p.cocycle_value(&x, 3, 2, &y).unwrap();
        assert!((c - (prod_x / prod_y).ln()).abs() < 1e-14);
    }

    #[test]
    fn w_sigma_examples() {
        let g = o2();
        let c = Potential::constant(g.clone(), 2.0).unwrap();
        assert!((c.w_sigma(&[0, 1, 1]).unwrap() - 0.125).abs() < 1e-15);

        let (r, p) = ratio_potential(g.clone(), vec![0.3, 0.6]);
        for w in g.enumerate_cylinders(4) {
            assert!((p.w_sigma(&w).unwrap() - r.word_ratio(&w)).abs() < 1e-15);
        }

        let d2 = depth2(g.clone());
        // brute force over the four extension pairs (z, w) of "1"
        let mut best: f64 = 0.0;
        for a in [2.0f64, 3.0] {
            for b in [2.0f64, 3.0] {
                best = best.max((a * b).powf(-0.5));
            }
        }
        assert!((d2.w_sigma(&[0]).unwrap() - best).abs() < 1e-15);
        assert_eq!(best, 0.5);
        assert!(d2.w_sigma(&[]).is_err());
    }

    #[test]
    fn cuntz_metric() {
        let g = o2();
        let (r, p) = ratio_potential(g.clone(), vec![0.3, 0.6]);
        let x = g.parse_point("1(2)").unwrap();
        let y = g.parse_point("2(1)").unwrap();
        assert_eq!(p.rho_f(&x, &y).unwrap(), 1.0);
        assert_eq!(p.rho_f(&x, &x).unwrap(), 0.0);
        let x = g.parse_point("121(1)").unwrap();
        let y = g.parse_point("122(1)").unwrap();
        assert!((p.rho_f(&x, &y).unwrap() - r.word_ratio(&[0, 1])).abs() < 1e-15);
    }

    #[test]
    fn local_scaling_bounds() {
        let g = o2();
        let c = Potential::constant(g.clone(), 3.0).unwrap();
        assert_eq!(c.local_scaling_ratio_bounds(&[0, 1]).unwrap(), (3.0, 3.0));
        let (_, p) = ratio_potential(g.clone(), vec![0.3, 0.6]);
        let (lo, hi) = p.local_scaling_ratio_bounds(&[1, 0, 0]).unwrap();
        assert!((lo - 1.0 / 0.6).abs() < 1e-15 && (hi - 1.0 / 0.6).abs() < 1e-15);
        assert!(p.local_scaling_ratio_bounds(&[1]).is_err());

        let d2 = depth2(g.clone());
        for sigma in g.enumerate_cylinders(2).into_iter().chain(g.enumerate_cylinders(3)) {
            let (lo, hi) = d2.local_scaling_ratio_bounds(&sigma).unwrap();
            let ratio = d2.w_sigma(&sigma[1..]).unwrap() / d2.w_sigma(&sigma).unwrap();
            assert!(lo - 1e-12 <= ratio && ratio <= hi + 1e-12, "{sigma}: {ratio} not in [{lo}, {hi}]");
        }
        assert_eq!(d2.local_scaling_ratio_bounds(&[0, 0]).unwrap(), (2.0, 2.0));
    }

    #[test]
    fn principality() {
        let g = o2();
        let two = Potential::constant(g.clone(), 2.0).unwrap();
        let r = two.principality_check(4);
        assert!(r.passed && r.sign_short_circuit);

        let one = Potential::constant(g.clone(), 1.0).unwrap();
        let r = one.principality_check(4);
        assert!(!r.passed);
        assert_eq!(r.violation.as_ref().unwrap().period, 1);

        let e = std::f64::consts::E;
        let mixed = Potential::from_fn(g.clone(), 1, |w| if w[0] == 0 { e } else { 1.0 / e }).unwrap();
        let r = mixed.principality_check(4);
        assert!(!r.passed);
        let v = r.violation.unwrap();
        assert_eq!(v.point, "(12)");
        assert_eq!(v.period, 2);
        assert!(v.sum.abs() < 1e-15);
    }

    #[test]
    fn bowen_constants() {
        let g = o2();
        assert_eq!(Potential::constant(g.clone(), 2.0).unwrap().bowen_constant(), 0.0);
        let (_, p) = ratio_potential(g.clone(), vec![0.3, 0.6]);
        assert_eq!(p.bowen_constant(), 0.0);
        let d2 = depth2(g);
        assert!((d2.bowen_constant() - (5f64.ln() - 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn metric_admissibility() {
        let g = o2();
        assert!(Potential::constant(g.clone(), 1.0).unwrap().check_metric_admissible().is_err());
        assert!(depth2(g.clone()).check_metric_admissible().is_ok());
        let golden = Arc::new(
            Graph::from_names(&["v", "w"], &[("a", "v", "w"), ("b", "w", "v"), ("c", "v", "v")])
                .unwrap(),
        );
        let p = Potential::constant(golden, 2.0).unwrap();
        // q_s / q_r for edge a (source v, range w) is 10, which 2 does not exceed
        assert!(p.clone().with_vertex_weights(vec![10.0, 1.0]).unwrap().check_metric_admissible().is_err());
        assert!(p.with_vertex_weights(vec![1.2, 1.0]).unwrap().check_metric_admissible().is_ok());
    }
}
