//! The dense convolution *-algebra of the Deaconu-Renault groupoid of the
//! shift, spanned by cylinder bisections, with the dynamics `α^{c_φ}`, the
//! state `ω_μ` and a numerical KMS check.
//!
//! The bisection `(σ, τ)` is the compact open set
//! `{(σx, |σ| - |τ|, τx) : x ∈ vE^∞}` where `v = s(σ) = s(τ)`. Its indicator
//! plays the role of `S_σ S_τ*` in the graph algebra. Empty words are tied to
//! an explicit vertex, so `(ε_v, ε_v)` is the projection onto `vE^∞`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::CylinderMeasure;
use crate::par::{self, Execution};
use crate::potential::{PrincipalityReport, Potential};
use crate::shift::{Graph, VertexId, Word};

/// Coefficients smaller than this are dropped after arithmetic.
pub const PRUNE_TOL: f64 = 1e-15;
/// Offset of the negative-control temperatures in [`kms_verify_suite`].
pub const CONTROL_OFFSET: f64 = 0.5;
/// Longest period inspected by the principality check of the KMS report.
pub const PRINCIPALITY_MAX_PERIOD: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bisection {
    /// σ: the range side, `r(γ) = σx`.
    pub range_word: Word,
    /// τ: the source side, `s(γ) = τx`.
    pub source_word: Word,
    /// The common vertex `s(σ) = s(τ)` where the tail `x` starts.
    pub vertex: VertexId,
}

fn start_vertex(graph: &Graph, word: &[usize], vertex: VertexId) -> VertexId {
    word.first().map_or(vertex, |&e| graph.range(e))
}

fn end_vertex(graph: &Graph, word: &[usize]) -> Option<VertexId> {
    word.last().map(|&e| graph.source(e))
}

impl Bisection {
    /// `(σ, τ)` with at least one nonempty word; the vertex is inferred.
    pub fn new(graph: &Graph, range_word: Word, source_word: Word) -> Result<Self> {
        let v = end_vertex(graph, &range_word)
            .or_else(|| end_vertex(graph, &source_word))
            .ok_or(Error::BadBisection)?;
        Bisection::at_vertex(graph, range_word, source_word, v)
    }

    /// `(σ, τ)` at an explicit vertex, needed when both words are empty.
    pub fn at_vertex(graph: &Graph, range_word: Word, source_word: Word, vertex: VertexId) -> Result<Self> {
        graph.check_word(&range_word)?;
        graph.check_word(&source_word)?;
        if vertex >= graph.num_vertices() {
            return Err(Error::BadBisection);
        }
        for w in [&range_word, &source_word] {
            if end_vertex(graph, w).is_some_and(|s| s != vertex) {
                return Err(Error::BadBisection);
            }
        }
        Ok(Bisection { range_word, source_word, vertex })
    }

    /// `|σ| - |τ|`, the lag carried by every element of the bisection.
    pub fn lag(&self) -> isize {
        self.range_word.len() as isize - self.source_word.len() as isize
    }

    pub fn is_diagonal(&self) -> bool {
        self.range_word == self.source_word
    }

    pub fn adjoint(&self) -> Bisection {
        Bisection {
            range_word: self.source_word.clone(),
            source_word: self.range_word.clone(),
            vertex: self.vertex,
        }
    }

    pub fn format(&self, graph: &Graph) -> String {
        let show = |w: &Word| {
            if w.is_empty() {
                format!("ε_{}", graph.vertex_name(self.vertex))
            } else {
                graph.format_word(w)
            }
        };
        format!("({}, {})", show(&self.range_word), show(&self.source_word))
    }
}

/// Product of two bisections:
/// `(σ, τ)(μ, ν) = (σμ̂, ν)` if `μ = τμ̂`, `(σ, ντ̂)` if `τ = μτ̂`, else empty.
pub fn bisection_product(graph: &Graph, a: &Bisection, b: &Bisection) -> Option<Bisection> {
    let (tau, mu) = (&a.source_word, &b.range_word);
    if start_vertex(graph, tau, a.vertex) != start_vertex(graph, mu, b.vertex) {
        return None;
    }
    if tau.len() <= mu.len() {
        if !mu.starts_with(tau) {
            return None;
        }
        let rest = &mu[tau.len()..];
        if rest.is_empty() && a.vertex != b.vertex {
            return None;
        }
        Some(Bisection {
            range_word: a.range_word.concat(rest),
            source_word: b.source_word.clone(),
            vertex: b.vertex,
        })
    } else {
        if !tau.starts_with(mu) {
            return None;
        }
        let rest = &tau[mu.len()..];
        Some(Bisection {
            range_word: a.range_word.clone(),
            source_word: b.source_word.concat(rest),
            vertex: a.vertex,
        })
    }
}

/// A finite linear combination of cylinder bisections.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    graph: Arc<Graph>,
    terms: BTreeMap<Bisection, Complex64>,
}

impl AlgebraElement {
    pub fn zero(graph: Arc<Graph>) -> Self {
        AlgebraElement { graph, terms: BTreeMap::new() }
    }

    /// `∑_v (ε_v, ε_v)`.
    pub fn unit(graph: Arc<Graph>) -> Self {
        let mut a = AlgebraElement::zero(graph.clone());
        for v in 0..graph.num_vertices() {
            a.add_term(
                Bisection { range_word: Word::empty(), source_word: Word::empty(), vertex: v },
                Complex64::new(1.0, 0.0),
            );
        }
        a
    }

    pub fn from_bisection(graph: Arc<Graph>, b: Bisection) -> Self {
        let mut a = AlgebraElement::zero(graph);
        a.add_term(b, Complex64::new(1.0, 0.0));
        a
    }

    /// The generator `S_e = (e, ε_{s(e)})`.
    pub fn generator(graph: Arc<Graph>, e: usize) -> Self {
        let b = Bisection { range_word: Word::from(vec![e]), source_word: Word::empty(), vertex: graph.source(e) };
        AlgebraElement::from_bisection(graph, b)
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Bisection, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, b: Bisection, c: Complex64) {
        let slot = self.terms.entry(b).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        if slot.norm() < PRUNE_TOL {
            self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
        }
    }

    fn prune(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
        self
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let terms = self.terms.iter().map(|(b, c)| (b.clone(), c * s)).collect();
        AlgebraElement { graph: self.graph.clone(), terms }.prune()
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<Self> {
        self.check_graph(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            *out.terms.entry(b.clone()).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(out.prune())
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest coefficient modulus.
    pub fn max_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check_graph(&self, other: &AlgebraElement) -> Result<()> {
        if Arc::ptr_eq(&self.graph, &other.graph) || self.graph == other.graph {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    /// The convolution product, extended bilinearly from [`bisection_product`].
    pub fn convolve(&self, other: &AlgebraElement) -> Result<Self> {
        self.check_graph(other)?;
        let mut terms: BTreeMap<Bisection, Complex64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(p) = bisection_product(&self.graph, a, b) {
                    *terms.entry(p).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
                }
            }
        }
        Ok(AlgebraElement { graph: self.graph.clone(), terms }.prune())
    }

    /// Rewrites every term `(σ, τ)` as `∑_w (σw, τw)` so that all source
    /// words have length at least `len`. With `len` at least the longest
    /// source word this is a canonical form: two elements are the same
    /// function on the groupoid iff their canonical forms agree.
    pub fn canonical(&self, len: usize) -> Self {
        let g = &self.graph;
        let mut terms: BTreeMap<Bisection, Complex64> = BTreeMap::new();
        for (b, c) in &self.terms {
            let extra = len.saturating_sub(b.source_word.len());
            if extra == 0 {
                *terms.entry(b.clone()).or_insert(Complex64::new(0.0, 0.0)) += c;
                continue;
            }
            for w in g.words_from_vertex(b.vertex, extra) {
                let piece = Bisection {
                    range_word: b.range_word.concat(&w),
                    source_word: b.source_word.concat(&w),
                    vertex: g.source(w[w.len() - 1]),
                };
                *terms.entry(piece).or_insert(Complex64::new(0.0, 0.0)) += c;
            }
        }
        AlgebraElement { graph: self.graph.clone(), terms }.prune()
    }

    /// Longest source word among the terms.
    pub fn max_source_len(&self) -> usize {
        self.terms.keys().map(|b| b.source_word.len()).max().unwrap_or(0)
    }

    /// `(σ, τ) ↦ (τ, σ)` with conjugated coefficients.
    pub fn adjoint(&self) -> Self {
        let terms = self.terms.iter().map(|(b, c)| (b.adjoint(), c.conj())).collect();
        AlgebraElement { graph: self.graph.clone(), terms }
    }

    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(b, c)| format!("({}){}", c, b.format(&self.graph)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Splits each bisection along all continuations of length `depth - 1` of its
/// tail, so that the cocycle is constant on every resulting piece. The element
/// is unchanged as a function on the groupoid.
pub fn refine_to_constant_cocycle(a: &AlgebraElement, potential: &Potential) -> AlgebraElement {
    let k = potential.depth();
    if k == 1 {
        return a.clone();
    }
    let g = a.graph();
    let mut out = AlgebraElement::zero(g.clone());
    for (b, c) in a.terms() {
        for w in g.words_from_vertex(b.vertex, k - 1) {
            let piece = Bisection {
                range_word: b.range_word.concat(&w),
                source_word: b.source_word.concat(&w),
                vertex: g.source(w[w.len() - 1]),
            };
            *out.terms.entry(piece).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
    }
    out.prune()
}

/// The cocycle value on a bisection, when it is constant there.
///
/// That is the case when both words are at least `depth - 1` long and end in
/// the same `depth - 1` letters: `c = ∑_{i<|σ|} φ - ∑_{i<|τ|} φ` with the
/// shared suffix cut off.
pub fn constant_cocycle(potential: &Potential, b: &Bisection) -> Option<f64> {
    let k1 = potential.depth() - 1;
    let (s, t) = (&b.range_word, &b.source_word);
    if s.len() < k1 || t.len() < k1 || s[s.len() - k1..] != t[t.len() - k1..] {
        return None;
    }
    Some(potential.word_birkhoff_sum(s, s.len() - k1) - potential.word_birkhoff_sum(t, t.len() - k1))
}

/// Pieces of `b` on which the cocycle is constant, with that constant.
fn cocycle_pieces(potential: &Potential, b: &Bisection) -> Vec<(Bisection, f64)> {
    if let Some(c) = constant_cocycle(potential, b) {
        return vec![(b.clone(), c)];
    }
    let g = potential.graph();
    let k1 = potential.depth() - 1;
    g.words_from_vertex(b.vertex, k1)
        .into_iter()
        .map(|w| {
            let piece = Bisection {
                range_word: b.range_word.concat(&w),
                source_word: b.source_word.concat(&w),
                vertex: g.source(w[w.len() - 1]),
            };
            let c = constant_cocycle(potential, &piece).expect("refined piece has constant cocycle");
            (piece, c)
        })
        .collect()
}

/// One diagonal coefficient of `E(a)`: the value on the cylinder `Z(word)`
/// (on `vE^∞` when `word` is empty).
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalTerm {
    pub word: Word,
    pub vertex: VertexId,
    pub coefficient: Complex64,
}

/// The canonical expectation onto functions on the unit space: keeps the
/// terms `(σ, σ)`. Bisections with nonzero lag, or with `σ != τ`, contain no
/// units and drop out.
pub fn conditional_expectation(a: &AlgebraElement) -> Vec<DiagonalTerm> {
    a.terms()
        .filter(|(b, _)| b.is_diagonal())
        .map(|(b, c)| DiagonalTerm { word: b.range_word.clone(), vertex: b.vertex, coefficient: *c })
        .collect()
}

fn diagonal_mass(mu: &CylinderMeasure, b: &Bisection) -> f64 {
    if b.range_word.is_empty() {
        mu.vertex_mass(b.vertex)
    } else {
        mu.cylinder_mass(&b.range_word)
    }
}

/// `ω_μ(a) = ∫ E(a) dμ`.
pub fn state_omega(mu: &CylinderMeasure, a: &AlgebraElement) -> Complex64 {
    a.terms()
        .filter(|(b, _)| b.is_diagonal())
        .map(|(b, c)| c * diagonal_mass(mu, b))
        .sum()
}

/// `α_t(a)(γ) = e^{i t c_φ(γ)} a(γ)`, for complex `t`; `t = iβ` gives the
/// analytic continuation `α_{iβ}`, which scales each piece by `e^{-β c}`.
pub fn apply_alpha(a: &AlgebraElement, potential: &Potential, t: Complex64) -> AlgebraElement {
    let mut out = AlgebraElement::zero(a.graph().clone());
    let i = Complex64::new(0.0, 1.0);
    for (b, c) in a.terms() {
        for (piece, cocycle) in cocycle_pieces(potential, b) {
            *out.terms.entry(piece).or_insert(Complex64::new(0.0, 0.0)) += c * (i * t * cocycle).exp();
        }
    }
    out.prune()
}

/// `|ω_μ(ab) - ω_μ(b α_{iβ}(a))|`.
pub fn kms_defect(
    mu: &CylinderMeasure,
    potential: &Potential,
    beta: f64,
    a: &AlgebraElement,
    b: &AlgebraElement,
) -> Result<f64> {
    let lhs = state_omega(mu, &a.convolve(b)?);
    let alpha_a = apply_alpha(a, potential, Complex64::new(0.0, beta));
    let rhs = state_omega(mu, &b.convolve(&alpha_a)?);
    Ok((lhs - rhs).norm())
}

/// Every bisection `(σ, τ)` with `|σ|, |τ| <= depth`, empty words included.
pub fn bisections_up_to(graph: &Graph, depth: usize) -> Vec<Bisection> {
    let mut by_vertex: Vec<Vec<Word>> = vec![vec![Word::empty()]; graph.num_vertices()];
    for len in 1..=depth {
        for w in graph.enumerate_cylinders(len) {
            by_vertex[graph.source(w[len - 1])].push(w);
        }
    }
    let mut out = Vec::new();
    for (v, words) in by_vertex.iter().enumerate() {
        for s in words {
            for t in words {
                out.push(Bisection { range_word: s.clone(), source_word: t.clone(), vertex: v });
            }
        }
    }
    out
}

/// A single bisection with its `α_{iβ}` pieces precomputed for several β.
struct Prepared {
    bisection: Bisection,
    /// Per temperature: pieces and their scalar `e^{-β c}`.
    alpha: Vec<Vec<(Bisection, f64)>>,
}

fn omega_of_product(graph: &Graph, mu: &CylinderMeasure, a: &Bisection, b: &Bisection) -> f64 {
    match bisection_product(graph, a, b) {
        Some(p) if p.is_diagonal() => diagonal_mass(mu, &p),
        _ => 0.0,
    }
}

/// KMS defect of a pair of single bisections, at each prepared temperature.
fn pair_defects(graph: &Graph, mu: &CylinderMeasure, a: &Prepared, b: &Bisection, out: &mut [f64]) {
    let lhs = omega_of_product(graph, mu, &a.bisection, b);
    for (slot, pieces) in out.iter_mut().zip(&a.alpha) {
        let rhs: f64 = pieces.iter().map(|(p, s)| s * omega_of_product(graph, mu, b, p)).sum();
        *slot = (lhs - rhs).abs();
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KmsControls {
    /// Largest defect with the dynamics evaluated at `β - offset`.
    pub beta_minus: f64,
    /// Largest defect with the dynamics evaluated at `β + offset`.
    pub beta_plus: f64,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KmsReport {
    pub beta: f64,
    pub depth: usize,
    pub tol: f64,
    pub pair_count: usize,
    pub max_defect: f64,
    pub worst_pair: Option<(String, String)>,
    pub passed: bool,
    pub controls: KmsControls,
    pub principal: bool,
    pub principality: PrincipalityReport,
    /// Uniqueness cannot be certified numerically; this records whether the
    /// sweep is consistent with it.
    pub uniqueness: String,
}

/// Sweeps `|ω(ab) - ω(b α_{iβ}(a))|` over all pairs of bisections with word
/// lengths up to `depth`, at `β` and at the control temperatures `β ± 0.5`.
pub fn kms_verify_suite(
    mu: &CylinderMeasure,
    potential: &Potential,
    beta: f64,
    depth: usize,
    tol: f64,
    exec: Execution,
) -> KmsReport {
    let graph = potential.graph();
    let betas = [beta, beta - CONTROL_OFFSET, beta + CONTROL_OFFSET];
    let prepared: Vec<Prepared> = bisections_up_to(graph, depth)
        .into_iter()
        .map(|b| {
            let pieces = cocycle_pieces(potential, &b);
            let alpha = betas
                .iter()
                .map(|bt| pieces.iter().map(|(p, c)| (p.clone(), (-bt * c).exp())).collect())
                .collect();
            Prepared { bisection: b, alpha }
        })
        .collect();
    let n = prepared.len();

    // For each `a`, the worst `b` at every temperature.
    let rows: Vec<[(f64, usize); 3]> = par::map(&prepared, exec, |a| {
        let mut best = [(0.0f64, 0usize); 3];
        let mut buf = [0.0; 3];
        for (j, b) in prepared.iter().enumerate() {
            pair_defects(graph, mu, a, &b.bisection, &mut buf);
            for t in 0..3 {
                if buf[t] > best[t].0 || buf[t].is_nan() {
                    best[t] = (buf[t], j);
                }
            }
        }
        best
    });
    let column = |t: usize| {
        par::max_by(&rows, Execution::Sequential, |r| r[t].0)
            .map(|(i, v)| (i, rows[i][t].1, v))
            .unwrap_or((0, 0, 0.0))
    };
    let (ai, bi, max_defect) = column(0);
    let principality = potential.principality_check(PRINCIPALITY_MAX_PERIOD);
    let passed = max_defect <= tol;
    let uniqueness = match (passed, principality.passed) {
        (true, true) => "consistent with uniqueness (principality check passed)",
        (true, false) => "KMS condition holds on the sweep; principality fails, uniqueness not indicated",
        (false, _) => "KMS condition fails on the sweep",
    };
    KmsReport {
        beta,
        depth,
        tol,
        pair_count: n * n,
        max_defect,
        worst_pair: (n > 0).then(|| {
            (prepared[ai].bisection.format(graph), prepared[bi].bisection.format(graph))
        }),
        passed,
        controls: KmsControls {
            beta_minus: column(1).2,
            beta_plus: column(2).2,
            offset: CONTROL_OFFSET,
        },
        principal: principality.passed,
        principality,
        uniqueness: uniqueness.to_string(),
    }
}
