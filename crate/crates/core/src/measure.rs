//! Cylinder measures: closed-form self-similar measures, eigenmeasures of the
//! transfer operator, quasi-invariance and Radon-Nikodym derivatives.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::left_spectral_radius;
use crate::par::{self, Execution};
use crate::potential::{Potential, RatioList};
use crate::shift::{EdgeId, Graph, PathPoint, VertexId, Word};

/// Eigenvalue distance from 1 beyond which an eigenmeasure carries a warning.
pub const EIGENVALUE_WARN_TOL: f64 = 1e-8;

/// Exact matrix of `(L_{f,β} a)(x) = ∑_{s(e) = r(x)} f(ex)^{-β} a(ex)` acting
/// on functions constant on cylinders of length `index_depth`.
///
/// Entry `(σ', τ)` is `f(eσ')^{-β}` where `τ` is the length-`index_depth`
/// prefix of `eσ'`, and 0 when no edge produces `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub beta: f64,
    pub index_depth: usize,
    pub index_words: Vec<Word>,
    pub entries: Vec<Vec<f64>>,
}

impl TransferMatrix {
    /// Applies the matrix to the coefficients of a cylinder function.
    pub fn apply(&self, coefficients: &[f64]) -> Vec<f64> {
        crate::linalg::mat_vec(&self.entries, coefficients)
    }
}

/// Index of each allowed word of a fixed length, by [`Graph::word_code`].
struct WordIndex {
    slots: Vec<usize>,
}

impl WordIndex {
    fn new(graph: &Graph, words: &[Word], depth: usize) -> Self {
        let mut slots = vec![usize::MAX; graph.num_edges().pow(depth as u32)];
        for (i, w) in words.iter().enumerate() {
            slots[graph.word_code(w)] = i;
        }
        WordIndex { slots }
    }

    fn get(&self, graph: &Graph, w: &[EdgeId]) -> usize {
        self.slots[graph.word_code(w)]
    }
}

pub fn transfer_matrix(potential: &Potential, beta: f64) -> TransferMatrix {
    let graph = potential.graph();
    let k = potential.depth();
    let d = (k - 1).max(1);
    let words = graph.enumerate_cylinders(d);
    let index = WordIndex::new(graph, &words, d);
    let n = words.len();
    let mut entries = vec![vec![0.0; n]; n];
    let mut ew = Vec::with_capacity(d + 1);
    for (row, w) in words.iter().enumerate() {
        for e in 0..graph.num_edges() {
            if !graph.composes(e, w[0]) {
                continue;
            }
            ew.clear();
            ew.push(e);
            ew.extend_from_slice(w);
            let col = index.get(graph, &ew[..d]);
            entries[row][col] += potential.value(&ew).powf(-beta);
        }
    }
    TransferMatrix { beta, index_depth: d, index_words: words, entries }
}

#[derive(Debug, Clone)]
enum Extension {
    /// `μ(Z(σ)) = q_{s(σ)}^β r_σ^β / norm`.
    SelfSimilar { ratios: RatioList, vertex_factor: Vec<f64>, beta: f64, norm: f64 },
    /// `μ(Z(eσ)) = λ^{-1} f(eσ)^{-β} μ(Z(σ))` beyond the base depth.
    Transfer { potential: Potential, beta: f64, eigenvalue: f64 },
}

/// A probability measure on path space, given on cylinders.
#[derive(Debug, Clone)]
pub struct CylinderMeasure {
    graph: Arc<Graph>,
    base_depth: usize,
    /// Dense by word code; 0 for disallowed words.
    base: Vec<f64>,
    extension: Extension,
    warnings: Vec<String>,
}

impl CylinderMeasure {
    /// The normalized self-similar measure `μ(Z(σ)) ∝ q_{s(σ)}^β r_σ^β`.
    ///
    /// `perron` supplies the vertex numbers `q_v` (all 1 when omitted, which is
    /// right for the full shift). Consistency requires them to be Perron
    /// numbers at `beta`.
    pub fn self_similar(
        graph: Arc<Graph>,
        ratios: RatioList,
        beta: f64,
        perron: Option<&[f64]>,
    ) -> Result<Self> {
        if ratios.ratios().len() != graph.num_edges() {
            return Err(Error::RatioCountMismatch {
                expected: graph.num_edges(),
                got: ratios.ratios().len(),
            });
        }
        let vertex_factor: Vec<f64> = match perron {
            Some(q) if q.len() == graph.num_vertices() => q.iter().map(|x| x.powf(beta)).collect(),
            Some(_) => return Err(Error::BadVertexWeights),
            None => vec![1.0; graph.num_vertices()],
        };
        let raw = |e: EdgeId| vertex_factor[graph.source(e)] * ratios.ratio(e).powf(beta);
        let norm: f64 = (0..graph.num_edges()).map(raw).sum();
        let base = (0..graph.num_edges()).map(|e| raw(e) / norm).collect();
        Ok(CylinderMeasure {
            graph,
            base_depth: 1,
            base,
            extension: Extension::SelfSimilar { ratios, vertex_factor, beta, norm },
            warnings: Vec::new(),
        })
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn base_depth(&self) -> usize {
        self.base_depth
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Mass of `Z(σ)`; disallowed words have mass 0 and the empty word mass 1.
    pub fn cylinder_mass(&self, sigma: &[EdgeId]) -> f64 {
        let g = &*self.graph;
        if !g.is_allowed(sigma) {
            return 0.0;
        }
        let d = self.base_depth;
        if sigma.len() < d {
            return g
                .extensions(sigma, d)
                .iter()
                .map(|w| self.base[g.word_code(w)])
                .sum();
        }
        match &self.extension {
            Extension::SelfSimilar { ratios, vertex_factor, beta, norm } => {
                let s = g.source(sigma[sigma.len() - 1]);
                vertex_factor[s] * ratios.word_ratio(sigma).powf(*beta) / norm
            }
            Extension::Transfer { potential, beta, eigenvalue } => {
                let extra = sigma.len() - d;
                let mut factor = 1.0;
                for i in 0..extra {
                    factor *= potential.value(&sigma[i..]).powf(-beta) / eigenvalue;
                }
                factor * self.base[g.word_code(&sigma[extra..])]
            }
        }
    }

    /// Mass of `vE^∞`, the paths starting at `v`.
    pub fn vertex_mass(&self, v: VertexId) -> f64 {
        self.graph.edges_with_range(v).iter().map(|&e| self.cylinder_mass(&[e])).sum()
    }

    /// Largest `|μ(Z(σ)) - ∑_e μ(Z(σe))|` over allowed σ with `|σ| < max_depth`.
    pub fn kolmogorov_defect(&self, max_depth: usize) -> f64 {
        let g = &*self.graph;
        let mut worst = (1.0 - (0..g.num_edges()).map(|e| self.cylinder_mass(&[e])).sum::<f64>()).abs();
        for len in 1..max_depth {
            for w in g.enumerate_cylinders(len) {
                let children: f64 =
                    g.followers(w[len - 1]).iter().map(|&e| self.cylinder_mass(&w.concat(&[e]))).sum();
                worst = worst.max((self.cylinder_mass(&w) - children).abs());
            }
        }
        worst
    }
}

/// The eigenmeasure `L*_{f,β} μ = λ μ`, normalized to total mass 1.
///
/// The base masses are the left Perron vector of [`transfer_matrix`]; deeper
/// cylinders follow from the one-step relation
/// `μ(Z(eσ)) = λ^{-1} f(eσ)^{-β} μ(Z(σ))`.
pub fn eigenmeasure(potential: &Potential, beta: f64) -> Result<CylinderMeasure> {
    let graph = potential.graph().clone();
    let l = transfer_matrix(potential, beta);
    let pair = left_spectral_radius(&l.entries)?;
    let mut warnings = Vec::new();
    if (pair.eigenvalue - 1.0).abs() > EIGENVALUE_WARN_TOL {
        warnings.push(format!(
            "leading eigenvalue at beta = {beta} is {}, not 1: beta does not solve the pressure equation",
            pair.eigenvalue
        ));
    }
    let d = l.index_depth;
    let mut base = vec![0.0; graph.num_edges().pow(d as u32)];
    for (w, m) in l.index_words.iter().zip(&pair.eigenvector) {
        base[graph.word_code(w)] = *m;
    }
    Ok(CylinderMeasure {
        graph,
        base_depth: d,
        base,
        extension: Extension::Transfer {
            potential: potential.clone(),
            beta,
            eigenvalue: pair.eigenvalue,
        },
        warnings,
    })
}

/// `|μ(U) - ∫_{TU} f((T|_U)^{-1} x)^{-β} dμ(x)|` for `U = Z(σ)`.
///
/// `TU` is `Z(σ')` (σ without its first letter); the integrand is constant on
/// the refinements of `σ'` to length `max(|σ'|, depth - 1, 1)`, so the
/// integral is an exact finite sum.
pub fn quasi_invariance_check(
    mu: &CylinderMeasure,
    potential: &Potential,
    beta: f64,
    sigma: &[EdgeId],
) -> Result<f64> {
    if sigma.is_empty() {
        return Err(Error::WordTooShort { min: 1, got: 0 });
    }
    let g = &**potential.graph();
    g.check_word(sigma)?;
    let head = sigma[0];
    let tail = &sigma[1..];
    let len = tail.len().max(potential.depth() - 1).max(1);
    let refinements = if tail.is_empty() {
        g.words_from_vertex(g.source(head), len)
    } else {
        g.extensions(tail, len)
    };
    let mut buf = Vec::with_capacity(len + 1);
    let integral: f64 = refinements
        .iter()
        .map(|w| {
            buf.clear();
            buf.push(head);
            buf.extend_from_slice(w);
            potential.value(&buf).powf(-beta) * mu.cylinder_mass(w)
        })
        .sum();
    Ok((mu.cylinder_mass(sigma) - integral).abs())
}

/// Quasi-invariance defect on every cylinder of length `1..=max_depth`.
pub fn quasi_invariance_table(
    mu: &CylinderMeasure,
    potential: &Potential,
    beta: f64,
    max_depth: usize,
    exec: Execution,
) -> Result<Vec<(Word, f64)>> {
    let g = potential.graph();
    let words: Vec<Word> = (1..=max_depth).flat_map(|d| g.enumerate_cylinders(d)).collect();
    let defects = par::map(&words, exec, |w| quasi_invariance_check(mu, potential, beta, w));
    words.into_iter().zip(defects).map(|(w, d)| d.map(|d| (w, d))).collect()
}

/// Largest quasi-invariance defect over cylinders of length `1..=max_depth`.
pub fn max_quasi_invariance_defect(
    mu: &CylinderMeasure,
    potential: &Potential,
    beta: f64,
    max_depth: usize,
    exec: Execution,
) -> Result<f64> {
    let g = potential.graph();
    let words: Vec<Word> = (1..=max_depth).flat_map(|d| g.enumerate_cylinders(d)).collect();
    Ok(par::max_by(&words, exec, |w| {
        quasi_invariance_check(mu, potential, beta, w).unwrap_or(f64::NAN)
    })
    .map_or(0.0, |(_, v)| v))
}

/// `dr*μ / ds*μ = e^{-β c_φ}` at the groupoid element `(x, m - n, y)`.
pub fn radon_nikodym(
    potential: &Potential,
    beta: f64,
    x: &PathPoint,
    m: usize,
    n: usize,
    y: &PathPoint,
) -> Result<f64> {
    Ok((-beta * potential.cocycle_value(x, m, n, y)?).exp())
}
