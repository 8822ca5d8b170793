//! Finite directed graphs, their infinite path spaces, cylinders and the shift.
//!
//! Paths follow the range/source convention: a word `e0 e1 ... e(n-1)` is
//! allowed when `source(e_i) == range(e_(i+1))` for every `i`. The full shift on
//! `n` letters is the one-vertex graph with `n` loops.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub source: VertexId,
    pub range: VertexId,
}

/// A finite directed graph without sinks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    /// `with_range[v]` lists the edges `e` with `range(e) == v`, in id order.
    with_range: Vec<Vec<EdgeId>>,
    edge_lookup: HashMap<String, EdgeId>,
}

impl Graph {
    /// Builds a graph from vertex names and `(edge, source, range)` name triples.
    ///
    /// Edge ids are assigned in declaration order, which fixes the
    /// lexicographic order used by every enumeration.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut vertex_lookup = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_lookup.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v.clone()));
            }
        }
        let mut edge_list = Vec::new();
        let mut edge_lookup = HashMap::new();
        for (name, source, range) in edges {
            let find = |v: &String| {
                vertex_lookup.get(v).copied().ok_or_else(|| Error::UnknownVertex {
                    edge: name.clone(),
                    vertex: v.clone(),
                })
            };
            let source = find(&source)?;
            let range = find(&range)?;
            if edge_lookup.insert(name.clone(), edge_list.len()).is_some() {
                return Err(Error::DuplicateEdge(name));
            }
            edge_list.push(Edge { name, source, range });
        }
        let mut with_range = vec![Vec::new(); vertices.len()];
        for (id, e) in edge_list.iter().enumerate() {
            with_range[e.range].push(id);
        }
        // Every vertex needs an incoming continuation for infinite paths.
        if let Some(v) = with_range.iter().position(Vec::is_empty) {
            return Err(Error::Sink(vertices[v].clone()));
        }
        Ok(Graph { vertices, edges: edge_list, with_range, edge_lookup })
    }

    /// Convenience constructor from string slices.
    pub fn from_names(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self> {
        Graph::new(
            vertices.iter().copied(),
            edges.iter().map(|(e, s, r)| (e.to_string(), s.to_string(), r.to_string())),
        )
    }

    /// The full shift on `n` letters, labelled `1..=n`.
    pub fn full_shift(n: usize) -> Self {
        let edges = (1..=n).map(|i| (i.to_string(), "v".to_string(), "v".to_string()));
        Graph::new(["v"], edges).expect("full shift with at least one letter")
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edge_lookup.get(name).copied()
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.edges[e].source
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.edges[e].range
    }

    /// Edges `e` with `range(e) == v`: the letters that may start a path at `v`.
    pub fn edges_with_range(&self, v: VertexId) -> &[EdgeId] {
        &self.with_range[v]
    }

    /// Letters allowed to follow `e`.
    pub fn followers(&self, e: EdgeId) -> &[EdgeId] {
        &self.with_range[self.source(e)]
    }

    pub fn composes(&self, e: EdgeId, next: EdgeId) -> bool {
        self.source(e) == self.range(next)
    }

    pub fn is_allowed(&self, letters: &[EdgeId]) -> bool {
        letters.iter().all(|&e| e < self.edges.len())
            && letters.windows(2).all(|w| self.composes(w[0], w[1]))
    }

    pub fn check_word(&self, letters: &[EdgeId]) -> Result<()> {
        if self.is_allowed(letters) {
            Ok(())
        } else {
            Err(Error::WordNotAllowed(self.format_word(letters)))
        }
    }

    /// Vertex adjacency matrix: entry `(v, w)` counts edges with range `v` and source `w`.
    pub fn adjacency_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.num_vertices();
        let mut a = vec![vec![0.0; n]; n];
        for e in &self.edges {
            a[e.range][e.source] += 1.0;
        }
        a
    }

    /// All allowed words of length `depth`, in lexicographic order of edge ids.
    pub fn enumerate_cylinders(&self, depth: usize) -> Vec<Word> {
        self.extensions(&[], depth)
    }

    /// All allowed words of length `len` beginning with `prefix`.
    ///
    /// When `prefix` is at least `len` long the result is `prefix` itself
    /// (if allowed). An empty prefix enumerates every word of length `len`.
    pub fn extensions(&self, prefix: &[EdgeId], len: usize) -> Vec<Word> {
        if !self.is_allowed(prefix) {
            return Vec::new();
        }
        if prefix.len() >= len {
            return vec![Word::from(prefix.to_vec())];
        }
        let mut out = Vec::new();
        let mut buf = prefix.to_vec();
        if buf.is_empty() {
            for e in 0..self.num_edges() {
                buf.push(e);
                self.extend_into(&mut buf, len, &mut out);
                buf.pop();
            }
        } else {
            self.extend_into(&mut buf, len, &mut out);
        }
        out
    }

    /// Words of length `len` starting at vertex `v` (that is, with range `v`).
    pub fn words_from_vertex(&self, v: VertexId, len: usize) -> Vec<Word> {
        if len == 0 {
            return vec![Word::empty()];
        }
        let mut out = Vec::new();
        let mut buf = Vec::with_capacity(len);
        for &e in self.edges_with_range(v) {
            buf.push(e);
            self.extend_into(&mut buf, len, &mut out);
            buf.pop();
        }
        out
    }

    fn extend_into(&self, buf: &mut Vec<EdgeId>, len: usize, out: &mut Vec<Word>) {
        if buf.len() == len {
            out.push(Word::from(buf.clone()));
            return;
        }
        let last = *buf.last().expect("nonempty buffer");
        for &next in self.followers(last) {
            buf.push(next);
            self.extend_into(buf, len, out);
            buf.pop();
        }
    }

    /// Mixed-radix code of a word, used to index dense per-word tables.
    pub fn word_code(&self, letters: &[EdgeId]) -> usize {
        let base = self.num_edges();
        letters.iter().fold(0, |acc, &e| acc * base + e)
    }

    fn single_char_names(&self) -> bool {
        self.edges.iter().all(|e| e.name.chars().count() == 1 && e.name != ".")
    }

    /// Renders a word from edge names: concatenated when every name is a
    /// single character, dot-separated otherwise.
    pub fn format_word(&self, letters: &[EdgeId]) -> String {
        let names = letters.iter().map(|&e| {
            self.edges.get(e).map(|x| x.name.as_str()).unwrap_or("?")
        });
        if self.single_char_names() {
            names.collect()
        } else {
            names.collect::<Vec<_>>().join(".")
        }
    }

    /// Parses a word written by [`Graph::format_word`]. The word must be allowed.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let s = s.trim();
        let letters: Vec<EdgeId> = if s.is_empty() {
            Vec::new()
        } else if s.contains('.') || !self.single_char_names() {
            s.split('.')
                .map(|t| self.edge_id(t.trim()).ok_or_else(|| Error::UnknownEdge(t.to_string())))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    self.edge_id(&c.to_string()).ok_or_else(|| Error::UnknownEdge(c.to_string()))
                })
                .collect::<Result<_>>()?
        };
        self.check_word(&letters)?;
        Ok(Word(letters))
    }

    /// Renders a point as `preperiod(period)`.
    pub fn format_point(&self, x: &PathPoint) -> String {
        format!("{}({})", self.format_word(&x.preperiod), self.format_word(&x.period))
    }

    /// Parses `preperiod(period)`, e.g. `1(12)` for `1 1 2 1 2 ...`.
    pub fn parse_point(&self, s: &str) -> Result<PathPoint> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| Error::InvalidPoint(format!("missing `(` in `{s}`")))?;
        if !s.ends_with(')') {
            return Err(Error::InvalidPoint(format!("missing trailing `)` in `{s}`")));
        }
        let pre = self.parse_word(&s[..open])?;
        let period = self.parse_word(&s[open + 1..s.len() - 1])?;
        PathPoint::new(self, pre, period)
    }
}

/// A finite path `e0 e1 ... e(n-1)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<EdgeId>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[EdgeId] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<EdgeId> {
        self.0
    }

    pub fn concat(&self, other: &[EdgeId]) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(other);
        Word(v)
    }

    /// The word with its first letter removed.
    pub fn tail(&self) -> Word {
        Word(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    pub fn is_prefix_of(&self, other: &[EdgeId]) -> bool {
        other.starts_with(&self.0)
    }
}

impl Deref for Word {
    type Target = [EdgeId];

    fn deref(&self) -> &[EdgeId] {
        &self.0
    }
}

impl From<Vec<EdgeId>> for Word {
    fn from(v: Vec<EdgeId>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// An eventually periodic infinite path `preperiod · period · period · ...`.
///
/// Always stored in canonical form (primitive period, shortest preperiod), so
/// structural equality is equality of the infinite sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathPoint {
    preperiod: Vec<EdgeId>,
    period: Vec<EdgeId>,
}

impl PathPoint {
    pub fn new(graph: &Graph, preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidPoint("period must be nonempty".into()));
        }
        graph.check_word(&preperiod)?;
        graph.check_word(&period)?;
        let first = period[0];
        let last = period[period.len() - 1];
        if !graph.composes(last, first) {
            return Err(Error::InvalidPoint(format!(
                "period `{}` does not close up",
                graph.format_word(&period)
            )));
        }
        if let Some(&p) = preperiod.last() {
            if !graph.composes(p, first) {
                return Err(Error::InvalidPoint(format!(
                    "preperiod `{}` does not connect to period `{}`",
                    graph.format_word(&preperiod),
                    graph.format_word(&period)
                )));
            }
        }
        Ok(Self::canonical(preperiod.0, period.0))
    }

    /// The purely periodic point `period^∞`.
    pub fn periodic(graph: &Graph, period: Word) -> Result<Self> {
        PathPoint::new(graph, Word::empty(), period)
    }

    fn canonical(mut pre: Vec<EdgeId>, period: Vec<EdgeId>) -> Self {
        let n = period.len();
        let root = (1..=n)
            .find(|&d| n % d == 0 && (0..n).all(|i| period[i] == period[i % d]))
            .unwrap_or(n);
        let mut period = period[..root].to_vec();
        while let (Some(&p), Some(&q)) = (pre.last(), period.last()) {
            if p != q {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        PathPoint { preperiod: pre, period }
    }

    pub fn preperiod(&self) -> &[EdgeId] {
        &self.preperiod
    }

    pub fn period(&self) -> &[EdgeId] {
        &self.period
    }

    /// The `i`-th letter of the infinite sequence.
    pub fn letter(&self, i: usize) -> EdgeId {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: usize) -> Word {
        Word((0..n).map(|i| self.letter(i)).collect())
    }

    /// Letters `start .. start + n`.
    pub fn window(&self, start: usize, n: usize, buf: &mut Vec<EdgeId>) {
        buf.clear();
        buf.extend((start..start + n).map(|i| self.letter(i)));
    }

    /// The left shift `T`.
    pub fn shift(&self) -> PathPoint {
        if self.preperiod.is_empty() {
            let mut period = self.period.clone();
            period.rotate_left(1);
            PathPoint { preperiod: Vec::new(), period }
        } else {
            PathPoint { preperiod: self.preperiod[1..].to_vec(), period: self.period.clone() }
        }
    }

    /// `T^n`.
    pub fn shift_by(&self, n: usize) -> PathPoint {
        if n <= self.preperiod.len() {
            return PathPoint { preperiod: self.preperiod[n..].to_vec(), period: self.period.clone() };
        }
        let k = (n - self.preperiod.len()) % self.period.len();
        let mut period = self.period.clone();
        period.rotate_left(k);
        PathPoint { preperiod: Vec::new(), period }
    }

    /// The point `word · self`, if that concatenation is an allowed path.
    pub fn prepend(&self, graph: &Graph, word: &[EdgeId]) -> Result<PathPoint> {
        graph.check_word(word)?;
        if let Some(&last) = word.last() {
            if !graph.composes(last, self.letter(0)) {
                return Err(Error::InvalidPoint("word does not connect to point".into()));
            }
        }
        let mut pre = word.to_vec();
        pre.extend_from_slice(&self.preperiod);
        Ok(Self::canonical(pre, self.period.clone()))
    }

    /// `r(x_0)`, the vertex the path starts from.
    pub fn range_vertex(&self, graph: &Graph) -> VertexId {
        graph.range(self.letter(0))
    }

    /// Length of the longest common prefix, or `None` when the points are equal.
    pub fn common_prefix_len(&self, other: &PathPoint) -> Option<usize> {
        if self == other {
            return None;
        }
        let (a, b) = (self.period.len(), other.period.len());
        let bound = self.preperiod.len().max(other.preperiod.len()) + lcm(a, b);
        (0..=bound).find(|&i| self.letter(i) != other.letter(i))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// `T(x)`.
pub fn shift_point(x: &PathPoint) -> PathPoint {
    x.shift()
}

/// Every point with `T^n x = x` for some `1 <= n <= max_period`, each listed
/// once, ordered by least period and then lexicographically.
pub fn periodic_points(graph: &Graph, max_period: usize) -> Vec<PathPoint> {
    let mut out = Vec::new();
    for n in 1..=max_period {
        for w in graph.enumerate_cylinders(n) {
            if !graph.composes(w[n - 1], w[0]) {
                continue;
            }
            let p = PathPoint::canonical(Vec::new(), w.0);
            if p.period.len() == n {
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle() -> Graph {
        Graph::from_names(&["v", "w"], &[("a", "v", "w"), ("b", "w", "v")]).unwrap()
    }

    fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    fn path_count_oracle(g: &Graph, d: usize) -> f64 {
        let a = g.adjacency_matrix();
        let n = a.len();
        let mut p: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        for _ in 0..d {
            p = mat_mul(&p, &a);
        }
        p.iter().flatten().sum()
    }

    #[test]
    fn full_shift_words() {
        let g = Graph::full_shift(2);
        let ws: Vec<String> = g.enumerate_cylinders(2).iter().map(|w| g.format_word(w)).collect();
        assert_eq!(ws, ["11", "12", "21", "22"]);
        assert_eq!(g.enumerate_cylinders(0), vec![Word::empty()]);
    }

    #[test]
    fn two_cycle_words_match_matrix_powers() {
        let g = two_cycle();
        let ws: Vec<String> = g.enumerate_cylinders(3).iter().map(|w| g.format_word(w)).collect();
        assert_eq!(ws, ["aba", "bab"]);
        for d in 1..6 {
            assert_eq!(g.enumerate_cylinders(d).len() as f64, path_count_oracle(&g, d));
        }
        let golden =
            Graph::from_names(&["v", "w"], &[("a", "v", "w"), ("b", "w", "v"), ("c", "v", "v")])
                .unwrap();
        for d in 1..8 {
            assert_eq!(golden.enumerate_cylinders(d).len() as f64, path_count_oracle(&golden, d));
        }
    }

    #[test]
    fn sinks_are_rejected() {
        let err = Graph::from_names(&["v", "w"], &[("a", "v", "w")]).unwrap_err();
        assert!(matches!(err, Error::Sink(_)));
    }

    #[test]
    fn unknown_vertex_is_rejected() {
        let err = Graph::from_names(&["v"], &[("a", "v", "u")]).unwrap_err();
        assert!(matches!(err, Error::UnknownVertex { .. }));
    }

    #[test]
    fn shift_rotates_and_consumes() {
        let g = Graph::full_shift(2);
        let x = g.parse_point("(12)").unwrap();
        assert_eq!(g.format_point(&x.shift()), "(21)");
        let y = g.parse_point("1(2)").unwrap();
        assert_eq!(g.format_point(&shift_point(&y)), "(2)");
        let z = g.parse_point("2112(12)").unwrap();
        let mut s = z.clone();
        for _ in 0..4 {
            s = s.shift();
        }
        assert_eq!(s, z.shift_by(4));
    }

    #[test]
    fn canonical_form() {
        let g = Graph::full_shift(2);
        // 1(21) = 1 2 1 2 1 ... = (12)
        assert_eq!(g.parse_point("1(21)").unwrap(), g.parse_point("(12)").unwrap());
        assert_eq!(g.parse_point("(1212)").unwrap(), g.parse_point("(12)").unwrap());
        assert_eq!(g.format_point(&g.parse_point("22(2)").unwrap()), "(2)");
    }

    #[test]
    fn periodic_points_of_full_shift() {
        let g = Graph::full_shift(2);
        let p1: Vec<String> = periodic_points(&g, 1).iter().map(|x| g.format_point(x)).collect();
        assert_eq!(p1, ["(1)", "(2)"]);
        let p2: Vec<String> = periodic_points(&g, 2).iter().map(|x| g.format_point(x)).collect();
        assert_eq!(p2, ["(1)", "(2)", "(12)", "(21)"]);
        // points of period dividing n: 2^n for the full 2-shift
        for n in 1..=6 {
            let count = periodic_points(&g, n)
                .iter()
                .filter(|x| n % x.period().len() == 0)
                .count();
            assert_eq!(count, 1 << n);
        }
    }

    #[test]
    fn periodic_points_of_two_cycle() {
        let g = two_cycle();
        let p: Vec<String> = periodic_points(&g, 2).iter().map(|x| g.format_point(x)).collect();
        assert_eq!(p, ["(ab)", "(ba)"]);
        assert!(periodic_points(&g, 1).is_empty());
    }

    #[test]
    fn invalid_points() {
        let g = two_cycle();
        assert!(g.parse_point("(a)").is_err());
        assert!(g.parse_point("a(a)").is_err());
        assert!(g.parse_point("a()").is_err());
        assert!(g.parse_point("a(ba)").is_ok());
    }

    #[test]
    fn common_prefix() {
        let g = Graph::full_shift(2);
        let x = g.parse_point("11(2)").unwrap();
        let y = g.parse_point("1(12)").unwrap();
        assert_eq!(x.common_prefix_len(&y), Some(3));
        assert_eq!(x.common_prefix_len(&x), None);
        let u = g.parse_point("(12)").unwrap();
        let v = g.parse_point("(1212121211)").unwrap();
        assert_eq!(u.common_prefix_len(&v), Some(9));
    }

    #[test]
    fn word_formatting_with_long_names() {
        let g = Graph::from_names(&["v"], &[("ab", "v", "v"), ("c", "v", "v")]).unwrap();
        let w = g.parse_word("ab.c.ab").unwrap();
        assert_eq!(g.format_word(&w), "ab.c.ab");
    }
}
