//! Model files: JSON descriptions of the example families, and their
//! conversion into core objects.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use kms_thermo::geom::circle::CircleMap;
use kms_thermo::geom::octafold::Octafold;
use kms_thermo::{Graph, Potential, RatioList};

use crate::catalog;
use crate::InputError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub source: String,
    pub range: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
}

/// A Markov potential: `table` maps words of length `depth` to `f > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub depth: usize,
    pub table: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_weights: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl Options {
    fn is_empty(&self) -> bool {
        *self == Options::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    /// Full shift on `n` letters with one contraction ratio per letter.
    Cuntz { ratios: Vec<f64> },
    /// Graph-directed system: one ratio per edge id.
    Graph { graph: GraphSpec, ratios: BTreeMap<String, f64> },
    /// Graph with a general Markov potential.
    GraphGeneralized { graph: GraphSpec, potential: PotentialSpec },
    /// Circle covering `T(x) = ∫_0^x f`.
    Circle { f: String },
    Octafold {},
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub spec: ModelSpec,
    #[serde(default, skip_serializing_if = "Options::is_empty")]
    pub options: Options,
}

impl ModelFile {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| {
            InputError::new(format!("{origin}:{}:{}: {}", e.line(), e.column(), e))
        })
    }

    /// Canonical JSON: fields in declaration order, maps sorted by key.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Loads `catalog:<name>` or a JSON file.
    pub fn load(arg: &str) -> Result<Self, InputError> {
        if let Some(name) = arg.strip_prefix("catalog:") {
            return catalog::get(name)
                .ok_or_else(|| InputError::new(format!("{arg}: no catalog model named {name:?}")));
        }
        let text = std::fs::read_to_string(Path::new(arg))
            .map_err(|e| InputError::new(format!("{arg}: {e}")))?;
        ModelFile::from_json(&text, arg)
    }

    pub fn kind(&self) -> &'static str {
        match self.spec {
            ModelSpec::Cuntz { .. } => "cuntz",
            ModelSpec::Graph { .. } => "graph",
            ModelSpec::GraphGeneralized { .. } => "graph-generalized",
            ModelSpec::Circle { .. } => "circle",
            ModelSpec::Octafold {} => "octafold",
        }
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind().to_string())
    }
}

/// A symbolic model: graph, potential and (for ratio models) the ratios.
#[derive(Debug, Clone)]
pub struct Symbolic {
    pub graph: Arc<Graph>,
    pub potential: Potential,
    pub ratios: Option<RatioList>,
    /// True for full shifts, where the one-vertex Moran equation applies.
    pub full_shift: bool,
}

#[derive(Debug, Clone)]
pub enum Model {
    Symbolic(Symbolic),
    Circle(CircleMap),
    Octafold(Octafold),
}

fn core_err(path: &str) -> impl Fn(kms_thermo::Error) -> InputError + '_ {
    move |e| InputError::new(format!("{path}: {e}"))
}

fn build_graph(spec: &GraphSpec) -> Result<Graph, InputError> {
    let edges = spec.edges.iter().map(|e| (e.id.clone(), e.source.clone(), e.range.clone()));
    Graph::new(spec.vertices.clone(), edges).map_err(core_err("graph"))
}

fn edge_ratios(graph: &Graph, ratios: &BTreeMap<String, f64>) -> Result<RatioList, InputError> {
    for id in ratios.keys() {
        if graph.edge_id(id).is_none() {
            return Err(InputError::new(format!("ratios.{id}: no edge with this id")));
        }
    }
    let list = graph
        .edges()
        .iter()
        .map(|e| {
            ratios
                .get(&e.name)
                .copied()
                .ok_or_else(|| InputError::new(format!("ratios: missing ratio for edge {:?}", e.name)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    RatioList::new(graph, list).map_err(core_err("ratios"))
}

/// Builds a potential from its spec; the table keys are words in the graph's
/// letters.
pub fn build_potential(graph: Arc<Graph>, spec: &PotentialSpec) -> Result<Potential, InputError> {
    let mut entries = Vec::with_capacity(spec.table.len());
    for (key, &value) in &spec.table {
        let word = graph.parse_word(key).map_err(core_err(&format!("potential.table.{key}")))?;
        entries.push((word, value));
    }
    let mut p = Potential::from_table(graph.clone(), spec.depth, entries).map_err(core_err("potential"))?;
    if let Some(w) = &spec.vertex_weights {
        let mut weights = Vec::with_capacity(graph.num_vertices());
        for v in graph.vertex_names() {
            weights.push(
                *w.get(v)
                    .ok_or_else(|| InputError::new(format!("potential.vertex_weights: missing vertex {v:?}")))?,
            );
        }
        if let Some(k) = w.keys().find(|k| graph.vertex_id(k).is_none()) {
            return Err(InputError::new(format!("potential.vertex_weights.{k}: no such vertex")));
        }
        p = p.with_vertex_weights(weights).map_err(core_err("potential.vertex_weights"))?;
    }
    Ok(p)
}

impl ModelFile {
    /// Resolves the model; `potential_override` replaces the potential of a
    /// symbolic model.
    pub fn build(&self, potential_override: Option<&PotentialSpec>) -> Result<Model, InputError> {
        let model = match &self.spec {
            ModelSpec::Cuntz { ratios } => {
                let g = Arc::new(Graph::full_shift(ratios.len()));
                let r = RatioList::new(&g, ratios.clone()).map_err(core_err("ratios"))?;
                let p = Potential::from_ratios(g.clone(), &r).map_err(core_err("ratios"))?;
                Model::Symbolic(Symbolic { graph: g, potential: p, ratios: Some(r), full_shift: true })
            }
            ModelSpec::Graph { graph, ratios } => {
                let g = Arc::new(build_graph(graph)?);
                let r = edge_ratios(&g, ratios)?;
                let p = Potential::from_ratios(g.clone(), &r).map_err(core_err("ratios"))?;
                let full_shift = g.num_vertices() == 1;
                Model::Symbolic(Symbolic { graph: g, potential: p, ratios: Some(r), full_shift })
            }
            ModelSpec::GraphGeneralized { graph, potential } => {
                let g = Arc::new(build_graph(graph)?);
                let p = build_potential(g.clone(), potential)?;
                let full_shift = g.num_vertices() == 1;
                Model::Symbolic(Symbolic { graph: g, potential: p, ratios: None, full_shift })
            }
            ModelSpec::Circle { f } => Model::Circle(CircleMap::parse(f).map_err(core_err("f"))?),
            ModelSpec::Octafold {} => Model::Octafold(Octafold::new().map_err(core_err("octafold"))?),
        };
        match (model, potential_override) {
            (Model::Symbolic(mut s), Some(spec)) => {
                s.potential = build_potential(s.graph.clone(), spec)?;
                s.ratios = None;
                Ok(Model::Symbolic(s))
            }
            (_, Some(_)) => Err(InputError::new(format!(
                "--potential applies to symbolic models only, not {}",
                self.kind()
            ))),
            (m, None) => Ok(m),
        }
    }
}

/// Reads a `--potential` file.
pub fn load_potential(path: &str) -> Result<PotentialSpec, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::new(format!("{path}: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| InputError::new(format!("{path}:{}:{}: {}", e.line(), e.column(), e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_have_locations() {
        let e = ModelFile::from_json("{\n  \"kind\": \"cuntz\",\n  \"ratios\": [0.5, x]\n}", "m.json").unwrap_err();
        assert!(e.0.starts_with("m.json:3:"), "{}", e.0);
        let e = ModelFile::from_json(r#"{"kind": "torus"}"#, "m.json").unwrap_err();
        assert!(e.0.contains("torus"), "{}", e.0);
    }

    #[test]
    fn cross_references_are_checked() {
        let text = r#"{"kind": "graph",
            "graph": {"vertices": ["v"], "edges": [{"id": "a", "source": "v", "range": "v"},
                                                   {"id": "b", "source": "v", "range": "v"}]},
            "ratios": {"a": 0.5, "z": 0.5}}"#;
        let e = ModelFile::from_json(text, "g.json").unwrap().build(None).unwrap_err();
        assert!(e.0.contains("ratios.z"), "{}", e.0);
        let text = r#"{"kind": "graph-generalized",
            "graph": {"vertices": ["v"], "edges": [{"id": "1", "source": "v", "range": "v"},
                                                   {"id": "2", "source": "v", "range": "v"}]},
            "potential": {"depth": 2, "table": {"11": 2, "12": 3, "21": 4, "23": 5}}}"#;
        let e = ModelFile::from_json(text, "g.json").unwrap().build(None).unwrap_err();
        assert!(e.0.contains("potential.table.23"), "{}", e.0);
        let text = r#"{"kind": "graph",
            "graph": {"vertices": ["v"], "edges": [{"id": "a", "source": "v", "range": "w"}]},
            "ratios": {"a": 0.5}}"#;
        assert!(ModelFile::from_json(text, "g.json").unwrap().build(None).is_err());
    }

    #[test]
    fn invalid_circle_weight() {
        let m = ModelFile::from_json(r#"{"kind": "circle", "f": "2.5"}"#, "c.json").unwrap();
        assert!(m.build(None).is_err());
    }
}
