//! Bundled example models.

use std::collections::BTreeMap;

use crate::model::{EdgeSpec, GraphSpec, ModelFile, ModelSpec, Options, PotentialSpec};

pub struct Entry {
    pub name: &'static str,
    pub description: &'static str,
}

pub const ENTRIES: &[Entry] = &[
    Entry { name: "o2_equal", description: "Cuntz O_2, ratios (1/2, 1/2); dimension 1" },
    Entry { name: "o3_half_quarter", description: "Cuntz O_3, ratios (1/2, 1/4, 1/4); dimension 1" },
    Entry { name: "cuntz_gasket", description: "Cuntz O_3, three ratios 1/2; dimension log 3 / log 2" },
    Entry { name: "o4_dim2", description: "Cuntz O_4, four ratios 1/2; dimension 2" },
    Entry { name: "o3_inv_e", description: "Cuntz O_3, three ratios 1/e; dimension log 3" },
    Entry { name: "o2_generalized", description: "O_2 with a depth-2 potential f(11)=2, f(12)=3, f(21)=4, f(22)=5" },
    Entry { name: "graph_golden", description: "two-vertex graph, all ratios 1/2; dimension log2 of the golden mean" },
    Entry { name: "graph_perron", description: "two-vertex graph with unequal ratios and Perron numbers" },
    Entry { name: "circle_const3", description: "circle covering f = 3, degree 3" },
    Entry { name: "circle_sine", description: "circle covering f = 2 + 0.5 sin(2 pi t), degree 2" },
    Entry { name: "octafold", description: "Sierpinski octafold, four gaskets on alternating octahedron faces" },
];

fn cuntz(name: &str, ratios: Vec<f64>) -> ModelFile {
    ModelFile { name: Some(name.into()), spec: ModelSpec::Cuntz { ratios }, options: Options::default() }
}

fn golden_graph() -> GraphSpec {
    let edge = |id: &str, source: &str, range: &str| EdgeSpec { id: id.into(), source: source.into(), range: range.into() };
    GraphSpec {
        vertices: vec!["v".into(), "w".into()],
        edges: vec![edge("a", "v", "w"), edge("b", "w", "v"), edge("c", "v", "v")],
    }
}

fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn get(name: &str) -> Option<ModelFile> {
    let m = match name {
        "o2_equal" => cuntz(name, vec![0.5, 0.5]),
        "o3_half_quarter" => cuntz(name, vec![0.5, 0.25, 0.25]),
        "cuntz_gasket" => cuntz(name, vec![0.5, 0.5, 0.5]),
        "o4_dim2" => cuntz(name, vec![0.5; 4]),
        "o3_inv_e" => cuntz(name, vec![(-1f64).exp(); 3]),
        "o2_generalized" => {
            let edge = |id: &str| EdgeSpec { id: id.into(), source: "v".into(), range: "v".into() };
            ModelFile {
                name: Some(name.into()),
                spec: ModelSpec::GraphGeneralized {
                    graph: GraphSpec { vertices: vec!["v".into()], edges: vec![edge("1"), edge("2")] },
                    potential: PotentialSpec {
                        depth: 2,
                        table: map(&[("11", 2.0), ("12", 3.0), ("21", 4.0), ("22", 5.0)]),
                        vertex_weights: None,
                    },
                },
                options: Options::default(),
            }
        }
        "graph_golden" => ModelFile {
            name: Some(name.into()),
            spec: ModelSpec::Graph { graph: golden_graph(), ratios: map(&[("a", 0.5), ("b", 0.5), ("c", 0.5)]) },
            options: Options::default(),
        },
        "graph_perron" => ModelFile {
            name: Some(name.into()),
            spec: ModelSpec::Graph { graph: golden_graph(), ratios: map(&[("a", 0.4), ("b", 0.3), ("c", 0.6)]) },
            options: Options::default(),
        },
        "circle_const3" => ModelFile {
            name: Some(name.into()),
            spec: ModelSpec::Circle { f: "3".into() },
            options: Options::default(),
        },
        "circle_sine" => ModelFile {
            name: Some(name.into()),
            spec: ModelSpec::Circle { f: "2 + 0.5*sin(2*pi*t)".into() },
            options: Options::default(),
        },
        "octafold" => ModelFile { name: Some(name.into()), spec: ModelSpec::Octafold {}, options: Options::default() },
        _ => return None,
    };
    Some(m)
}

pub fn all() -> Vec<ModelFile> {
    ENTRIES.iter().map(|e| get(e.name).expect("listed entry exists")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds_and_round_trips() {
        for m in all() {
            let json = m.to_json();
            let back = ModelFile::from_json(&json, "catalog").unwrap();
            assert_eq!(back, m);
            assert_eq!(back.to_json(), json);
            m.build(None).unwrap();
        }
        assert!(get("nope").is_none());
    }
}
