//! JSON interchange for graphs and packings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CliquePacking, GraphError, MultipartiteGraph, PartitionLabeling, Vertex};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelsDoc {
    pub d: usize,
    /// part_of[class][offset]
    pub part_of: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphDoc {
    pub r: usize,
    pub class_sizes: Vec<usize>,
    pub edges: Vec<[[usize; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<LabelsDoc>,
}

impl GraphDoc {
    pub fn from_graph(g: &MultipartiteGraph, labels: Option<&PartitionLabeling>) -> Self {
        let edges = g
            .edges()
            .map(|(u, v)| {
                let (a, b) = (g.vertex(u), g.vertex(v));
                [[a.class, a.offset], [b.class, b.offset]]
            })
            .collect();
        let labels = labels.map(|l| LabelsDoc {
            d: l.d(),
            part_of: (0..g.r()).map(|c| g.class_range(c).map(|v| l.part_of(v)).collect()).collect(),
        });
        GraphDoc { r: g.r(), class_sizes: g.class_sizes().to_vec(), edges, labels }
    }

    pub fn to_graph(&self) -> Result<(MultipartiteGraph, Option<PartitionLabeling>), GraphError> {
        if self.class_sizes.len() != self.r {
            return Err(GraphError::Malformed(format!(
                "r = {} but {} class sizes given",
                self.r,
                self.class_sizes.len()
            )));
        }
        let mut g = MultipartiteGraph::new(&self.class_sizes);
        for [a, b] in &self.edges {
            g.add_edge_vertices(Vertex::new(a[0], a[1]), Vertex::new(b[0], b[1]))?;
        }
        let labels = match &self.labels {
            None => None,
            Some(doc) => {
                if doc.part_of.len() != self.r
                    || doc.part_of.iter().zip(&self.class_sizes).any(|(p, &s)| p.len() != s)
                {
                    return Err(GraphError::Malformed("labels do not match class sizes".into()));
                }
                Some(PartitionLabeling::new(doc.d, doc.part_of.concat())?)
            }
        };
        Ok((g, labels))
    }
}

pub fn graph_to_json(g: &MultipartiteGraph, labels: Option<&PartitionLabeling>) -> String {
    serde_json::to_string_pretty(&GraphDoc::from_graph(g, labels)).expect("graph serializes")
}

pub fn graph_from_json(s: &str) -> Result<(MultipartiteGraph, Option<PartitionLabeling>), GraphError> {
    let doc: GraphDoc = serde_json::from_str(s).map_err(|e| GraphError::Malformed(e.to_string()))?;
    doc.to_graph()
}

/// Index sets are written as "[0,1,2]" with 0-based classes.
pub fn index_key(index: &[usize]) -> String {
    let parts: Vec<String> = index.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(","))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PackingDoc {
    pub cliques: Vec<Vec<[usize; 2]>>,
    /// Informational; ignored when reading.
    #[serde(default)]
    pub index_counts: BTreeMap<String, usize>,
}

impl PackingDoc {
    pub fn from_packing(g: &MultipartiteGraph, p: &CliquePacking) -> Self {
        let cliques = p
            .cliques
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&v| {
                        let x = g.vertex(v);
                        [x.class, x.offset]
                    })
                    .collect()
            })
            .collect();
        let index_counts = p.index_counts(g).into_iter().map(|(k, v)| (index_key(&k), v)).collect();
        PackingDoc { cliques, index_counts }
    }

    pub fn to_packing(&self, g: &MultipartiteGraph) -> Result<CliquePacking, GraphError> {
        let cliques = self
            .cliques
            .iter()
            .map(|c| c.iter().map(|v| g.id(Vertex::new(v[0], v[1]))).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CliquePacking { cliques })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_gamma;

    #[test]
    fn round_trip_with_labels() {
        let inst = build_gamma(2, 3, 2).unwrap();
        let s = graph_to_json(&inst.graph, Some(&inst.labeling));
        let (g, l) = graph_from_json(&s).unwrap();
        assert_eq!(g, inst.graph);
        assert_eq!(l.unwrap(), inst.labeling);
    }

    #[test]
    fn rejects_same_class_and_out_of_range() {
        let bad = r#"{"r":2,"class_sizes":[2,2],"edges":[[[0,0],[0,1]]]}"#;
        assert_eq!(graph_from_json(bad).unwrap_err(), GraphError::SameClass(0));
        let bad = r#"{"r":2,"class_sizes":[2,2],"edges":[[[0,0],[1,5]]]}"#;
        assert!(matches!(graph_from_json(bad).unwrap_err(), GraphError::OutOfRange { .. }));
    }

    #[test]
    fn edges_are_lexicographic() {
        let g = MultipartiteGraph::complete(&[2, 2]);
        let doc = GraphDoc::from_graph(&g, None);
        let flat: Vec<_> = doc.edges.iter().map(|[a, b]| (a[0] * 2 + a[1], b[0] * 2 + b[1])).collect();
        let mut sorted = flat.clone();
        sorted.sort();
        assert_eq!(flat, sorted);
    }
}
