//! Graph JSON: `{"n": 7, "edges": [[1, 2], ...], "leaders": [1]}` with
//! 1-based node ids. Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::graph::{RawGraph, StructuredDag, ValidationPolicy};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub leaders: Vec<usize>,
}

impl GraphFile {
    pub fn from_raw(raw: &RawGraph) -> Self {
        Self {
            n: raw.n,
            edges: raw.edges.iter().map(|&(u, v)| [u + 1, v + 1]).collect(),
            leaders: raw.leaders.iter().map(|l| l + 1).collect(),
        }
    }

    pub fn from_dag(dag: &StructuredDag) -> Self {
        Self::from_raw(&dag.to_raw())
    }

    pub fn to_raw(&self) -> Result<RawGraph> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&[u, v]| (u, v)).collect();
        RawGraph::from_external(self.n, &edges, &self.leaders)
    }

    /// Sorted and deduplicated copy; the input to [`digest`].
    pub fn canonical(&self) -> Self {
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        edges.dedup();
        let mut leaders = self.leaders.clone();
        leaders.sort_unstable();
        leaders.dedup();
        Self {
            n: self.n,
            edges,
            leaders,
        }
    }
}

pub fn parse_graph_file(text: &str) -> Result<GraphFile> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_raw(text: &str) -> Result<RawGraph> {
    parse_graph_file(text)?.to_raw()
}

pub fn parse_dag(text: &str, policy: ValidationPolicy) -> Result<StructuredDag> {
    StructuredDag::from_raw(&parse_raw(text)?, policy)
}

/// One edge per line, stable across runs.
pub fn to_json(graph: &GraphFile) -> String {
    let edges: Vec<String> = graph
        .edges
        .iter()
        .map(|[u, v]| format!("    [{u}, {v}]"))
        .collect();
    let leaders: Vec<String> = graph.leaders.iter().map(ToString::to_string).collect();
    let edges = if edges.is_empty() {
        "[]".to_string()
    } else {
        format!("[\n{}\n  ]", edges.join(",\n"))
    };
    format!(
        "{{\n  \"n\": {},\n  \"edges\": {},\n  \"leaders\": [{}]\n}}\n",
        graph.n,
        edges,
        leaders.join(", ")
    )
}

pub fn dag_to_json(dag: &StructuredDag) -> String {
    to_json(&GraphFile::from_dag(dag))
}

/// `sha256:<hex>` of the compact canonical JSON.
pub fn digest(graph: &GraphFile) -> String {
    let bytes = serde_json::to_vec(&graph.canonical()).expect("graph file serializes");
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}
