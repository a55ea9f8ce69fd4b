//! Graph data model, structural validation and layer labeling.
//!
//! Nodes are dense `0..n` indices inside the library. Text formats and
//! human-readable messages use 1-based ids, so `Display` impls add one.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A graph as read from input, before any structural checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub leaders: Vec<usize>,
}

impl RawGraph {
    /// Builds a raw graph from 0-based indices. Only id ranges are checked.
    pub fn new(n: usize, edges: Vec<(usize, usize)>, leaders: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        for &id in edges.iter().flat_map(|(u, v)| [u, v]).chain(leaders.iter()) {
            if id >= n {
                return Err(Error::NodeOutOfRange { id: id + 1, n });
            }
        }
        Ok(Self { n, edges, leaders })
    }

    /// Builds a raw graph from 1-based ids.
    pub fn from_external(n: usize, edges: &[(usize, usize)], leaders: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let to_index = |id: usize| {
            if id == 0 || id > n {
                Err(Error::NodeOutOfRange { id, n })
            } else {
                Ok(id - 1)
            }
        };
        let edges = edges
            .iter()
            .map(|&(u, v)| Ok((to_index(u)?, to_index(v)?)))
            .collect::<Result<Vec<_>>>()?;
        let leaders = leaders
            .iter()
            .map(|&l| to_index(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, edges, leaders })
    }

    /// Checks every structural assumption and reports all violations found.
    pub fn validate(&self) -> ValidationReport {
        let n = self.n;
        let mut violations = Vec::new();

        if self.leaders.is_empty() {
            violations.push(Violation::NoLeaders);
        }
        let mut seen_leaders = BTreeSet::new();
        for &l in &self.leaders {
            if !seen_leaders.insert(l) {
                violations.push(Violation::DuplicateLeader { node: l });
            }
        }

        let mut seen_edges = BTreeSet::new();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            if u == v {
                violations.push(Violation::SelfLoop { node: u });
                continue;
            }
            if !seen_edges.insert((u, v)) {
                violations.push(Violation::DuplicateEdge { from: u, to: v });
                continue;
            }
            out_adj[u].push(v);
            in_adj[v].push(u);
        }

        let (_, leftover) = peel_all(&out_adj, &in_adj);
        if !leftover.is_empty() {
            violations.push(Violation::Cycle {
                nodes: find_cycle(&in_adj, &leftover),
            });
        }

        for &l in &seen_leaders {
            if !in_adj[l].is_empty() {
                violations.push(Violation::LeaderWithInEdges {
                    leader: l,
                    in_degree: in_adj[l].len(),
                });
            }
        }

        let reached = reachable_from(&out_adj, seen_leaders.iter().copied());
        let unreached: Vec<usize> = (0..n).filter(|&v| !reached[v]).collect();
        if !unreached.is_empty() && !seen_leaders.is_empty() {
            violations.push(Violation::NotInfluenceable { nodes: unreached });
        }

        ValidationReport { violations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    NoLeaders,
    SelfLoop {
        node: usize,
    },
    DuplicateEdge {
        from: usize,
        to: usize,
    },
    DuplicateLeader {
        node: usize,
    },
    /// One directed cycle, listed in edge order.
    Cycle {
        nodes: Vec<usize>,
    },
    LeaderWithInEdges {
        leader: usize,
        in_degree: usize,
    },
    /// Nodes with no path from any leader.
    NotInfluenceable {
        nodes: Vec<usize>,
    },
}

fn external_list(nodes: &[usize]) -> String {
    nodes
        .iter()
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoLeaders => write!(f, "leader set is empty"),
            Violation::SelfLoop { node } => write!(f, "self-loop at node {}", node + 1),
            Violation::DuplicateEdge { from, to } => {
                write!(f, "duplicate edge {} -> {}", from + 1, to + 1)
            }
            Violation::DuplicateLeader { node } => write!(f, "duplicate leader {}", node + 1),
            Violation::Cycle { nodes } => {
                let mut path = external_list(nodes).replace(", ", " -> ");
                if let Some(first) = nodes.first() {
                    path.push_str(&format!(" -> {}", first + 1));
                }
                write!(f, "cycle {path}")
            }
            Violation::LeaderWithInEdges { leader, in_degree } => {
                write!(f, "leader {} has {in_degree} incoming edge(s)", leader + 1)
            }
            Violation::NotInfluenceable { nodes } => write!(
                f,
                "not influenceable: no leader reaches node(s) {}",
                external_list(nodes)
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_cycle(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::Cycle { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationPolicy {
    /// Accept leaders that have incoming edges. Such graphs are excluded
    /// from layered analysis.
    pub allow_nonsource_leaders: bool,
}

/// A validated structured DAG: acyclic, simple, influenceable, with a
/// nonempty leader set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredDag {
    n: usize,
    edges: Vec<(usize, usize)>,
    leaders: Vec<usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl StructuredDag {
    /// Validates 0-based input under the strict policy.
    pub fn new(n: usize, edges: Vec<(usize, usize)>, leaders: Vec<usize>) -> Result<Self> {
        Self::from_raw(
            &RawGraph::new(n, edges, leaders)?,
            ValidationPolicy::default(),
        )
    }

    /// Validates 1-based input under the strict policy.
    pub fn from_external(n: usize, edges: &[(usize, usize)], leaders: &[usize]) -> Result<Self> {
        Self::from_raw(
            &RawGraph::from_external(n, edges, leaders)?,
            ValidationPolicy::default(),
        )
    }

    pub fn from_raw(raw: &RawGraph, policy: ValidationPolicy) -> Result<Self> {
        let mut report = raw.validate();
        if policy.allow_nonsource_leaders {
            report
                .violations
                .retain(|v| !matches!(v, Violation::LeaderWithInEdges { .. }));
        }
        if !report.is_ok() {
            return Err(Error::Invalid(report));
        }
        Ok(Self::from_parts(
            raw.n,
            raw.edges.clone(),
            raw.leaders.clone(),
        ))
    }

    /// Assembles adjacency without validation. Callers guarantee the parts
    /// describe a valid graph.
    pub(crate) fn from_parts(
        n: usize,
        mut edges: Vec<(usize, usize)>,
        mut leaders: Vec<usize>,
    ) -> Self {
        edges.sort_unstable();
        edges.dedup();
        leaders.sort_unstable();
        leaders.dedup();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            out_adj[u].push(v);
            in_adj[v].push(u);
        }
        for adj in in_adj.iter_mut() {
            adj.sort_unstable();
        }
        Self {
            n,
            edges,
            leaders,
            out_adj,
            in_adj,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Edges in ascending `(from, to)` order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Leaders in ascending order.
    pub fn leaders(&self) -> &[usize] {
        &self.leaders
    }

    pub fn leader_count(&self) -> usize {
        self.leaders.len()
    }

    pub fn is_leader(&self, v: usize) -> bool {
        self.leaders.binary_search(&v).is_ok()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_adj[u].binary_search(&v).is_ok()
    }

    pub fn has_nonsource_leaders(&self) -> bool {
        self.leaders.iter().any(|&l| !self.in_adj[l].is_empty())
    }

    /// A topological order; ties resolved by ascending index.
    pub fn topological_order(&self) -> Vec<usize> {
        LayerPeeler::new(self).flatten().collect()
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            n: self.n,
            edges: self.edges.clone(),
            leaders: self.leaders.clone(),
        }
    }
}

/// Source peeling, one layer per step: the first layer is every node with
/// no incoming edge; each later layer is every node whose in-edges all
/// come from already peeled layers. Each layer is sorted ascending.
pub struct LayerPeeler<'a> {
    dag: &'a StructuredDag,
    remaining_in: Vec<usize>,
    current: Vec<usize>,
}

impl<'a> LayerPeeler<'a> {
    pub fn new(dag: &'a StructuredDag) -> Self {
        let remaining_in: Vec<usize> = (0..dag.n).map(|v| dag.in_adj[v].len()).collect();
        let current = (0..dag.n).filter(|&v| remaining_in[v] == 0).collect();
        Self {
            dag,
            remaining_in,
            current,
        }
    }
}

impl Iterator for LayerPeeler<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.current.is_empty() {
            return None;
        }
        let mut next = Vec::new();
        for &u in &self.current {
            for &v in &self.dag.out_adj[u] {
                self.remaining_in[v] -= 1;
                if self.remaining_in[v] == 0 {
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        Some(std::mem::replace(&mut self.current, next))
    }
}

/// Peels until stall. Returns the layers and the nodes never peeled
/// (nonempty exactly when the edge relation has a cycle).
fn peel_all(out_adj: &[Vec<usize>], in_adj: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = out_adj.len();
    let mut remaining: Vec<usize> = in_adj.iter().map(Vec::len).collect();
    let mut layers = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&v| remaining[v] == 0).collect();
    let mut peeled = vec![false; n];
    while !current.is_empty() {
        let mut next = Vec::new();
        for &u in &current {
            peeled[u] = true;
            for &v in &out_adj[u] {
                remaining[v] -= 1;
                if remaining[v] == 0 {
                    next.push(v);
                }
            }
        }
        layers.push(std::mem::take(&mut current));
        current = next;
    }
    let leftover = (0..n).filter(|&v| !peeled[v]).collect();
    (layers, leftover)
}

/// Every unpeeled node keeps an unpeeled in-neighbor, so walking backwards
/// inside the leftover set must revisit a node.
fn find_cycle(in_adj: &[Vec<usize>], leftover: &[usize]) -> Vec<usize> {
    let n = in_adj.len();
    let mut in_leftover = vec![false; n];
    for &v in leftover {
        in_leftover[v] = true;
    }
    let mut pos = vec![usize::MAX; n];
    let mut walk = Vec::new();
    let mut v = leftover[0];
    while pos[v] == usize::MAX {
        pos[v] = walk.len();
        walk.push(v);
        v = *in_adj[v]
            .iter()
            .find(|&&u| in_leftover[u])
            .expect("unpeeled node has an unpeeled in-neighbor");
    }
    let mut cycle = walk[pos[v]..].to_vec();
    cycle.reverse();
    // rotate so the smallest id comes first
    let min_at = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, &x)| x)
        .map(|(i, _)| i)
        .unwrap_or(0);
    cycle.rotate_left(min_at);
    cycle
}

fn reachable_from(out_adj: &[Vec<usize>], roots: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; out_adj.len()];
    let mut queue = VecDeque::new();
    for r in roots {
        if !seen[r] {
            seen[r] = true;
            queue.push_back(r);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in &out_adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Layer index per node (1-based) and the node set of each layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerLabeling {
    layer_of: Vec<usize>,
    layers: Vec<Vec<usize>>,
}

impl LayerLabeling {
    pub(crate) fn from_layers(n: usize, layers: Vec<Vec<usize>>) -> Self {
        let mut layer_of = vec![0; n];
        for (k, layer) in layers.iter().enumerate() {
            for &v in layer {
                layer_of[v] = k + 1;
            }
        }
        Self { layer_of, layers }
    }

    /// Number of layers `p`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// 1-based layer index of `v`.
    pub fn layer_of(&self, v: usize) -> usize {
        self.layer_of[v]
    }

    /// Nodes of layer `k` (1-based), ascending.
    pub fn layer(&self, k: usize) -> &[usize] {
        &self.layers[k - 1]
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    /// Edges that jump over at least one layer.
    pub fn skip_edges(&self, dag: &StructuredDag) -> Vec<(usize, usize)> {
        dag.edges()
            .iter()
            .copied()
            .filter(|&(u, v)| self.layer_of[v] > self.layer_of[u] + 1)
            .collect()
    }

    /// True when every edge joins adjacent layers.
    pub fn is_graded(&self, dag: &StructuredDag) -> bool {
        dag.edges()
            .iter()
            .all(|&(u, v)| self.layer_of[v] == self.layer_of[u] + 1)
    }
}

pub fn label_layers(dag: &StructuredDag) -> LayerLabeling {
    LayerLabeling::from_layers(dag.n, LayerPeeler::new(dag).collect())
}

/// An induced subgraph with its nodes renumbered densely. `original[i]` is
/// the index in the parent graph of node `i`; the renumbering preserves
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedGraph {
    pub graph: StructuredDag,
    pub original: Vec<usize>,
}

impl InducedGraph {
    pub fn local_index(&self, parent_node: usize) -> Option<usize> {
        self.original.binary_search(&parent_node).ok()
    }

    pub fn to_parent(&self, local: &[usize]) -> Vec<usize> {
        local.iter().map(|&i| self.original[i]).collect()
    }
}

/// Subgraph induced by `keep`, retaining the leaders inside it.
pub(crate) fn induce(dag: &StructuredDag, keep: &[bool]) -> InducedGraph {
    let original: Vec<usize> = (0..dag.n).filter(|&v| keep[v]).collect();
    let mut local = vec![usize::MAX; dag.n];
    for (i, &v) in original.iter().enumerate() {
        local[v] = i;
    }
    let edges = dag
        .edges
        .iter()
        .filter(|&&(u, v)| keep[u] && keep[v])
        .map(|&(u, v)| (local[u], local[v]))
        .collect();
    let leaders = dag
        .leaders
        .iter()
        .filter(|&&l| keep[l])
        .map(|&l| local[l])
        .collect();
    InducedGraph {
        graph: StructuredDag::from_parts(original.len(), edges, leaders),
        original,
    }
}

/// The subgraph induced by layers `1..=k`.
pub fn induce_prefix(
    dag: &StructuredDag,
    labeling: &LayerLabeling,
    k: usize,
) -> Result<InducedGraph> {
    if k == 0 || k > labeling.depth() {
        return Err(Error::LayerOutOfRange {
            k,
            depth: labeling.depth(),
        });
    }
    let keep: Vec<bool> = (0..dag.n).map(|v| labeling.layer_of(v) <= k).collect();
    Ok(induce(dag, &keep))
}
