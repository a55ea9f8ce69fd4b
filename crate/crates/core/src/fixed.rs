//! Fixed-node criteria: the add-a-leader reference test, the single-leader
//! singleton-layer rule, and the layer-by-layer search with its shortcuts.
//!
//! The layered search analyzes layer `k` inside the subgraph induced by
//! layers `1..=k` only. That is exact when every edge joins adjacent layers
//! (see [`LayerLabeling::is_graded`]). Edges that skip layers let stems
//! bypass a layer, and then fixedness can depend on deeper layers; the
//! layered result may disagree with [`fixed_nodes_oracle`] on such graphs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{induce, label_layers, LayerLabeling, LayerPeeler, StructuredDag};
use crate::stems::{
    coverage_with_leaders, enumerate_max_families, generic_dimension, matched_set, LayerCoverage,
    StemFamily, DEFAULT_ENUM_CAP,
};

/// Which rule settled a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FastPath {
    SingletonLayer,
    UniqueMatchedSet,
    UniqueFixedInEdge,
    Essentiality,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Layered,
    Oracle,
    SingleLeader,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerReport {
    /// 1-based layer index.
    pub layer: usize,
    pub targets: Vec<usize>,
    pub mu: usize,
    pub fixed: Vec<usize>,
    pub fast_path: FastPath,
    /// Targets skipped as certified non-fixed (outside a maximum cover).
    pub pruned: Vec<usize>,
    /// Every maximum matched set, when enumeration ran for this layer.
    pub matched_sets: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedNodeResult {
    pub fixed_nodes: Vec<usize>,
    pub per_layer: Vec<LayerReport>,
    pub generic_dim: usize,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayeredOptions {
    /// Skip targets outside a maximum cover.
    pub prune: bool,
    /// Enumerate matched sets for layers whose prefix has at most this many
    /// nodes. `None` disables enumeration.
    pub enum_cap: Option<usize>,
}

impl Default for LayeredOptions {
    fn default() -> Self {
        Self {
            prune: true,
            enum_cap: Some(DEFAULT_ENUM_CAP),
        }
    }
}

/// Node `k` is fixed iff making it an extra leader leaves the generic
/// dimension unchanged. Leaders are fixed without recomputation.
pub fn fixed_nodes_oracle(dag: &StructuredDag) -> FixedNodeResult {
    let (d0, _) = generic_dimension(dag);
    let mut leaders = dag.leaders().to_vec();
    let fixed_nodes = (0..dag.node_count())
        .filter(|&k| {
            if dag.is_leader(k) {
                return true;
            }
            leaders.push(k);
            let (d, _) = coverage_with_leaders(dag, &leaders);
            leaders.pop();
            d == d0
        })
        .collect();
    FixedNodeResult {
        fixed_nodes,
        per_layer: Vec::new(),
        generic_dim: d0,
        method: Method::Oracle,
    }
}

/// With one leader, the fixed nodes are the members of singleton layers.
pub fn fixed_nodes_single_leader(
    dag: &StructuredDag,
    labeling: &LayerLabeling,
) -> Result<FixedNodeResult> {
    if dag.leader_count() != 1 {
        return Err(Error::NotSingleLeader(dag.leader_count()));
    }
    let mut fixed_nodes = Vec::new();
    let per_layer = labeling
        .layers()
        .iter()
        .enumerate()
        .map(|(i, layer)| {
            let singleton = layer.len() == 1;
            if singleton {
                fixed_nodes.push(layer[0]);
            }
            LayerReport {
                layer: i + 1,
                targets: layer.clone(),
                mu: 1,
                fixed: if singleton { layer.clone() } else { Vec::new() },
                fast_path: if singleton {
                    FastPath::SingletonLayer
                } else {
                    FastPath::None
                },
                pruned: Vec::new(),
                matched_sets: None,
            }
        })
        .collect();
    fixed_nodes.sort_unstable();
    Ok(FixedNodeResult {
        fixed_nodes,
        per_layer,
        generic_dim: labeling.depth(),
        method: Method::SingleLeader,
    })
}

/// Nodes outside a maximum cover; none of them can be fixed.
pub fn prune_uncovered(dag: &StructuredDag, witness: &StemFamily) -> Result<Vec<usize>> {
    witness.check(dag)?;
    let (dimension, _) = generic_dimension(dag);
    if witness.covered_count() != dimension {
        return Err(Error::WitnessNotMaximum {
            covered: witness.covered_count(),
            dimension,
        });
    }
    let mut covered = vec![false; dag.node_count()];
    for v in witness.covered() {
        covered[v] = true;
    }
    Ok((0..dag.node_count()).filter(|&v| !covered[v]).collect())
}

/// Layer-by-layer search: peel a layer, build the prefix graph, settle each
/// target of the new layer, accumulate.
///
/// Per layer: a singleton layer is fixed outright; an enumerated layer with
/// a unique matched set fixes exactly that set; otherwise each target is
/// settled by the in-edge shortcut, uncovered-node pruning, or the essentiality
/// test, in that order.
pub fn fixed_nodes_layered(
    dag: &StructuredDag,
    options: &LayeredOptions,
) -> Result<FixedNodeResult> {
    if dag.has_nonsource_leaders() {
        return Err(Error::NonSourceLeaders);
    }
    let n = dag.node_count();
    let (generic_dim, cover) = generic_dimension(dag);
    let mut in_cover = vec![false; n];
    for v in cover.covered() {
        in_cover[v] = true;
    }

    let mut layer_of = vec![0usize; n];
    let mut is_fixed = vec![false; n];
    let mut in_prefix = vec![false; n];
    let mut per_layer = Vec::new();

    for (idx, layer) in LayerPeeler::new(dag).enumerate() {
        let k = idx + 1;
        for &v in &layer {
            layer_of[v] = k;
            in_prefix[v] = true;
        }
        let prefix = induce(dag, &in_prefix);
        let local: Vec<usize> = layer
            .iter()
            .map(|&v| {
                prefix
                    .local_index(v)
                    .expect("layer node lies in its prefix")
            })
            .collect();
        let coverage = LayerCoverage::new(&prefix.graph, &local)?;

        let matched_sets = match options.enum_cap {
            Some(cap) if prefix.graph.node_count() <= cap => {
                let families = enumerate_max_families(&prefix.graph, &local, cap)?;
                Some(
                    families
                        .iter()
                        .map(|f| prefix.to_parent(&matched_set(f)))
                        .collect::<Vec<_>>(),
                )
            }
            _ => None,
        };

        let mut fixed = Vec::new();
        let mut pruned = Vec::new();
        let fast_path;
        if layer.len() == 1 {
            fixed.push(layer[0]);
            fast_path = FastPath::SingletonLayer;
        } else if let Some([only]) = matched_sets.as_deref() {
            fixed.extend_from_slice(only);
            fast_path = FastPath::UniqueMatchedSet;
        } else {
            let mut used_in_edge = false;
            let mut used_essentiality = false;
            for (&v, &lv) in layer.iter().zip(&local) {
                if unique_fixed_in_edge(dag, v, k, &layer_of, &is_fixed) {
                    used_in_edge = true;
                    fixed.push(v);
                } else if options.prune && !in_cover[v] {
                    pruned.push(v);
                } else {
                    used_essentiality = true;
                    if coverage.is_essential(lv)? {
                        fixed.push(v);
                    }
                }
            }
            fast_path = if used_essentiality {
                FastPath::Essentiality
            } else if used_in_edge {
                FastPath::UniqueFixedInEdge
            } else {
                FastPath::None
            };
        }
        for &v in &fixed {
            is_fixed[v] = true;
        }
        per_layer.push(LayerReport {
            layer: k,
            targets: layer,
            mu: coverage.mu(),
            fixed,
            fast_path,
            pruned,
            matched_sets,
        });
    }

    let fixed_nodes = (0..n).filter(|&v| is_fixed[v]).collect();
    Ok(FixedNodeResult {
        fixed_nodes,
        per_layer,
        generic_dim,
        method: Method::Layered,
    })
}

/// `v` in layer `k` has a single in-edge, it comes from a fixed node `j`
/// in layer `k - 1`, and that edge is also `j`'s only out-edge.
fn unique_fixed_in_edge(
    dag: &StructuredDag,
    v: usize,
    k: usize,
    layer_of: &[usize],
    is_fixed: &[bool],
) -> bool {
    match dag.predecessors(v) {
        [j] => layer_of[*j] + 1 == k && is_fixed[*j] && dag.successors(*j).len() == 1,
        _ => false,
    }
}

/// 1-based indices of layers with exactly one maximum matched set.
pub fn unique_matched_set_layers(dag: &StructuredDag, cap: usize) -> Result<Vec<usize>> {
    if dag.has_nonsource_leaders() {
        return Err(Error::NonSourceLeaders);
    }
    let labeling = label_layers(dag);
    let mut keep = vec![false; dag.node_count()];
    let mut unique = Vec::new();
    for (idx, layer) in labeling.layers().iter().enumerate() {
        for &v in layer {
            keep[v] = true;
        }
        let prefix = induce(dag, &keep);
        let local: Vec<usize> = layer
            .iter()
            .map(|&v| {
                prefix
                    .local_index(v)
                    .expect("layer node lies in its prefix")
            })
            .collect();
        if enumerate_max_families(&prefix.graph, &local, cap)?.len() == 1 {
            unique.push(idx + 1);
        }
    }
    Ok(unique)
}

/// Intersection of matched sets; empty input gives an empty set.
pub fn intersect_all(sets: &[Vec<usize>]) -> Vec<usize> {
    let Some((first, rest)) = sets.split_first() else {
        return Vec::new();
    };
    first
        .iter()
        .copied()
        .filter(|v| rest.iter().all(|s| s.contains(v)))
        .collect()
}
