//! Disjoint stem families: maximum node coverage over the whole graph and
//! maximum leader-to-layer coverage, plus exhaustive enumerators that serve
//! as ground truth for the flow computations.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::StemNetwork;
use crate::graph::StructuredDag;

/// Default node budget for the exhaustive routines.
pub const DEFAULT_ENUM_CAP: usize = 15;

/// A set of vertex-disjoint stems. Each stem is a path starting at a
/// distinct leader; a lone leader is a stem of length one.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct StemFamily {
    stems: Vec<Vec<usize>>,
}

impl StemFamily {
    pub fn new(mut stems: Vec<Vec<usize>>) -> Self {
        stems.retain(|s| !s.is_empty());
        stems.sort();
        Self { stems }
    }

    pub fn stems(&self) -> &[Vec<usize>] {
        &self.stems
    }

    pub fn len(&self) -> usize {
        self.stems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stems.is_empty()
    }

    /// All nodes on any stem, ascending.
    pub fn covered(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.stems.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    pub fn covered_count(&self) -> usize {
        self.stems.iter().map(Vec::len).sum()
    }

    /// Last node of every stem, ascending.
    pub fn endpoints(&self) -> Vec<usize> {
        let mut ends: Vec<usize> = self
            .stems
            .iter()
            .filter_map(|s| s.last().copied())
            .collect();
        ends.sort_unstable();
        ends
    }

    /// Checks the structural invariants against `dag`.
    pub fn check(&self, dag: &StructuredDag) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidWitness(msg));
        let mut seen = BTreeSet::new();
        let mut roots = BTreeSet::new();
        for stem in &self.stems {
            let root = stem[0];
            if root >= dag.node_count() || !dag.is_leader(root) {
                return bad(format!("stem starts at non-leader {}", root + 1));
            }
            if !roots.insert(root) {
                return bad(format!("two stems start at leader {}", root + 1));
            }
            for pair in stem.windows(2) {
                if !dag.has_edge(pair[0], pair[1]) {
                    return bad(format!("{} -> {} is not an edge", pair[0] + 1, pair[1] + 1));
                }
            }
            for &v in stem {
                if !seen.insert(v) {
                    return bad(format!("node {} appears twice", v + 1));
                }
            }
        }
        Ok(())
    }
}

/// Maximum number of nodes coverable by disjoint stems, with a witness.
///
/// Min-cost flow of value `m`: profit one per internal arc used. Every
/// leader can always carry its own trivial stem, so all `m` units route.
pub fn generic_dimension(dag: &StructuredDag) -> (usize, StemFamily) {
    coverage_with_leaders(dag, dag.leaders())
}

/// Same as [`generic_dimension`] but with an explicit leader set, which may
/// include nodes that have incoming edges.
pub fn coverage_with_leaders(dag: &StructuredDag, leaders: &[usize]) -> (usize, StemFamily) {
    let mut net = StemNetwork::build(dag, leaders, |_| true, -1);
    let cost = net.min_cost_flow(leaders.len());
    let witness = StemFamily::new(net.stems());
    debug_assert_eq!(witness.covered_count() as i64, -cost);
    ((-cost) as usize, witness)
}

/// Exhaustive counterpart of [`generic_dimension`] for small graphs.
pub fn generic_dimension_exhaustive(
    dag: &StructuredDag,
    cap: usize,
) -> Result<(usize, StemFamily)> {
    if dag.node_count() > cap {
        return Err(Error::BudgetExceeded {
            nodes: dag.node_count(),
            cap,
        });
    }
    let mut search = CoverSearch {
        dag,
        leaders: dag.leaders(),
        used: vec![false; dag.node_count()],
        stems: Vec::new(),
        best: (0, Vec::new()),
    };
    search.leader(0, 0);
    let (count, stems) = search.best;
    Ok((count, StemFamily::new(stems)))
}

struct CoverSearch<'a> {
    dag: &'a StructuredDag,
    leaders: &'a [usize],
    used: Vec<bool>,
    stems: Vec<Vec<usize>>,
    best: (usize, Vec<Vec<usize>>),
}

impl CoverSearch<'_> {
    fn leader(&mut self, idx: usize, count: usize) {
        if idx == self.leaders.len() {
            if count > self.best.0 || self.best.1.is_empty() {
                self.best = (count, self.stems.clone());
            }
            return;
        }
        let free = self.used.iter().filter(|&&u| !u).count();
        if count + free <= self.best.0 && !self.best.1.is_empty() {
            return;
        }
        let l = self.leaders[idx];
        if self.used[l] {
            self.leader(idx + 1, count);
            return;
        }
        self.used[l] = true;
        self.stems.push(vec![l]);
        self.extend(idx, count + 1);
        self.stems.pop();
        self.used[l] = false;
    }

    fn extend(&mut self, idx: usize, count: usize) {
        self.leader(idx + 1, count);
        let last = *self
            .stems
            .last()
            .and_then(|s| s.last())
            .expect("stem nonempty");
        for &w in self.dag.successors(last) {
            if self.used[w] {
                continue;
            }
            self.used[w] = true;
            self.stems.last_mut().expect("stem").push(w);
            self.extend(idx, count + 1);
            self.stems.last_mut().expect("stem").pop();
            self.used[w] = false;
        }
    }
}

fn check_targets(prefix: &StructuredDag, targets: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = targets.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &t in &sorted {
        if t >= prefix.node_count() {
            return Err(Error::NodeOutOfRange {
                id: t + 1,
                n: prefix.node_count(),
            });
        }
        if !prefix.successors(t).is_empty() {
            return Err(Error::TargetNotSink(t));
        }
    }
    Ok(sorted)
}

/// Maximum flow from the leaders into a set of sink targets with unit vertex
/// capacities. Keeps the residual network so single-target removals can be
/// answered by retracting one path instead of recomputing.
#[derive(Debug, Clone)]
pub struct LayerCoverage {
    network: StemNetwork,
    targets: Vec<usize>,
    mu: usize,
}

impl LayerCoverage {
    pub fn new(prefix: &StructuredDag, targets: &[usize]) -> Result<Self> {
        let targets = check_targets(prefix, targets)?;
        let mut is_target = vec![false; prefix.node_count()];
        for &t in &targets {
            is_target[t] = true;
        }
        let mut network = StemNetwork::build(prefix, prefix.leaders(), |v| is_target[v], 0);
        let mu = network.max_flow();
        Ok(Self {
            network,
            targets,
            mu,
        })
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn witness(&self) -> StemFamily {
        StemFamily::new(self.network.stems())
    }

    /// Matched targets of the current witness.
    pub fn matched(&self) -> Vec<usize> {
        self.targets
            .iter()
            .copied()
            .filter(|&t| self.network.drains_through(t))
            .collect()
    }

    /// Whether every maximum matched set contains `target`, i.e. dropping it
    /// from the target set lowers `mu`.
    pub fn is_essential(&self, target: usize) -> Result<bool> {
        if self.targets.binary_search(&target).is_err() {
            return Err(Error::NotATarget(target));
        }
        if !self.network.drains_through(target) {
            // current maximum flow avoids it already
            return Ok(false);
        }
        let mut reduced = self.network.clone();
        reduced.retract_and_close(target);
        Ok(!reduced.augment())
    }
}

/// Maximum number of targets coverable by disjoint stems, with a witness
/// holding only the target-reaching stems.
pub fn max_layer_coverage(
    prefix: &StructuredDag,
    targets: &[usize],
) -> Result<(usize, StemFamily)> {
    let cover = LayerCoverage::new(prefix, targets)?;
    Ok((cover.mu(), cover.witness()))
}

/// Recomputes coverage without `i` and compares.
pub fn is_essential_target(prefix: &StructuredDag, targets: &[usize], i: usize) -> Result<bool> {
    let targets = check_targets(prefix, targets)?;
    if targets.binary_search(&i).is_err() {
        return Err(Error::NotATarget(i));
    }
    let (mu, _) = max_layer_coverage(prefix, &targets)?;
    let without: Vec<usize> = targets.iter().copied().filter(|&t| t != i).collect();
    let (mu_without, _) = max_layer_coverage(prefix, &without)?;
    Ok(mu_without < mu)
}

/// Every achievable maximum matched set, each with one representative
/// family, ordered by matched set.
pub fn enumerate_max_families(
    prefix: &StructuredDag,
    targets: &[usize],
    cap: usize,
) -> Result<Vec<StemFamily>> {
    if prefix.node_count() > cap {
        return Err(Error::BudgetExceeded {
            nodes: prefix.node_count(),
            cap,
        });
    }
    let targets = check_targets(prefix, targets)?;
    let n = prefix.node_count();
    let mut is_target = vec![false; n];
    for &t in &targets {
        is_target[t] = true;
    }
    // nodes from which some target is reachable
    let mut useful = is_target.clone();
    for v in prefix.topological_order().into_iter().rev() {
        if prefix.successors(v).iter().any(|&w| useful[w]) {
            useful[v] = true;
        }
    }
    let mut search = MatchSearch {
        dag: prefix,
        leaders: prefix.leaders(),
        is_target,
        useful,
        used: vec![false; n],
        stems: Vec::new(),
        best: 0,
        found: BTreeMap::new(),
    };
    search.leader(0);
    Ok(search.found.into_values().collect())
}

/// Matched-node set of a layer family (its endpoints).
pub fn matched_set(family: &StemFamily) -> Vec<usize> {
    family.endpoints()
}

struct MatchSearch<'a> {
    dag: &'a StructuredDag,
    leaders: &'a [usize],
    is_target: Vec<bool>,
    useful: Vec<bool>,
    used: Vec<bool>,
    stems: Vec<Vec<usize>>,
    best: usize,
    found: BTreeMap<Vec<usize>, StemFamily>,
}

impl MatchSearch<'_> {
    fn leader(&mut self, idx: usize) {
        if self.stems.len() + (self.leaders.len() - idx) < self.best {
            return;
        }
        if idx == self.leaders.len() {
            self.record();
            return;
        }
        // this leader contributes no target stem
        self.leader(idx + 1);
        let l = self.leaders[idx];
        if self.used[l] || !self.useful[l] {
            return;
        }
        self.used[l] = true;
        self.stems.push(vec![l]);
        self.walk(idx);
        self.stems.pop();
        self.used[l] = false;
    }

    fn walk(&mut self, idx: usize) {
        let last = *self
            .stems
            .last()
            .and_then(|s| s.last())
            .expect("stem nonempty");
        if self.is_target[last] {
            // targets are sinks, so the stem ends here
            self.leader(idx + 1);
            return;
        }
        for &w in self.dag.successors(last) {
            if self.used[w] || !self.useful[w] {
                continue;
            }
            self.used[w] = true;
            self.stems.last_mut().expect("stem").push(w);
            self.walk(idx);
            self.stems.last_mut().expect("stem").pop();
            self.used[w] = false;
        }
    }

    fn record(&mut self) {
        let size = self.stems.len();
        if size < self.best {
            return;
        }
        if size > self.best {
            self.best = size;
            self.found.clear();
        }
        let family = StemFamily::new(self.stems.clone());
        self.found.entry(family.endpoints()).or_insert(family);
    }
}
