//! Test-side oracles written against plain adjacency lists: random DAG
//! sampling, brute-force stem search, peeling, add-a-leader fixed nodes.
#![allow(dead_code)]

use std::collections::BTreeSet;

use fixnode::StructuredDag;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random DAG on at most `max_n` nodes with at most `max_m` leaders. Edges
/// follow a random topological order, so layers may be skipped. Every
/// non-leader gets at least one in-edge.
pub fn random_dag(seed: u64, max_n: usize, max_m: usize) -> StructuredDag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m.min(n));
    let density: f64 = rng.gen_range(0.1..0.5);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut edges = Vec::new();
    for j in m..n {
        let mut has_in = false;
        for i in 0..j {
            if rng.gen_bool(density) {
                edges.push((perm[i], perm[j]));
                has_in = true;
            }
        }
        if !has_in {
            edges.push((perm[rng.gen_range(0..j)], perm[j]));
        }
    }
    let leaders = perm[..m].to_vec();
    StructuredDag::new(n, edges, leaders).expect("sampled graph is valid")
}

/// Random DAG whose edges all join adjacent layers.
pub fn random_graded_dag(seed: u64, max_n: usize, max_m: usize) -> StructuredDag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m.min(n));
    let density: f64 = rng.gen_range(0.2..0.7);
    let mut layers = vec![(0..m).collect::<Vec<_>>()];
    let mut next = m;
    while next < n {
        let w = rng.gen_range(1..=(n - next).min(4));
        layers.push((next..next + w).collect());
        next += w;
    }
    let mut edges = Vec::new();
    for k in 1..layers.len() {
        for &v in &layers[k] {
            let prev = &layers[k - 1];
            let forced = prev[rng.gen_range(0..prev.len())];
            for &u in prev {
                if u == forced || rng.gen_bool(density) {
                    edges.push((u, v));
                }
            }
        }
    }
    StructuredDag::new(n, edges, (0..m).collect()).expect("sampled graph is valid")
}

pub struct Adj {
    pub n: usize,
    pub succ: Vec<Vec<usize>>,
    pub leaders: Vec<usize>,
}

impl Adj {
    pub fn of(dag: &StructuredDag) -> Self {
        let n = dag.node_count();
        let mut succ = vec![Vec::new(); n];
        for &(u, v) in dag.edges() {
            succ[u].push(v);
        }
        Self {
            n,
            succ,
            leaders: dag.leaders().to_vec(),
        }
    }

    /// Subgraph on `keep`, relabelled in increasing id order.
    pub fn restrict(&self, keep: &[usize]) -> (Self, Vec<usize>) {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            local[v] = i;
        }
        let succ = keep
            .iter()
            .map(|&v| {
                self.succ[v]
                    .iter()
                    .filter(|&&w| local[w] != usize::MAX)
                    .map(|&w| local[w])
                    .collect()
            })
            .collect();
        let leaders = self
            .leaders
            .iter()
            .filter(|&&l| local[l] != usize::MAX)
            .map(|&l| local[l])
            .collect();
        (
            Self {
                n: keep.len(),
                succ,
                leaders,
            },
            keep.to_vec(),
        )
    }
}

/// Repeatedly strip nodes without remaining in-edges.
pub fn peel(adj: &Adj) -> Vec<Vec<usize>> {
    let mut indeg = vec![0; adj.n];
    for s in &adj.succ {
        for &w in s {
            indeg[w] += 1;
        }
    }
    let mut layer: Vec<usize> = (0..adj.n).filter(|&v| indeg[v] == 0).collect();
    let mut layers = Vec::new();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj.succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    next.push(w);
                }
            }
        }
        next.sort_unstable();
        layers.push(std::mem::replace(&mut layer, next));
    }
    layers
}

/// Walks every family of vertex-disjoint stems (one optional path per
/// leader, leaders in the given order) and reports the covered set.
struct Walk<'a, F: FnMut(&[bool])> {
    adj: &'a Adj,
    leaders: &'a [usize],
    used: Vec<bool>,
    visit: F,
}

impl<F: FnMut(&[bool])> Walk<'_, F> {
    fn leader(&mut self, i: usize) {
        if i == self.leaders.len() {
            (self.visit)(&self.used);
            return;
        }
        let l = self.leaders[i];
        // empty stem
        self.leader(i + 1);
        if !self.used[l] {
            self.used[l] = true;
            self.extend(i, l);
            self.used[l] = false;
        }
    }

    fn extend(&mut self, i: usize, tail: usize) {
        self.leader(i + 1);
        for k in 0..self.adj.succ[tail].len() {
            let w = self.adj.succ[tail][k];
            if !self.used[w] {
                self.used[w] = true;
                self.extend(i, w);
                self.used[w] = false;
            }
        }
    }
}

fn walk(adj: &Adj, leaders: &[usize], visit: impl FnMut(&[bool])) {
    let mut w = Walk {
        adj,
        leaders,
        used: vec![false; adj.n],
        visit,
    };
    w.leader(0);
}

/// Largest number of nodes covered by disjoint stems from `leaders`,
/// found by trying every family.
pub fn brute_cover(adj: &Adj, leaders: &[usize]) -> usize {
    let mut best = 0;
    walk(adj, leaders, |used| {
        best = best.max(used.iter().filter(|&&u| u).count());
    });
    best
}

pub fn brute_dimension(adj: &Adj) -> usize {
    brute_cover(adj, &adj.leaders)
}

/// Add-a-leader fixed nodes, every dimension computed by [`brute_cover`].
pub fn brute_fixed(adj: &Adj) -> Vec<usize> {
    let base = brute_dimension(adj);
    (0..adj.n)
        .filter(|&k| {
            if adj.leaders.contains(&k) {
                return true;
            }
            let mut leaders = adj.leaders.clone();
            leaders.push(k);
            brute_cover(adj, &leaders) == base
        })
        .collect()
}

/// Maximum-size sets of `targets` covered together by one family.
pub fn brute_matched_sets(adj: &Adj, targets: &[usize]) -> BTreeSet<Vec<usize>> {
    let mut seen = BTreeSet::new();
    walk(adj, &adj.leaders, |used| {
        let hit: Vec<usize> = targets.iter().copied().filter(|&t| used[t]).collect();
        seen.insert(hit);
    });
    let best = seen.iter().map(Vec::len).max().unwrap_or(0);
    seen.into_iter().filter(|s| s.len() == best).collect()
}

pub fn intersection(sets: &BTreeSet<Vec<usize>>) -> Vec<usize> {
    let mut iter = sets.iter();
    let Some(first) = iter.next() else {
        return Vec::new();
    };
    let mut out = first.clone();
    for s in iter {
        out.retain(|v| s.contains(v));
    }
    out
}

pub fn external(nodes: &[usize]) -> Vec<usize> {
    nodes.iter().map(|v| v + 1).collect()
}
