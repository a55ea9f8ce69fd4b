//! Node-split unit-capacity flow network over a structured DAG.
//!
//! Graph node `v` becomes `v_in = 2v` and `v_out = 2v + 1` joined by an arc
//! of capacity 1, so integral flows decompose into vertex-disjoint paths.
//! The super-source feeds each leader's in-copy; out-copies of sink-eligible
//! nodes drain into the super-sink. Arcs are inserted in ascending node id
//! order, which fixes the search order and makes results deterministic.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::StructuredDag;

const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone)]
pub(crate) struct StemNetwork {
    n: usize,
    head: Vec<usize>,
    residual: Vec<i32>,
    cost: Vec<i64>,
    adj: Vec<Vec<usize>>,
    sink_arc: Vec<Option<usize>>,
    /// Network nodes in topological order (s, then in/out copies, then t).
    order: Vec<usize>,
    flow: usize,
}

#[inline]
fn vin(v: usize) -> usize {
    2 * v
}

#[inline]
fn vout(v: usize) -> usize {
    2 * v + 1
}

impl StemNetwork {
    /// `drains(v)` decides whether `v_out -> t` exists; `node_cost` is the
    /// cost on every internal arc (-1 to reward coverage, 0 for plain flow).
    pub fn build(
        dag: &StructuredDag,
        leaders: &[usize],
        drains: impl Fn(usize) -> bool,
        node_cost: i64,
    ) -> Self {
        let n = dag.node_count();
        let mut net = Self {
            n,
            head: Vec::new(),
            residual: Vec::new(),
            cost: Vec::new(),
            adj: vec![Vec::new(); 2 * n + 2],
            sink_arc: vec![None; n],
            order: Vec::with_capacity(2 * n + 2),
            flow: 0,
        };
        let (s, t) = (net.source(), net.sink());
        let mut sorted_leaders = leaders.to_vec();
        sorted_leaders.sort_unstable();
        sorted_leaders.dedup();
        for &l in &sorted_leaders {
            net.add_arc(s, vin(l), 0);
        }
        for v in 0..n {
            net.add_arc(vin(v), vout(v), node_cost);
            for &w in dag.successors(v) {
                net.add_arc(vout(v), vin(w), 0);
            }
            if drains(v) {
                let a = net.add_arc(vout(v), t, 0);
                net.sink_arc[v] = Some(a);
            }
        }
        net.order.push(s);
        for v in dag.topological_order() {
            net.order.push(vin(v));
            net.order.push(vout(v));
        }
        net.order.push(t);
        net
    }

    fn source(&self) -> usize {
        2 * self.n
    }

    fn sink(&self) -> usize {
        2 * self.n + 1
    }

    fn add_arc(&mut self, u: usize, v: usize, cost: i64) -> usize {
        let id = self.head.len();
        self.head.extend([v, u]);
        self.residual.extend([1, 0]);
        self.cost.extend([cost, -cost]);
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    fn push_unit(&mut self, arc: usize) {
        self.residual[arc] -= 1;
        self.residual[arc ^ 1] += 1;
    }

    /// Finds one augmenting path by depth-first search and pushes a unit.
    pub fn augment(&mut self) -> bool {
        let (s, t) = (self.source(), self.sink());
        let mut visited = vec![false; self.adj.len()];
        let mut parent_arc = vec![usize::MAX; self.adj.len()];
        let mut stack = vec![(s, 0usize)];
        visited[s] = true;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if u == t {
                break;
            }
            if *next == self.adj[u].len() {
                stack.pop();
                continue;
            }
            let arc = self.adj[u][*next];
            *next += 1;
            let v = self.head[arc];
            if self.residual[arc] > 0 && !visited[v] {
                visited[v] = true;
                parent_arc[v] = arc;
                stack.push((v, 0));
            }
        }
        if !visited[t] {
            return false;
        }
        let mut v = t;
        while v != s {
            let arc = parent_arc[v];
            self.push_unit(arc);
            v = self.head[arc ^ 1];
        }
        self.flow += 1;
        true
    }

    pub fn max_flow(&mut self) -> usize {
        while self.augment() {}
        self.flow
    }

    /// Successive shortest paths for up to `units` units. Potentials start
    /// from one relaxation pass in topological order (exact because the
    /// initial residual network is acyclic); each augmentation then runs
    /// Dijkstra on nonnegative reduced costs. Returns the total cost.
    pub fn min_cost_flow(&mut self, units: usize) -> i64 {
        let (s, t) = (self.source(), self.sink());
        let size = self.adj.len();
        let mut phi = vec![INF; size];
        phi[s] = 0;
        for &u in &self.order {
            if phi[u] == INF {
                continue;
            }
            for &arc in &self.adj[u] {
                if self.residual[arc] > 0 {
                    let v = self.head[arc];
                    phi[v] = phi[v].min(phi[u] + self.cost[arc]);
                }
            }
        }
        fill_unreached(&mut phi);

        let mut total = 0;
        let mut dist = vec![INF; size];
        let mut parent_arc = vec![usize::MAX; size];
        for _ in 0..units {
            dist.fill(INF);
            parent_arc.fill(usize::MAX);
            dist[s] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i64, s)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &arc in &self.adj[u] {
                    if self.residual[arc] == 0 {
                        continue;
                    }
                    let v = self.head[arc];
                    let reduced = self.cost[arc] + phi[u] - phi[v];
                    debug_assert!(reduced >= 0, "negative reduced cost");
                    if d + reduced < dist[v] {
                        dist[v] = d + reduced;
                        parent_arc[v] = arc;
                        heap.push(Reverse((dist[v], v)));
                    }
                }
            }
            if dist[t] == INF {
                break;
            }
            let mut v = t;
            while v != s {
                let arc = parent_arc[v];
                self.push_unit(arc);
                total += self.cost[arc];
                v = self.head[arc ^ 1];
            }
            self.flow += 1;
            for (p, &d) in phi.iter_mut().zip(&dist) {
                if d < INF {
                    *p += d;
                }
            }
            // unreached nodes move by the largest finite distance, which
            // keeps every residual reduced cost nonnegative
            let shift = dist.iter().copied().filter(|&d| d < INF).max().unwrap_or(0);
            for (p, &d) in phi.iter_mut().zip(&dist) {
                if d == INF {
                    *p += shift;
                }
            }
        }
        total
    }

    /// Decomposes the current flow into leader-rooted node sequences,
    /// ordered by leader.
    pub fn stems(&self) -> Vec<Vec<usize>> {
        let (s, t) = (self.source(), self.sink());
        let mut stems = Vec::new();
        for &arc in &self.adj[s] {
            if arc % 2 != 0 || self.residual[arc ^ 1] == 0 {
                continue;
            }
            let mut stem = Vec::new();
            let mut node = self.head[arc];
            while node != t {
                let v = node / 2;
                stem.push(v);
                let out = vout(v);
                node = self.adj[out]
                    .iter()
                    .find(|&&a| a % 2 == 0 && self.residual[a ^ 1] > 0)
                    .map(|&a| self.head[a])
                    .expect("flow into a node leaves it");
            }
            stems.push(stem);
        }
        stems.sort();
        stems
    }

    /// Whether a unit of flow currently drains through `v`.
    pub fn drains_through(&self, v: usize) -> bool {
        self.sink_arc[v].is_some_and(|a| self.residual[a ^ 1] > 0)
    }

    /// Cancels the unit draining through `v`, walking back to the source,
    /// and removes `v`'s sink arc. No-op on the flow if nothing drains there.
    pub fn retract_and_close(&mut self, v: usize) {
        let Some(sink_arc) = self.sink_arc[v] else {
            return;
        };
        if self.residual[sink_arc ^ 1] > 0 {
            let s = self.source();
            self.push_unit(sink_arc ^ 1);
            let mut node = vout(v);
            while node != s {
                let back = *self.adj[node]
                    .iter()
                    .find(|&&a| a % 2 == 1 && self.residual[a] > 0)
                    .expect("node carrying flow has a flowed in-arc");
                self.push_unit(back);
                node = self.head[back];
            }
            self.flow -= 1;
        }
        self.residual[sink_arc] = 0;
        self.residual[sink_arc ^ 1] = 0;
    }
}

fn fill_unreached(phi: &mut [i64]) {
    let shift = phi.iter().copied().filter(|&d| d < INF).max().unwrap_or(0);
    for p in phi.iter_mut() {
        if *p == INF {
            *p = shift;
        }
    }
}
