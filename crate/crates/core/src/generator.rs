//! Seeded random layered DAGs. Layer 1 holds the leaders; every node of
//! layer `k >= 2` gets one in-edge from layer `k - 1`, so the prescribed
//! widths are exactly the peeled layers and every node is influenceable.
//! Extra edges go to the adjacent layer or, with `skip_layer_prob`, further
//! down.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{label_layers, StructuredDag};

pub const DEFAULT_SKIP_LAYER_PROB: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Density {
    /// Total edge count, including the mandatory one per non-leader node.
    EdgeCount(usize),
    /// Probability of each optional forward pair.
    EdgeProb(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub widths: Vec<usize>,
    pub density: Density,
    pub seed: u64,
    pub skip_layer_prob: f64,
}

impl GeneratorConfig {
    pub fn leaders(&self) -> usize {
        self.widths.first().copied().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        self.widths.iter().sum()
    }
}

/// `p` layers and `p * width` nodes in total, with exactly `leaders` nodes in
/// the first layer and the rest spread evenly below it (earlier layers take
/// the remainder).
pub fn uniform(
    p: usize,
    width: usize,
    edges: usize,
    leaders: usize,
    seed: u64,
) -> Result<GeneratorConfig> {
    if p == 0 || width == 0 || leaders == 0 {
        return Err(Error::Generator(
            "layers, width and leaders must be positive".into(),
        ));
    }
    let total = p * width;
    let mut widths = vec![leaders];
    if p > 1 {
        if total < leaders + (p - 1) {
            return Err(Error::Generator(format!(
                "{total} nodes cannot fill {p} layers with {leaders} leaders"
            )));
        }
        let rest = total - leaders;
        let (base, extra) = (rest / (p - 1), rest % (p - 1));
        widths.extend((0..p - 1).map(|i| base + usize::from(i < extra)));
    } else if leaders != total {
        return Err(Error::Generator(format!(
            "a single layer of {total} nodes needs {total} leaders"
        )));
    }
    Ok(GeneratorConfig {
        widths,
        density: Density::EdgeCount(edges),
        seed,
        skip_layer_prob: DEFAULT_SKIP_LAYER_PROB,
    })
}

fn check(cfg: &GeneratorConfig) -> Result<()> {
    if cfg.widths.is_empty() || cfg.widths.contains(&0) {
        return Err(Error::Generator(
            "every layer needs at least one node".into(),
        ));
    }
    if !(0.0..=1.0).contains(&cfg.skip_layer_prob) {
        return Err(Error::Generator(format!(
            "skip probability {} outside [0, 1]",
            cfg.skip_layer_prob
        )));
    }
    if let Density::EdgeProb(q) = cfg.density {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Generator(format!(
                "edge probability {q} outside [0, 1]"
            )));
        }
    }
    Ok(())
}

pub fn generate(cfg: &GeneratorConfig) -> Result<StructuredDag> {
    check(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts = Vec::with_capacity(cfg.widths.len());
    let mut n = 0;
    for &w in &cfg.widths {
        starts.push(n);
        n += w;
    }
    let layer_nodes = |k: usize| starts[k]..starts[k] + cfg.widths[k];
    let layer_of: Vec<usize> = (0..cfg.widths.len())
        .flat_map(|k| std::iter::repeat_n(k, cfg.widths[k]))
        .collect();

    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for k in 1..cfg.widths.len() {
        for v in layer_nodes(k) {
            let u = rng.gen_range(layer_nodes(k - 1));
            present[u][v] = true;
            edges.push((u, v));
        }
    }

    // optional pairs: (u, v) with layer(u) < layer(v), not yet present
    let mut adjacent = Vec::new();
    let mut skipping = Vec::new();
    for u in 0..n {
        for v in starts.get(layer_of[u] + 1).copied().unwrap_or(n)..n {
            if present[u][v] {
                continue;
            }
            if layer_of[v] == layer_of[u] + 1 {
                adjacent.push((u, v));
            } else {
                skipping.push((u, v));
            }
        }
    }

    match cfg.density {
        Density::EdgeProb(q) => {
            for &(u, v) in adjacent.iter().chain(&skipping) {
                let keep = if layer_of[v] == layer_of[u] + 1 {
                    q * (1.0 - cfg.skip_layer_prob)
                } else {
                    q * cfg.skip_layer_prob
                };
                if rng.gen_bool(keep.clamp(0.0, 1.0)) {
                    edges.push((u, v));
                }
            }
        }
        Density::EdgeCount(target) => {
            let mandatory = edges.len();
            if target < mandatory {
                return Err(Error::Generator(format!(
                    "{target} edges requested but {mandatory} are needed to connect the layers"
                )));
            }
            let capacity = mandatory + adjacent.len() + skipping.len();
            if target > capacity {
                return Err(Error::Generator(format!(
                    "{target} edges requested but only {capacity} forward pairs exist"
                )));
            }
            adjacent.shuffle(&mut rng);
            skipping.shuffle(&mut rng);
            for _ in mandatory..target {
                let want_skip = rng.gen_bool(cfg.skip_layer_prob);
                let pool = match (want_skip, skipping.is_empty(), adjacent.is_empty()) {
                    (true, false, _) | (_, false, true) => &mut skipping,
                    _ => &mut adjacent,
                };
                edges.push(pool.pop().expect("capacity checked"));
            }
        }
    }

    let leaders: Vec<usize> = layer_nodes(0).collect();
    let dag = StructuredDag::new(n, edges, leaders)?;
    debug_assert_eq!(
        label_layers(&dag)
            .layers()
            .iter()
            .map(Vec::len)
            .collect::<Vec<_>>(),
        cfg.widths
    );
    Ok(dag)
}
