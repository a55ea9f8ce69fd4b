//! Cross-method analysis report. All node ids are 1-based.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixed::{
    fixed_nodes_layered, fixed_nodes_oracle, FastPath, LayerReport, LayeredOptions,
};
use crate::graph::{label_layers, LayerLabeling, StructuredDag};
use crate::io::{digest, GraphFile};
use crate::numeric::{numeric_fixed_nodes, NumericOptions};
use crate::stems::{generic_dimension, StemFamily};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    Layered,
    Oracle,
    Numeric,
}

impl MethodKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Layered => "layered",
            Self::Oracle => "oracle",
            Self::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub methods: Vec<MethodKind>,
    pub layered: LayeredOptions,
    pub numeric: NumericOptions,
    pub timing: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            methods: vec![MethodKind::Layered, MethodKind::Oracle, MethodKind::Numeric],
            layered: LayeredOptions::default(),
            numeric: NumericOptions::default(),
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputSummary {
    pub digest: String,
    pub n: usize,
    pub edges: usize,
    pub leaders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelingSummary {
    pub depth: usize,
    pub layers: Vec<Vec<usize>>,
    pub skip_edges: Vec<[usize; 2]>,
}

impl LabelingSummary {
    pub fn new(dag: &StructuredDag, labeling: &LayerLabeling) -> Self {
        Self {
            depth: labeling.depth(),
            layers: labeling.layers().iter().map(|l| external(l)).collect(),
            skip_edges: labeling
                .skip_edges(dag)
                .into_iter()
                .map(|(u, v)| [u + 1, v + 1])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerSummary {
    pub layer: usize,
    pub targets: Vec<usize>,
    pub mu: usize,
    pub fixed: Vec<usize>,
    pub fast_path: FastPath,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pruned: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched_sets: Option<Vec<Vec<usize>>>,
}

impl From<&LayerReport> for LayerSummary {
    fn from(r: &LayerReport) -> Self {
        Self {
            layer: r.layer,
            targets: external(&r.targets),
            mu: r.mu,
            fixed: external(&r.fixed),
            fast_path: r.fast_path,
            pruned: external(&r.pruned),
            matched_sets: r
                .matched_sets
                .as_ref()
                .map(|sets| sets.iter().map(|s| external(s)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericSummary {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_rank: usize,
    pub trials_run: usize,
    pub max_rank_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    pub fixed: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_layer: Option<Vec<LayerSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericSummary>,
}

/// A node on which the methods split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub node: usize,
    pub fixed_by: Vec<MethodKind>,
    pub free_by: Vec<MethodKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub input: InputSummary,
    pub labeling: LabelingSummary,
    pub generic_dim: usize,
    pub witness: Vec<Vec<usize>>,
    pub methods: BTreeMap<MethodKind, MethodResult>,
    pub agree: bool,
    pub discrepancies: Vec<Discrepancy>,
    /// Seconds per method; only when requested, since it breaks
    /// reproducibility of the output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<BTreeMap<MethodKind, f64>>,
}

fn external(nodes: &[usize]) -> Vec<usize> {
    nodes.iter().map(|v| v + 1).collect()
}

fn witness_external(w: &StemFamily) -> Vec<Vec<usize>> {
    w.stems().iter().map(|s| external(s)).collect()
}

pub fn analyze(dag: &StructuredDag, options: &AnalysisOptions) -> Result<AnalysisReport> {
    let labeling = label_layers(dag);
    let (generic_dim, witness) = generic_dimension(dag);
    let mut methods = BTreeMap::new();
    let mut timing = BTreeMap::new();
    let mut kinds = options.methods.clone();
    kinds.sort_unstable();
    kinds.dedup();
    for kind in kinds {
        let start = Instant::now();
        let result = match kind {
            MethodKind::Layered => {
                let r = fixed_nodes_layered(dag, &options.layered)?;
                MethodResult {
                    fixed: external(&r.fixed_nodes),
                    per_layer: Some(r.per_layer.iter().map(LayerSummary::from).collect()),
                    numeric: None,
                }
            }
            MethodKind::Oracle => MethodResult {
                fixed: external(&fixed_nodes_oracle(dag).fixed_nodes),
                per_layer: None,
                numeric: None,
            },
            MethodKind::Numeric => {
                let opts = NumericOptions {
                    expected_dim: Some(generic_dim),
                    ..options.numeric
                };
                let r = numeric_fixed_nodes(&dag.to_raw(), &opts)?;
                MethodResult {
                    fixed: external(&r.fixed),
                    per_layer: None,
                    numeric: Some(NumericSummary {
                        trials: opts.trials,
                        seed: opts.seed,
                        tol: opts.tol,
                        max_rank: r.max_rank,
                        trials_run: r.trials_run,
                        max_rank_trials: r.max_rank_trials,
                    }),
                }
            }
        };
        timing.insert(kind, start.elapsed().as_secs_f64());
        methods.insert(kind, result);
    }
    let mut report = AnalysisReport {
        schema: SCHEMA_VERSION,
        input: InputSummary {
            digest: digest(&GraphFile::from_dag(dag)),
            n: dag.node_count(),
            edges: dag.edges().len(),
            leaders: external(dag.leaders()),
        },
        labeling: LabelingSummary::new(dag, &labeling),
        generic_dim,
        witness: witness_external(&witness),
        methods,
        agree: true,
        discrepancies: Vec::new(),
        timing: options.timing.then_some(timing),
    };
    report.recompare();
    Ok(report)
}

/// Nodes (1-based) on which the given fixed sets do not all agree.
pub fn compare_methods(n: usize, results: &BTreeMap<MethodKind, MethodResult>) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for node in 1..=n {
        let (fixed_by, free_by): (Vec<MethodKind>, Vec<MethodKind>) = results
            .keys()
            .copied()
            .partition(|k| results[k].fixed.binary_search(&node).is_ok());
        if !fixed_by.is_empty() && !free_by.is_empty() {
            out.push(Discrepancy {
                node,
                fixed_by,
                free_by,
            });
        }
    }
    out
}

impl AnalysisReport {
    /// Refreshes `agree` and `discrepancies` after the method results change.
    pub fn recompare(&mut self) {
        self.discrepancies = compare_methods(self.input.n, &self.methods);
        self.agree = self.discrepancies.is_empty();
    }

    /// Toggles one node (1-based) in one method's fixed set. Used to check
    /// that disagreement detection reacts to corrupted results.
    pub fn flip(&mut self, kind: MethodKind, node: usize) -> Result<()> {
        if node == 0 || node > self.input.n {
            return Err(Error::NodeOutOfRange {
                id: node,
                n: self.input.n,
            });
        }
        if let Some(result) = self.methods.get_mut(&kind) {
            match result.fixed.binary_search(&node) {
                Ok(i) => {
                    result.fixed.remove(i);
                }
                Err(i) => result.fixed.insert(i, node),
            }
        }
        self.recompare();
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "nodes: {}  edges: {}  leaders: {:?}",
            self.input.n, self.input.edges, self.input.leaders
        );
        let _ = writeln!(out, "digest: {}", self.input.digest);
        let _ = writeln!(out, "layers: {}", self.labeling.depth);
        for (k, layer) in self.labeling.layers.iter().enumerate() {
            let _ = writeln!(out, "  l{}: {:?}", k + 1, layer);
        }
        if !self.labeling.skip_edges.is_empty() {
            let _ = writeln!(out, "skip edges: {:?}", self.labeling.skip_edges);
        }
        let _ = writeln!(out, "generic dimension: {}", self.generic_dim);
        let stems: Vec<String> = self
            .witness
            .iter()
            .map(|s| {
                s.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("->")
            })
            .collect();
        let _ = writeln!(out, "witness: {}", stems.join(", "));
        for (kind, result) in &self.methods {
            let _ = writeln!(out, "{}: {:?}", kind.name(), result.fixed);
            for layer in result.per_layer.iter().flatten() {
                let _ = writeln!(
                    out,
                    "  l{} mu={} fixed={:?} ({:?})",
                    layer.layer, layer.mu, layer.fixed, layer.fast_path
                );
            }
        }
        if self.agree {
            let _ = writeln!(out, "methods agree");
        } else {
            for d in &self.discrepancies {
                let _ = writeln!(
                    out,
                    "disagreement at node {}: fixed by {:?}, free by {:?}",
                    d.node, d.fixed_by, d.free_by
                );
            }
        }
        out
    }
}
