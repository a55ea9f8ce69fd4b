//! Fixed-node analysis for directed acyclic networks with leader nodes.
//!
//! A node is fixed when it stays controllable under every nonzero choice of
//! edge weights. Three independent methods are provided: a layer-by-layer
//! search over stem covers ([`fixed_nodes_layered`]), an add-a-leader test
//! on the generic dimension ([`fixed_nodes_oracle`]), and a Monte-Carlo rank
//! check on random realizations ([`numeric_fixed_nodes`]).
//!
//! Node ids are 0-based in the library and 1-based in JSON, DOT and CLI
//! output.

pub mod dot;
pub mod error;
pub mod figures;
pub mod fixed;
mod flow;
pub mod generator;
pub mod graph;
pub mod io;
pub mod numeric;
pub mod report;
pub mod stems;

pub use dot::export_dot;
pub use error::{Error, Result};
pub use fixed::{
    fixed_nodes_layered, fixed_nodes_oracle, fixed_nodes_single_leader, prune_uncovered,
    unique_matched_set_layers, FastPath, FixedNodeResult, LayerReport, LayeredOptions, Method,
};
pub use generator::{generate, uniform, Density, GeneratorConfig};
pub use graph::{
    induce_prefix, label_layers, InducedGraph, LayerLabeling, LayerPeeler, RawGraph, StructuredDag,
    ValidationPolicy, ValidationReport, Violation,
};
pub use numeric::{
    controllability_matrix, numeric_fixed_nodes, numeric_fixed_nodes_dag,
    numeric_generic_dimension, sample_realization, NumericFixed, NumericOptions, Realization,
};
pub use report::{analyze, AnalysisOptions, AnalysisReport, MethodKind};
pub use stems::{
    coverage_with_leaders, enumerate_max_families, generic_dimension, generic_dimension_exhaustive,
    is_essential_target, matched_set, max_layer_coverage, LayerCoverage, StemFamily,
};
