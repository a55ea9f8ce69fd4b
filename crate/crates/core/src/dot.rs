//! Graphviz export. Nodes are grouped into one `rank=same` subgraph per
//! layer; leaders and fixed nodes carry a `class` attribute so the renderer
//! picks the colors.

use std::fmt::Write as _;

use crate::graph::{LayerLabeling, StructuredDag};

/// `fixed` holds 0-based ids; labels in the output are 1-based.
pub fn export_dot(dag: &StructuredDag, labeling: &LayerLabeling, fixed: &[usize]) -> String {
    let n = dag.node_count();
    let mut is_fixed = vec![false; n];
    for &v in fixed {
        if v < n {
            is_fixed[v] = true;
        }
    }
    let mut out = String::from("digraph G {\n  rankdir=TB;\n  node [shape=circle];\n");
    for (k, layer) in labeling.layers().iter().enumerate() {
        let _ = writeln!(out, "  subgraph layer_{} {{", k + 1);
        out.push_str("    rank=same;\n");
        for &v in layer {
            let mut classes = Vec::new();
            if dag.is_leader(v) {
                classes.push("leader");
            }
            if is_fixed[v] {
                classes.push("fixed");
            }
            if classes.is_empty() {
                let _ = writeln!(out, "    {};", v + 1);
            } else {
                let _ = writeln!(out, "    {} [class=\"{}\"];", v + 1, classes.join(" "));
            }
        }
        out.push_str("  }\n");
    }
    for &(u, v) in dag.edges() {
        let _ = writeln!(out, "  {} -> {};", u + 1, v + 1);
    }
    out.push_str("}\n");
    out
}
