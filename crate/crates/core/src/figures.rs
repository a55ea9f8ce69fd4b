//! The worked example graphs used throughout the tests and the CLI demos.
//! Edge lists use 1-based ids.

use crate::graph::{RawGraph, StructuredDag};

/// Single leader `{1}`, five layers.
pub const TREE7_EDGES: [(usize, usize); 6] = [(1, 2), (2, 3), (2, 4), (4, 5), (4, 6), (5, 7)];

/// Leaders `{1, 2}`; `5 -> 9` skips a layer.
pub const SKIP9_EDGES: [(usize, usize); 9] = [
    (1, 3),
    (1, 4),
    (2, 4),
    (3, 5),
    (3, 6),
    (4, 7),
    (5, 9),
    (7, 8),
    (8, 9),
];

/// Leaders `{1, 2}`.
pub const MERGE10_EDGES: [(usize, usize); 11] = [
    (1, 3),
    (2, 4),
    (2, 5),
    (3, 6),
    (4, 6),
    (5, 7),
    (6, 8),
    (6, 9),
    (7, 9),
    (8, 10),
    (9, 10),
];

/// Leaders `{1, 2}`.
pub const LADDER13_EDGES: [(usize, usize); 14] = [
    (1, 3),
    (1, 4),
    (2, 5),
    (3, 6),
    (4, 6),
    (5, 7),
    (5, 8),
    (6, 9),
    (6, 10),
    (7, 10),
    (7, 11),
    (10, 12),
    (10, 13),
    (11, 13),
];

fn build(n: usize, edges: &[(usize, usize)], leaders: &[usize]) -> StructuredDag {
    StructuredDag::from_external(n, edges, leaders).expect("figure graphs are valid")
}

pub fn tree7() -> StructuredDag {
    build(7, &TREE7_EDGES, &[1])
}

pub fn skip9() -> StructuredDag {
    build(9, &SKIP9_EDGES, &[1, 2])
}

pub fn merge10() -> StructuredDag {
    build(10, &MERGE10_EDGES, &[1, 2])
}

pub fn ladder13() -> StructuredDag {
    build(13, &LADDER13_EDGES, &[1, 2])
}

pub fn all() -> Vec<StructuredDag> {
    vec![tree7(), skip9(), merge10(), ladder13()]
}

/// The cyclic three-node pattern `1 <-> 2 <-> 3` with the input on node 2.
/// Not a DAG; only the numeric routines accept it.
pub fn three_node_pattern() -> RawGraph {
    RawGraph::from_external(3, &[(1, 2), (2, 1), (2, 3), (3, 2)], &[2]).expect("ids in range")
}
