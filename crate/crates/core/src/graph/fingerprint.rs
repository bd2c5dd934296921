//! Id-independent structural comparison of graphs.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use super::layer::LayerKind;
use super::model::ModelGraph;
use super::GraphError;

/// Per-node structural hash: kind, tag, and the hashes of its inputs.
/// Add is commutative, so its input hashes are sorted first.
fn node_hashes(graph: &ModelGraph) -> Result<HashMap<String, u64>, GraphError> {
    let mut hashes = HashMap::with_capacity(graph.len());
    for id in graph.topo_sort()? {
        let node = graph.node(&id).expect("topo order names existing nodes");
        let mut inputs: Vec<u64> = node.inputs.iter().map(|i| hashes[i]).collect();
        if node.kind == LayerKind::Add {
            inputs.sort_unstable();
        }
        let mut h = DefaultHasher::new();
        node.kind.hash(&mut h);
        node.tag.hash(&mut h);
        inputs.hash(&mut h);
        hashes.insert(id, h.finish());
    }
    Ok(hashes)
}

/// Multiset of node hashes plus header fields; equal fingerprints mean the
/// graphs match up to node renaming and insertion order.
pub fn fingerprint(graph: &ModelGraph) -> Result<Vec<u64>, GraphError> {
    let mut all: Vec<u64> = node_hashes(graph)?.into_values().collect();
    all.sort_unstable();
    let mut h = DefaultHasher::new();
    graph.input_shape.hash(&mut h);
    graph.num_classes.hash(&mut h);
    all.push(h.finish());
    Ok(all)
}

pub fn is_isomorphic(a: &ModelGraph, b: &ModelGraph) -> Result<bool, GraphError> {
    Ok(a.len() == b.len() && fingerprint(a)? == fingerprint(b)?)
}
