use std::collections::{BTreeMap, HashMap};

use super::layer::{LayerKind, LayerNode, TensorShape};
use super::shape::{infer_shapes, ShapeMap};
use super::GraphError;

/// A CNN as an ordered DAG of layer nodes.
///
/// Node order is insertion order; it is the tie-break for every traversal so
/// that serialized output is byte-stable.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGraph {
    pub name: String,
    pub input_shape: TensorShape,
    pub num_classes: usize,
    pub metadata: BTreeMap<String, String>,
    nodes: Vec<LayerNode>,
    index: HashMap<String, usize>,
}

impl ModelGraph {
    pub fn new(name: impl Into<String>, input_shape: TensorShape, num_classes: usize) -> Self {
        Self {
            name: name.into(),
            input_shape,
            num_classes,
            metadata: BTreeMap::new(),
            nodes: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Assembles a graph from raw nodes without requiring inputs to precede
    /// their consumers. Ids must be unique and every input must name a node,
    /// but cycles are only caught later by [`ModelGraph::topo_sort`].
    pub fn from_nodes(
        name: impl Into<String>,
        input_shape: TensorShape,
        num_classes: usize,
        nodes: Vec<LayerNode>,
    ) -> Result<Self, GraphError> {
        let mut graph = Self::new(name, input_shape, num_classes);
        for (i, node) in nodes.iter().enumerate() {
            if graph.index.insert(node.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateId(node.id.clone()));
            }
        }
        for node in &nodes {
            check_arity(node)?;
            if let Some(missing) = node.inputs.iter().find(|i| !graph.index.contains_key(*i)) {
                return Err(GraphError::UnknownInput {
                    node: node.id.clone(),
                    input: missing.clone(),
                });
            }
        }
        graph.nodes = nodes;
        Ok(graph)
    }

    pub fn nodes(&self) -> &[LayerNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&LayerNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Appends `node`, consuming the graph.
    pub fn add_layer(mut self, node: LayerNode) -> Result<Self, GraphError> {
        self.push(node)?;
        Ok(self)
    }

    /// In-place form of [`ModelGraph::add_layer`].
    pub fn push(&mut self, node: LayerNode) -> Result<(), GraphError> {
        if self.index.contains_key(&node.id) {
            return Err(GraphError::DuplicateId(node.id));
        }
        check_arity(&node)?;
        if let Some(missing) = node.inputs.iter().find(|i| !self.index.contains_key(*i)) {
            return Err(GraphError::UnknownInput {
                node: node.id.clone(),
                input: missing.clone(),
            });
        }
        self.index.insert(node.id.clone(), self.nodes.len());
        self.nodes.push(node);
        Ok(())
    }

    /// Mutable access for rewrite passes inside the crate. Callers must not
    /// change ids through this.
    pub(crate) fn node_mut(&mut self, id: &str) -> Option<&mut LayerNode> {
        self.index.get(id).map(|&i| &mut self.nodes[i])
    }

    /// Ids of nodes that list `id` among their inputs, in insertion order.
    pub fn consumers(&self, id: &str) -> Vec<&str> {
        self.nodes
            .iter()
            .filter(|n| n.inputs.iter().any(|i| i == id))
            .map(|n| n.id.as_str())
            .collect()
    }

    /// Kahn's algorithm; ready nodes are released in insertion order.
    pub fn topo_sort(&self) -> Result<Vec<String>, GraphError> {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        let mut consumers: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, node) in self.nodes.iter().enumerate() {
            for input in &node.inputs {
                let src = self.index[input];
                indegree[i] += 1;
                consumers[src].push(i);
            }
        }
        // A min-heap over insertion positions keeps the order deterministic.
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = indegree
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(i, _)| std::cmp::Reverse(i))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(std::cmp::Reverse(i)) = ready.pop() {
            order.push(i);
            for &c in &consumers[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(std::cmp::Reverse(c));
                }
            }
        }
        if order.len() != n {
            let stuck = (0..n)
                .filter(|&i| indegree[i] > 0)
                .map(|i| self.nodes[i].id.clone())
                .collect();
            return Err(GraphError::CycleDetected(stuck));
        }
        Ok(order.into_iter().map(|i| self.nodes[i].id.clone()).collect())
    }

    /// Full structural validation; returns the inferred shapes on success.
    pub fn validate(&self) -> Result<ShapeMap, GraphError> {
        if self.num_classes == 0 {
            return Err(GraphError::InvalidGraph("num_classes must be >= 1".into()));
        }
        self.topo_sort()?;
        let inputs: Vec<&str> = self
            .nodes
            .iter()
            .filter(|n| n.kind == LayerKind::Input)
            .map(|n| n.id.as_str())
            .collect();
        if inputs.len() != 1 {
            return Err(GraphError::InputCount(inputs.len()));
        }
        let terminals: Vec<String> = self
            .nodes
            .iter()
            .filter(|n| self.consumers(&n.id).is_empty())
            .map(|n| n.id.clone())
            .collect();
        if terminals.len() != 1 {
            return Err(GraphError::TerminalCount(terminals));
        }
        infer_shapes(self)
    }

    /// The unique node without consumers, if there is exactly one.
    pub fn terminal(&self) -> Option<&LayerNode> {
        let mut consumed = vec![false; self.nodes.len()];
        for node in &self.nodes {
            for input in &node.inputs {
                consumed[self.index[input]] = true;
            }
        }
        let mut it = self
            .nodes
            .iter()
            .zip(consumed)
            .filter(|(_, c)| !c)
            .map(|(n, _)| n);
        match (it.next(), it.next()) {
            (Some(n), None) => Some(n),
            _ => None,
        }
    }

    /// Rebuilds the graph from a new node list, keeping header fields.
    pub(crate) fn with_nodes(&self, nodes: Vec<LayerNode>) -> Result<Self, GraphError> {
        let mut g = Self::from_nodes(
            self.name.clone(),
            self.input_shape,
            self.num_classes,
            nodes,
        )?;
        g.metadata = self.metadata.clone();
        Ok(g)
    }
}

fn check_arity(node: &LayerNode) -> Result<(), GraphError> {
    let expected = node.kind.arity();
    if node.inputs.len() != expected {
        return Err(GraphError::Arity {
            node: node.id.clone(),
            kind: node.kind.name(),
            expected,
            got: node.inputs.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::layer::{Kernel, Padding, Stride};

    fn shape() -> TensorShape {
        TensorShape::new(8, 8, 3).unwrap()
    }

    fn conv(filters: usize) -> LayerKind {
        LayerKind::Conv2D {
            filters,
            kernel: Kernel::K3,
            stride: Stride::One,
            padding: Padding::Same,
            has_bias: false,
        }
    }

    #[test]
    fn add_layer_base_case() {
        let g = ModelGraph::new("g", shape(), 2)
            .add_layer(LayerNode::new("in", LayerKind::Input, &[]))
            .unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn add_layer_rejects_duplicates_and_unknown_inputs() {
        let g = ModelGraph::new("g", shape(), 2)
            .add_layer(LayerNode::new("in", LayerKind::Input, &[]))
            .unwrap();
        let err = g
            .clone()
            .add_layer(LayerNode::new("in", LayerKind::BatchNorm, &["in"]))
            .unwrap_err();
        assert!(matches!(err, GraphError::DuplicateId(id) if id == "in"));
        let err = g
            .add_layer(LayerNode::new("bn", LayerKind::BatchNorm, &["nope"]))
            .unwrap_err();
        assert!(matches!(err, GraphError::UnknownInput { .. }));
    }

    #[test]
    fn add_requires_two_inputs() {
        let g = ModelGraph::new("g", shape(), 2)
            .add_layer(LayerNode::new("in", LayerKind::Input, &[]))
            .unwrap();
        let err = g
            .add_layer(LayerNode::new("add", LayerKind::Add, &["in"]))
            .unwrap_err();
        assert!(matches!(
            err,
            GraphError::Arity {
                expected: 2,
                got: 1,
                ..
            }
        ));
    }

    #[test]
    fn topo_sort_chain_and_diamond() {
        let g = ModelGraph::new("g", shape(), 2)
            .add_layer(LayerNode::new("a", LayerKind::Input, &[]))
            .unwrap()
            .add_layer(LayerNode::new("b", conv(4), &["a"]))
            .unwrap()
            .add_layer(LayerNode::new("c", LayerKind::BatchNorm, &["b"]))
            .unwrap();
        assert_eq!(g.topo_sort().unwrap(), vec!["a", "b", "c"]);

        let d = ModelGraph::new("d", shape(), 2)
            .add_layer(LayerNode::new("a", LayerKind::Input, &[]))
            .unwrap()
            .add_layer(LayerNode::new("b", conv(3), &["a"]))
            .unwrap()
            .add_layer(LayerNode::new("c", LayerKind::BatchNorm, &["a"]))
            .unwrap()
            .add_layer(LayerNode::new("d", LayerKind::Add, &["b", "c"]))
            .unwrap();
        let order = d.topo_sort().unwrap();
        assert_eq!(order[0], "a");
        assert_eq!(order[3], "d");
    }

    #[test]
    fn topo_sort_detects_cycles() {
        let nodes = vec![
            LayerNode::new("a", LayerKind::Input, &[]),
            LayerNode::new("b", LayerKind::Add, &["a", "c"]),
            LayerNode::new("c", LayerKind::BatchNorm, &["b"]),
        ];
        let g = ModelGraph::from_nodes("cyc", shape(), 2, nodes).unwrap();
        match g.topo_sort() {
            Err(GraphError::CycleDetected(ids)) => assert_eq!(ids, vec!["b", "c"]),
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn validate_counts_inputs_and_terminals() {
        let g = ModelGraph::new("g", shape(), 2)
            .add_layer(LayerNode::new("a", LayerKind::Input, &[]))
            .unwrap()
            .add_layer(LayerNode::new("b", LayerKind::BatchNorm, &["a"]))
            .unwrap()
            .add_layer(LayerNode::new("c", LayerKind::BatchNorm, &["a"]))
            .unwrap();
        assert!(matches!(g.validate(), Err(GraphError::TerminalCount(_))));

        let two_inputs = ModelGraph::new("g", shape(), 2)
            .add_layer(LayerNode::new("a", LayerKind::Input, &[]))
            .unwrap()
            .add_layer(LayerNode::new("b", LayerKind::Input, &[]))
            .unwrap()
            .add_layer(LayerNode::new("c", LayerKind::Add, &["a", "b"]))
            .unwrap();
        assert!(matches!(
            two_inputs.validate(),
            Err(GraphError::InputCount(2))
        ));
    }
}
