use super::layer::{ActivationFn, Kernel, LayerKind, LayerNode, Padding, Stride, TensorShape};
use super::model::ModelGraph;
use super::GraphError;

/// Convenience wrapper for assembling graphs node by node.
///
/// Every helper returns the id of the node it appended so calls chain
/// naturally. Nodes are tagged with the builder's current tag.
pub struct GraphBuilder {
    graph: ModelGraph,
    tag: Option<String>,
}

impl GraphBuilder {
    pub fn new(name: impl Into<String>, input_shape: TensorShape, num_classes: usize) -> Self {
        Self {
            graph: ModelGraph::new(name, input_shape, num_classes),
            tag: None,
        }
    }

    pub fn set_tag(&mut self, tag: Option<String>) {
        self.tag = tag;
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    pub fn metadata(&mut self, key: &str, value: impl Into<String>) {
        self.graph.metadata.insert(key.to_string(), value.into());
    }

    pub fn node(&mut self, id: impl Into<String>, kind: LayerKind, inputs: &[&str]) -> Result<String, GraphError> {
        let mut node = LayerNode::new(id, kind, inputs);
        node.tag = self.tag.clone();
        let id = node.id.clone();
        self.graph.push(node)?;
        Ok(id)
    }

    /// Appends a prebuilt node, keeping its own tag.
    pub fn push(&mut self, node: LayerNode) -> Result<String, GraphError> {
        let id = node.id.clone();
        self.graph.push(node)?;
        Ok(id)
    }

    pub fn input(&mut self, id: &str) -> Result<String, GraphError> {
        self.node(id, LayerKind::Input, &[])
    }

    pub fn conv(
        &mut self,
        id: &str,
        input: &str,
        filters: usize,
        kernel: Kernel,
        stride: Stride,
        padding: Padding,
    ) -> Result<String, GraphError> {
        self.node(
            id,
            LayerKind::Conv2D {
                filters,
                kernel,
                stride,
                padding,
                has_bias: false,
            },
            &[input],
        )
    }

    pub fn sep(
        &mut self,
        id: &str,
        input: &str,
        filters: usize,
        kernel: Kernel,
        stride: Stride,
    ) -> Result<String, GraphError> {
        self.node(
            id,
            LayerKind::SeparableConv2D {
                filters,
                kernel,
                stride,
                padding: Padding::Same,
                depthwise_only: false,
            },
            &[input],
        )
    }

    pub fn depthwise(
        &mut self,
        id: &str,
        input: &str,
        channels: usize,
        stride: Stride,
    ) -> Result<String, GraphError> {
        self.node(
            id,
            LayerKind::SeparableConv2D {
                filters: channels,
                kernel: Kernel::K3,
                stride,
                padding: Padding::Same,
                depthwise_only: true,
            },
            &[input],
        )
    }

    pub fn bn(&mut self, id: &str, input: &str) -> Result<String, GraphError> {
        self.node(id, LayerKind::BatchNorm, &[input])
    }

    pub fn relu(&mut self, id: &str, input: &str) -> Result<String, GraphError> {
        self.node(id, LayerKind::Activation(ActivationFn::Relu), &[input])
    }

    pub fn max_pool(&mut self, id: &str, input: &str) -> Result<String, GraphError> {
        self.node(
            id,
            LayerKind::MaxPool {
                pool_size: 3,
                stride: 2,
                padding: Padding::Same,
            },
            &[input],
        )
    }

    pub fn add(&mut self, id: &str, a: &str, b: &str) -> Result<String, GraphError> {
        self.node(id, LayerKind::Add, &[a, b])
    }

    /// GlobalAvgPool, Dense with bias, softmax.
    pub fn classifier(&mut self, input: &str, classes: usize) -> Result<String, GraphError> {
        let gap = self.node("avg_pool", LayerKind::GlobalAvgPool, &[input])?;
        let fc = self.node(
            "predictions",
            LayerKind::Dense {
                units: classes,
                has_bias: true,
            },
            &[&gap],
        )?;
        self.node(
            "predictions_softmax",
            LayerKind::Activation(ActivationFn::Softmax),
            &[&fc],
        )
    }

    pub fn graph(&self) -> &ModelGraph {
        &self.graph
    }

    pub fn finish(self) -> Result<ModelGraph, GraphError> {
        self.graph.validate()?;
        Ok(self.graph)
    }
}
