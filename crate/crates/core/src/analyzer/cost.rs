use crate::graph::{infer_shapes, GraphError, LayerKind, ModelGraph, TensorShape};

/// Multiply-accumulate count of a forward pass at `input_shape`.
pub fn flops_estimate(graph: &ModelGraph, input_shape: TensorShape) -> Result<u64, GraphError> {
    let mut graph = graph.clone();
    graph.input_shape = input_shape;
    let shapes = infer_shapes(&graph)?;
    let mut total = 0u64;
    for node in graph.nodes() {
        let out = shapes[&node.id];
        let c = node.inputs.first().map_or(0, |i| shapes[i].channels) as u64;
        total += match node.kind {
            LayerKind::Conv2D {
                filters, kernel, ..
            } => out.area() * filters as u64 * c * kernel.elements(),
            LayerKind::SeparableConv2D {
                filters,
                kernel,
                depthwise_only,
                ..
            } => {
                let pointwise = if depthwise_only { 0 } else { c * filters as u64 };
                out.area() * (c * kernel.elements() + pointwise)
            }
            LayerKind::Dense { units, .. } => units as u64 * c,
            _ => 0,
        };
    }
    Ok(total)
}

/// Output element count of every node at the given batch size, in
/// topological order.
pub fn activation_sizes(graph: &ModelGraph, batch: usize) -> Result<Vec<(String, u64)>, GraphError> {
    let shapes = infer_shapes(graph)?;
    Ok(graph
        .topo_sort()?
        .into_iter()
        .map(|id| {
            let n = shapes[&id].elements() * batch as u64;
            (id, n)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Kernel, LayerNode, Padding, Stride};

    #[test]
    fn pointwise_conv_macs() {
        let shape = TensorShape::new(8, 8, 16).unwrap();
        let g = ModelGraph::new("t", shape, 2)
            .add_layer(LayerNode::new("in", LayerKind::Input, &[]))
            .unwrap()
            .add_layer(LayerNode::new(
                "c",
                LayerKind::Conv2D {
                    filters: 16,
                    kernel: Kernel::K1,
                    stride: Stride::One,
                    padding: Padding::Same,
                    has_bias: false,
                },
                &["in"],
            ))
            .unwrap();
        assert_eq!(flops_estimate(&g, shape).unwrap(), 16_384);
    }

    #[test]
    fn pool_only_graph_is_free() {
        let shape = TensorShape::new(8, 8, 16).unwrap();
        let g = ModelGraph::new("t", shape, 2)
            .add_layer(LayerNode::new("in", LayerKind::Input, &[]))
            .unwrap()
            .add_layer(LayerNode::new(
                "p",
                LayerKind::MaxPool {
                    pool_size: 3,
                    stride: 2,
                    padding: Padding::Same,
                },
                &["in"],
            ))
            .unwrap();
        assert_eq!(flops_estimate(&g, shape).unwrap(), 0);
    }

    #[test]
    fn input_activation_size_and_batch_linearity() {
        let shape = TensorShape::new(299, 299, 3).unwrap();
        let g = ModelGraph::new("t", shape, 2)
            .add_layer(LayerNode::new("in", LayerKind::Input, &[]))
            .unwrap()
            .add_layer(LayerNode::new("bn", LayerKind::BatchNorm, &["in"]))
            .unwrap();
        let one = activation_sizes(&g, 1).unwrap();
        assert_eq!(one[0], ("in".to_string(), 268_203));
        let two = activation_sizes(&g, 2).unwrap();
        for (a, b) in one.iter().zip(&two) {
            assert_eq!(a.1 * 2, b.1);
        }
    }
}
