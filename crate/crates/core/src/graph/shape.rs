use std::collections::HashMap;

use super::layer::{LayerKind, Padding, TensorShape};
use super::model::ModelGraph;
use super::GraphError;

pub type ShapeMap = HashMap<String, TensorShape>;

/// Output shape of every node, keyed by node id.
pub fn infer_shapes(graph: &ModelGraph) -> Result<ShapeMap, GraphError> {
    let order = graph.topo_sort()?;
    let mut shapes = ShapeMap::with_capacity(order.len());
    for id in &order {
        let node = graph.node(id).expect("topo order names existing nodes");
        let inputs: Vec<TensorShape> = node.inputs.iter().map(|i| shapes[i]).collect();
        let out = output_shape(id, &node.kind, &inputs, graph.input_shape)?;
        shapes.insert(id.clone(), out);
    }
    Ok(shapes)
}

/// Shape rule for a single node given its input shapes.
pub fn output_shape(
    id: &str,
    kind: &LayerKind,
    inputs: &[TensorShape],
    graph_input: TensorShape,
) -> Result<TensorShape, GraphError> {
    let spatial = |input: TensorShape, window: usize, stride: usize, padding: Padding, channels| {
        let h = padding.output_dim(input.height, window, stride);
        let w = padding.output_dim(input.width, window, stride);
        match (h, w) {
            (Some(h), Some(w)) if h > 0 && w > 0 => Ok(TensorShape {
                height: h,
                width: w,
                channels,
            }),
            _ => Err(GraphError::NonPositiveDim {
                node: id.to_string(),
                input,
                window,
            }),
        }
    };
    let out = match *kind {
        LayerKind::Input => graph_input,
        LayerKind::Conv2D {
            filters,
            kernel,
            stride,
            padding,
            ..
        } => spatial(inputs[0], kernel.size(), stride.get(), padding, filters)?,
        LayerKind::SeparableConv2D {
            filters,
            kernel,
            stride,
            padding,
            depthwise_only,
        } => {
            if depthwise_only && filters != inputs[0].channels {
                return Err(GraphError::InvalidAttr {
                    node: id.to_string(),
                    reason: format!(
                        "depthwise-only layer has {filters} filters but {} input channels",
                        inputs[0].channels
                    ),
                });
            }
            spatial(inputs[0], kernel.size(), stride.get(), padding, filters)?
        }
        LayerKind::MaxPool {
            pool_size,
            stride,
            padding,
        } => {
            if pool_size == 0 || stride == 0 {
                return Err(GraphError::InvalidAttr {
                    node: id.to_string(),
                    reason: "pool size and stride must be >= 1".into(),
                });
            }
            spatial(inputs[0], pool_size, stride, padding, inputs[0].channels)?
        }
        LayerKind::GlobalAvgPool => TensorShape {
            height: 1,
            width: 1,
            channels: inputs[0].channels,
        },
        LayerKind::Dense { units, .. } => TensorShape {
            height: 1,
            width: 1,
            channels: units,
        },
        LayerKind::BatchNorm | LayerKind::Activation(_) => inputs[0],
        LayerKind::Add => {
            if inputs[0] != inputs[1] {
                return Err(GraphError::ShapeMismatch {
                    node: id.to_string(),
                    left: inputs[0],
                    right: inputs[1],
                });
            }
            inputs[0]
        }
    };
    if out.channels == 0 {
        return Err(GraphError::InvalidAttr {
            node: id.to_string(),
            reason: "zero output channels".into(),
        });
    }
    Ok(out)
}
