use super::modules::module_views;
use super::{NodeChange, PassReport, TransformError};
use crate::analyzer::count_params;
use crate::graph::{Kernel, LayerKind, ModelGraph};

pub const STRATEGY1: &str = "strategy1_replace_kernels";

/// Shrinks the first separable convolution of every tagged module from 3x3
/// to 1x1. Filters, stride and padding are untouched, so only the
/// depthwise kernel shrinks (nine-fold). Idempotent.
pub fn strategy1_replace_kernels(graph: &ModelGraph) -> Result<(ModelGraph, PassReport), TransformError> {
    let params_before = count_params(graph)?.total;
    let mut out = graph.clone();
    let mut nodes_changed = Vec::new();
    for view in module_views(graph)? {
        let first_sep = view.main.iter().find(|id| {
            matches!(
                graph.node(id).map(|n| n.kind),
                Some(LayerKind::SeparableConv2D { .. })
            )
        });
        let Some(id) = first_sep else { continue };
        let node = out.node_mut(id).expect("view ids exist");
        let before = node.kind.to_string();
        if let LayerKind::SeparableConv2D { kernel, .. } = &mut node.kind {
            if *kernel != Kernel::K3 {
                continue;
            }
            *kernel = Kernel::K1;
        }
        nodes_changed.push(NodeChange {
            id: id.clone(),
            before,
            after: node.kind.to_string(),
        });
    }
    let params_after = count_params(&out)?.total;
    Ok((
        out,
        PassReport {
            pass_name: STRATEGY1.to_string(),
            nodes_changed,
            params_before,
            params_after,
            violations: Vec::new(),
        },
    ))
}
