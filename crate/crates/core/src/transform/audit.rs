use serde::Serialize;

use crate::graph::{infer_shapes, GraphError, LayerKind, ModelGraph, TensorShape};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub id: String,
    /// Topological position scaled to [0, 1].
    pub depth: f64,
    pub input_shape: TensorShape,
    pub output_shape: TensorShape,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DownsampleAudit {
    pub entries: Vec<AuditEntry>,
    /// Downsampling nodes in the first half of the depth.
    pub early_pool_count: usize,
    /// Whether at least half of the spatial reduction (in log2 area) happens
    /// in the second half of the depth.
    pub late_downsample_flag: bool,
}

/// Lists every stride-2 convolution and pooling node with its depth and
/// shapes, and measures where the spatial reduction happens.
///
/// Nodes at or after a GlobalAvgPool/Dense are ignored for the reduction
/// measure since the head collapses the map regardless of the backbone.
pub fn strategy3_audit(graph: &ModelGraph) -> Result<DownsampleAudit, GraphError> {
    let shapes = infer_shapes(graph)?;
    let order = graph.topo_sort()?;
    let last = order.len().saturating_sub(1).max(1) as f64;

    let mut collapsed = std::collections::HashSet::new();
    let mut entries = Vec::new();
    let input_area = graph.input_shape.area() as f64;
    let mut final_area = input_area;
    let mut first_half_area = input_area;
    for (pos, id) in order.iter().enumerate() {
        let node = graph.node(id).expect("topo ids exist");
        let depth = pos as f64 / last;
        let head = matches!(node.kind, LayerKind::GlobalAvgPool | LayerKind::Dense { .. })
            || node.inputs.iter().any(|i| collapsed.contains(i.as_str()));
        if head {
            collapsed.insert(id.as_str());
            continue;
        }
        let area = shapes[id].area() as f64;
        final_area = final_area.min(area);
        if depth < 0.5 {
            first_half_area = first_half_area.min(area);
        }
        if node.kind.is_downsampling() {
            entries.push(AuditEntry {
                id: id.clone(),
                depth,
                input_shape: shapes[&node.inputs[0]],
                output_shape: shapes[id],
            });
        }
    }
    let total = (input_area / final_area).log2();
    let late = (first_half_area / final_area).log2();
    Ok(DownsampleAudit {
        early_pool_count: entries.iter().filter(|e| e.depth < 0.5).count(),
        late_downsample_flag: total > 0.0 && late >= 0.5 * total,
        entries,
    })
}
