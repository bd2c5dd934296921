use serde::Serialize;

use crate::graph::{infer_shapes, GraphError, LayerKind, LayerNode, ModelGraph};

/// Parameter accounting for one node.
///
/// `kernel_params` is the convolution/dense weight count alone (for a plain
/// convolution exactly `n_channels * m_filters * psi`); biases and
/// BatchNorm scalars go to `aux_params` so the kernel term stays pure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerParams {
    pub id: String,
    pub kind: &'static str,
    pub n_channels: u64,
    pub m_filters: u64,
    pub psi: u64,
    pub kernel_params: u64,
    /// Depthwise share of `kernel_params` for separable layers, else zero.
    pub depthwise_params: u64,
    pub aux_params: u64,
    pub trainable: u64,
}

impl LayerParams {
    pub fn total(&self) -> u64 {
        self.kernel_params + self.aux_params
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamReport {
    pub per_layer: Vec<LayerParams>,
    pub total: u64,
    pub total_trainable: u64,
}

impl ParamReport {
    pub fn layer(&self, id: &str) -> Option<&LayerParams> {
        self.per_layer.iter().find(|l| l.id == id)
    }
}

/// BatchNorm keeps gamma, beta, moving mean and moving variance per channel;
/// only the first two train.
pub const BATCHNORM_PARAMS_PER_CHANNEL: u64 = 4;
pub const BATCHNORM_TRAINABLE_PER_CHANNEL: u64 = 2;

pub fn count_params_layer(node: &LayerNode, input_channels: usize) -> LayerParams {
    let c = input_channels as u64;
    let mut entry = LayerParams {
        id: node.id.clone(),
        kind: node.kind.name(),
        n_channels: c,
        m_filters: 0,
        psi: 0,
        kernel_params: 0,
        depthwise_params: 0,
        aux_params: 0,
        trainable: 0,
    };
    match node.kind {
        LayerKind::Conv2D {
            filters,
            kernel,
            has_bias,
            ..
        } => {
            let m = filters as u64;
            entry.m_filters = m;
            entry.psi = kernel.elements();
            entry.kernel_params = c * m * kernel.elements();
            entry.aux_params = if has_bias { m } else { 0 };
            entry.trainable = entry.total();
        }
        LayerKind::SeparableConv2D {
            filters,
            kernel,
            depthwise_only,
            ..
        } => {
            let m = filters as u64;
            entry.m_filters = m;
            entry.psi = kernel.elements();
            entry.depthwise_params = c * kernel.elements();
            let pointwise = if depthwise_only { 0 } else { c * m };
            entry.kernel_params = entry.depthwise_params + pointwise;
            entry.trainable = entry.total();
        }
        LayerKind::BatchNorm => {
            entry.aux_params = BATCHNORM_PARAMS_PER_CHANNEL * c;
            entry.trainable = BATCHNORM_TRAINABLE_PER_CHANNEL * c;
        }
        LayerKind::Dense { units, has_bias } => {
            let u = units as u64;
            entry.m_filters = u;
            entry.psi = 1;
            entry.kernel_params = u * c;
            entry.aux_params = if has_bias { u } else { 0 };
            entry.trainable = entry.total();
        }
        LayerKind::Input
        | LayerKind::MaxPool { .. }
        | LayerKind::GlobalAvgPool
        | LayerKind::Activation(_)
        | LayerKind::Add => {}
    }
    entry
}

/// Sums per-layer counts in topological order.
pub fn count_params(graph: &ModelGraph) -> Result<ParamReport, GraphError> {
    let shapes = infer_shapes(graph)?;
    let mut per_layer = Vec::with_capacity(graph.len());
    for id in graph.topo_sort()? {
        let node = graph.node(&id).expect("topo order names existing nodes");
        let channels = node.inputs.first().map_or(0, |i| shapes[i].channels);
        per_layer.push(count_params_layer(node, channels));
    }
    let total = per_layer.iter().map(LayerParams::total).sum();
    let total_trainable = per_layer.iter().map(|l| l.trainable).sum();
    Ok(ParamReport {
        per_layer,
        total,
        total_trainable,
    })
}

/// Count in tenths of a million, rounded half up (21_068_429 -> 211).
pub fn tenths_of_million(count: u64) -> u64 {
    (count + 50_000) / 100_000
}

/// `21.1M`-style rendering of [`tenths_of_million`].
pub fn format_millions(count: u64) -> String {
    let t = tenths_of_million(count);
    format!("{}.{}M", t / 10, t % 10)
}
