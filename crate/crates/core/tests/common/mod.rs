//! Random graph generators and brute-force oracles shared by the integration
//! tests. The oracles deliberately avoid the library's own shape and
//! parameter code: shapes come from enumerating window positions, and
//! parameter counts from enumerating every weight index.

#![allow(dead_code)]

use std::collections::HashMap;

use cndkit::graph::{
    ActivationFn, Kernel, LayerKind, LayerNode, ModelGraph, Padding, Stride, TensorShape,
};
use cndkit::pareto::ModelMeasurement;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ── shape oracle ─────────────────────────────────────────────────────────

/// Number of window placements along one axis.
///
/// `valid`: start positions `p` with the whole window `[p, p + window)`
/// inside `[0, n)`. `same`: output positions whose stride-aligned anchor
/// `i * stride` still lies inside the input.
pub fn enumerate_positions(n: usize, window: usize, stride: usize, padding: Padding) -> usize {
    match padding {
        Padding::Valid => (0..n)
            .step_by(stride)
            .filter(|&p| (p..p + window).all(|x| x < n))
            .count(),
        Padding::Same => (0..).take_while(|i| i * stride < n).count(),
    }
}

/// Oracle output shape for one node, or `None` if no window fits.
pub fn oracle_shape(kind: &LayerKind, inputs: &[TensorShape], graph_input: TensorShape) -> Option<TensorShape> {
    let window = |s: TensorShape, k: usize, st: usize, p: Padding, c: usize| {
        let h = enumerate_positions(s.height, k, st, p);
        let w = enumerate_positions(s.width, k, st, p);
        TensorShape::new(h, w, c)
    };
    match *kind {
        LayerKind::Input => Some(graph_input),
        LayerKind::Conv2D {
            filters,
            kernel,
            stride,
            padding,
            ..
        }
        | LayerKind::SeparableConv2D {
            filters,
            kernel,
            stride,
            padding,
            ..
        } => window(inputs[0], kernel.size(), stride.get(), padding, filters),
        LayerKind::MaxPool {
            pool_size,
            stride,
            padding,
        } => window(inputs[0], pool_size, stride, padding, inputs[0].channels),
        LayerKind::GlobalAvgPool => TensorShape::new(1, 1, inputs[0].channels),
        LayerKind::Dense { units, .. } => TensorShape::new(1, 1, units),
        LayerKind::BatchNorm | LayerKind::Activation(_) | LayerKind::Add => Some(inputs[0]),
    }
}

/// Oracle shapes for a graph whose insertion order is already topological.
pub fn oracle_shapes(graph: &ModelGraph) -> HashMap<String, TensorShape> {
    let mut shapes = HashMap::new();
    for node in graph.nodes() {
        let ins: Vec<TensorShape> = node.inputs.iter().map(|i| shapes[i]).collect();
        let out = oracle_shape(&node.kind, &ins, graph.input_shape).expect("generator keeps shapes positive");
        shapes.insert(node.id.clone(), out);
    }
    shapes
}

// ── parameter oracle ─────────────────────────────────────────────────────

/// Counts weights by visiting every index of every weight tensor.
pub fn oracle_layer_params(kind: &LayerKind, c_in: usize) -> u64 {
    let mut n = 0u64;
    match *kind {
        LayerKind::Conv2D {
            filters,
            kernel,
            has_bias,
            ..
        } => {
            let k = kernel.size();
            for _m in 0..filters {
                for _c in 0..c_in {
                    for _y in 0..k {
                        for _x in 0..k {
                            n += 1;
                        }
                    }
                }
                if has_bias {
                    n += 1;
                }
            }
        }
        LayerKind::SeparableConv2D {
            filters,
            kernel,
            depthwise_only,
            ..
        } => {
            let k = kernel.size();
            for _c in 0..c_in {
                for _y in 0..k {
                    for _x in 0..k {
                        n += 1;
                    }
                }
                if !depthwise_only {
                    for _m in 0..filters {
                        n += 1;
                    }
                }
            }
        }
        LayerKind::BatchNorm => {
            // gamma, beta, moving mean, moving variance
            for _c in 0..c_in {
                for _stat in 0..4 {
                    n += 1;
                }
            }
        }
        LayerKind::Dense { units, has_bias } => {
            for _u in 0..units {
                for _c in 0..c_in {
                    n += 1;
                }
                if has_bias {
                    n += 1;
                }
            }
        }
        _ => {}
    }
    n
}

pub fn oracle_params(graph: &ModelGraph) -> u64 {
    let shapes = oracle_shapes(graph);
    graph
        .nodes()
        .iter()
        .map(|node| {
            let c = node.inputs.first().map_or(0, |i| shapes[i].channels);
            oracle_layer_params(&node.kind, c)
        })
        .sum()
}

// ── random graphs ────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy)]
pub struct GraphLimits {
    pub max_layers: usize,
    pub max_dim: usize,
    pub max_channels: usize,
}

impl GraphLimits {
    pub const SMALL: GraphLimits = GraphLimits {
        max_layers: 8,
        max_dim: 16,
        max_channels: 32,
    };
}

fn random_kernel(rng: &mut ChaCha8Rng) -> Kernel {
    if rng.gen_bool(0.5) {
        Kernel::K1
    } else {
        Kernel::K3
    }
}

fn random_stride(rng: &mut ChaCha8Rng) -> Stride {
    if rng.gen_bool(0.3) {
        Stride::Two
    } else {
        Stride::One
    }
}

fn random_padding(rng: &mut ChaCha8Rng, cur: TensorShape, window: usize) -> Padding {
    if rng.gen_bool(0.5) && cur.height >= window && cur.width >= window {
        Padding::Valid
    } else {
        Padding::Same
    }
}

/// A random single-input, single-output graph: a chain whose `Add` nodes
/// reach back to an earlier node of matching shape. Insertion order is
/// topological and every layer keeps positive dimensions.
pub fn random_graph(rng: &mut ChaCha8Rng, limits: GraphLimits, index: usize) -> ModelGraph {
    let input = TensorShape::new(
        rng.gen_range(1..=limits.max_dim),
        rng.gen_range(1..=limits.max_dim),
        rng.gen_range(1..=limits.max_channels),
    )
    .unwrap();
    let classes = rng.gen_range(2..=10);
    let mut graph = ModelGraph::new(format!("random_{index}"), input, classes);
    graph.push(LayerNode::new("n0", LayerKind::Input, &[])).unwrap();
    let mut shapes = vec![input];

    let layers = rng.gen_range(1..=limits.max_layers);
    for i in 1..=layers {
        let prev = format!("n{}", i - 1);
        let cur = shapes[i - 1];
        let kind = loop {
            let kind = match rng.gen_range(0..9) {
                0 | 1 => {
                    let kernel = random_kernel(rng);
                    LayerKind::Conv2D {
                        filters: rng.gen_range(1..=limits.max_channels),
                        kernel,
                        stride: random_stride(rng),
                        padding: random_padding(rng, cur, kernel.size()),
                        has_bias: rng.gen_bool(0.5),
                    }
                }
                2 | 3 => {
                    let kernel = random_kernel(rng);
                    let depthwise_only = rng.gen_bool(0.25);
                    LayerKind::SeparableConv2D {
                        filters: if depthwise_only {
                            cur.channels
                        } else {
                            rng.gen_range(1..=limits.max_channels)
                        },
                        kernel,
                        stride: random_stride(rng),
                        padding: random_padding(rng, cur, kernel.size()),
                        depthwise_only,
                    }
                }
                4 => {
                    let pool_size = rng.gen_range(1..=3);
                    LayerKind::MaxPool {
                        pool_size,
                        stride: rng.gen_range(1..=2),
                        padding: random_padding(rng, cur, pool_size),
                    }
                }
                5 => LayerKind::BatchNorm,
                6 => LayerKind::Activation(ActivationFn::Relu),
                7 => LayerKind::Add,
                _ => {
                    if cur.height == 1 && cur.width == 1 {
                        LayerKind::Dense {
                            units: rng.gen_range(1..=limits.max_channels),
                            has_bias: rng.gen_bool(0.5),
                        }
                    } else {
                        LayerKind::GlobalAvgPool
                    }
                }
            };
            if kind != LayerKind::Add || shapes[..i - 1].contains(&cur) {
                break kind;
            }
        };
        let node = if kind == LayerKind::Add {
            let partners: Vec<usize> = (0..i - 1).filter(|&j| shapes[j] == cur).collect();
            let j = *partners.choose(rng).unwrap();
            let other = format!("n{j}");
            LayerNode::new(format!("n{i}"), kind, &[prev.as_str(), other.as_str()])
        } else {
            LayerNode::new(format!("n{i}"), kind, &[prev.as_str()])
        };
        let node = if rng.gen_bool(0.3) {
            node.with_tag(format!("entry_flow.block{}", rng.gen_range(1..=4)))
        } else {
            node
        };
        let ins: Vec<TensorShape> = node
            .inputs
            .iter()
            .map(|id| shapes[id[1..].parse::<usize>().unwrap()])
            .collect();
        shapes.push(oracle_shape(&node.kind, &ins, input).unwrap());
        graph.push(node).unwrap();
    }
    graph
}

// ── random measurements ──────────────────────────────────────────────────

/// Random accuracy/memory points; roughly half the instances draw from a
/// small integer grid so that ties and duplicates are common.
pub fn random_measurements(rng: &mut ChaCha8Rng, max_n: usize) -> Vec<ModelMeasurement<f64>> {
    let n = rng.gen_range(1..=max_n);
    let grid = rng.gen_bool(0.5);
    (0..n)
        .map(|i| {
            let (acc, mem) = if grid {
                (rng.gen_range(0..10) as f64 * 10.0, rng.gen_range(0..10) as f64 * 100.0)
            } else {
                (rng.gen_range(0.0..100.0), rng.gen_range(100.0..1000.0))
            };
            ModelMeasurement {
                model: format!("m{i}"),
                experiment: "random".into(),
                train_acc: acc,
                test_acc: acc,
                avg_mem_mb: mem,
                avg_epoch_time_s: None,
                avg_inf_time_ms: None,
                params: None,
            }
        })
        .collect()
}

/// O(n²) dominance filter: indices not dominated by any other record.
pub fn brute_force_front(records: &[ModelMeasurement<f64>]) -> Vec<usize> {
    (0..records.len())
        .filter(|&i| {
            !records.iter().any(|b| {
                let a = &records[i];
                b.test_acc >= a.test_acc
                    && b.avg_mem_mb <= a.avg_mem_mb
                    && (b.test_acc > a.test_acc || b.avg_mem_mb < a.avg_mem_mb)
            })
        })
        .collect()
}
