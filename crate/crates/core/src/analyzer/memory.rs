use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::params::count_params;
use crate::graph::{infer_shapes, GraphError, ModelGraph};

/// Single-precision storage for every tensor.
pub const BYTES_PER_SCALAR: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Training,
    Inference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    SgdMomentum,
    #[default]
    Adam,
}

impl Optimizer {
    /// Optimizer state, in multiples of the trainable parameter count.
    pub fn state_multiplier(self) -> u64 {
        match self {
            Optimizer::SgdMomentum => 1,
            Optimizer::Adam => 2,
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "training" => Ok(Mode::Training),
            "inference" => Ok(Mode::Inference),
            _ => Err(format!("unknown mode '{s}'")),
        }
    }
}

impl FromStr for Optimizer {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sgd" | "sgd_momentum" => Ok(Optimizer::SgdMomentum),
            "adam" => Ok(Optimizer::Adam),
            _ => Err(format!("unknown optimizer '{s}'")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Training => "training",
            Mode::Inference => "inference",
        })
    }
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Optimizer::SgdMomentum => "sgd_momentum",
            Optimizer::Adam => "adam",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MemoryAssumptions {
    pub bytes_per_scalar: u64,
    pub mode: Mode,
    pub optimizer: Optimizer,
    pub optimizer_state_multiplier: u64,
    pub batch_size: usize,
    pub overhead_bytes: u64,
}

/// Modeled memory footprint.
///
/// Training holds weights, one gradient per trainable parameter, optimizer
/// state, and twice the sum of all layer outputs (forward values plus their
/// gradients). Inference holds weights and the largest single-layer working
/// set (inputs plus output).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MemoryEstimate {
    pub weights_bytes: u64,
    pub gradients_bytes: u64,
    pub optimizer_state_bytes: u64,
    pub activations_bytes: u64,
    pub overhead_bytes: u64,
    pub total_bytes: u64,
    pub assumptions: MemoryAssumptions,
}

pub fn memory_estimate(
    graph: &ModelGraph,
    batch: usize,
    mode: Mode,
    optimizer: Optimizer,
    overhead_bytes: u64,
) -> Result<MemoryEstimate, GraphError> {
    if batch == 0 {
        return Err(GraphError::InvalidGraph("batch size must be >= 1".into()));
    }
    let params = count_params(graph)?;
    let shapes = infer_shapes(graph)?;
    let b = batch as u64;

    let weights_bytes = params.total * BYTES_PER_SCALAR;
    let (gradients_bytes, optimizer_state_bytes, activation_elems) = match mode {
        Mode::Training => {
            let forward: u64 = graph.nodes().iter().map(|n| shapes[&n.id].elements()).sum();
            (
                params.total_trainable * BYTES_PER_SCALAR,
                params.total_trainable * BYTES_PER_SCALAR * optimizer.state_multiplier(),
                2 * forward * b,
            )
        }
        Mode::Inference => {
            let peak = graph
                .nodes()
                .iter()
                .map(|n| {
                    let inputs: u64 = n.inputs.iter().map(|i| shapes[i].elements()).sum();
                    inputs + shapes[&n.id].elements()
                })
                .max()
                .unwrap_or(0);
            (0, 0, peak * b)
        }
    };
    let activations_bytes = activation_elems * BYTES_PER_SCALAR;
    Ok(MemoryEstimate {
        weights_bytes,
        gradients_bytes,
        optimizer_state_bytes,
        activations_bytes,
        overhead_bytes,
        total_bytes: weights_bytes
            + gradients_bytes
            + optimizer_state_bytes
            + activations_bytes
            + overhead_bytes,
        assumptions: MemoryAssumptions {
            bytes_per_scalar: BYTES_PER_SCALAR,
            mode,
            optimizer,
            optimizer_state_multiplier: optimizer.state_multiplier(),
            batch_size: batch,
            overhead_bytes,
        },
    })
}
