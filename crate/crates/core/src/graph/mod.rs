//! Typed layer-DAG representation of a convolutional network.

mod builder;
mod fingerprint;
pub mod format;
mod layer;
mod model;
mod shape;
pub mod tag;

use thiserror::Error;

pub use builder::GraphBuilder;
pub use fingerprint::{fingerprint, is_isomorphic};
pub use format::{deserialize, serialize, FormatError};
pub use layer::{ActivationFn, Kernel, LayerKind, LayerNode, Padding, Stride, TensorShape};
pub use model::ModelGraph;
pub use shape::{infer_shapes, output_shape, ShapeMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate node id '{0}'")]
    DuplicateId(String),
    #[error("node '{node}' references unknown input '{input}'")]
    UnknownInput { node: String, input: String },
    #[error("{kind} node '{node}' takes {expected} input(s), got {got}")]
    Arity {
        node: String,
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("cycle detected through nodes {0:?}")]
    CycleDetected(Vec<String>),
    #[error("graph must have exactly one Input node, found {0}")]
    InputCount(usize),
    #[error("graph must have exactly one terminal node, found {0:?}")]
    TerminalCount(Vec<String>),
    #[error("Add node '{node}' joins mismatched shapes {left} and {right}")]
    ShapeMismatch {
        node: String,
        left: TensorShape,
        right: TensorShape,
    },
    #[error("node '{node}': window {window} does not fit input {input}")]
    NonPositiveDim {
        node: String,
        input: TensorShape,
        window: usize,
    },
    #[error("node '{node}': {reason}")]
    InvalidAttr { node: String, reason: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}
