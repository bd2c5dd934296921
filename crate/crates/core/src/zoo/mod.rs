//! Builders for the reference architectures.

mod config;
mod fire;
mod mobilenet;
mod xception;

use thiserror::Error;

use crate::graph::GraphError;

pub use config::{
    OptimizedConfig, DEFAULT_ENTRY_FIRE, DEFAULT_MIDDLE_FIRE, XCEPTION_EXIT_FILTERS,
};
pub use fire::{make_fire_module, FireModuleSpec};
pub use mobilenet::build_mobilenet_v2;
pub use xception::{build_optimized_xception, build_xception, ENTRY_MODULES, MIDDLE_MODULES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZooError {
    #[error("classification head needs at least 2 classes, got {0}")]
    InvalidClasses(usize),
    #[error("invalid fire module spec {spec} in module '{module}': {reason}")]
    InvalidFireSpec {
        module: String,
        spec: FireModuleSpec,
        reason: String,
    },
    #[error("invalid optimized config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
