//! Horizontal compact-network-design passes: kernel shrinking, fire-module
//! insertion, a downsampling audit, constraint validation and diffing.

mod audit;
mod diff;
mod modules;
mod strategy1;
mod strategy2;
mod validate;

use serde::Serialize;
use thiserror::Error;

use crate::graph::GraphError;
use crate::zoo::{FireModuleSpec, ZooError};

pub use audit::{strategy3_audit, AuditEntry, DownsampleAudit};
pub use diff::{diff, diff_report, DiffReport, DiffRow};
pub use modules::{module_views, ModuleView};
pub use strategy1::strategy1_replace_kernels;
pub use strategy2::strategy2_insert_fire;
pub use validate::validate_fire_constraints;

/// Placeholder used in [`NodeChange`] for a node that did not exist on one
/// side of the rewrite.
pub const ABSENT: &str = "-";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeChange {
    pub id: String,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PassReport {
    pub pass_name: String,
    pub nodes_changed: Vec<NodeChange>,
    pub params_before: u64,
    pub params_after: u64,
    pub violations: Vec<String>,
}

impl PassReport {
    pub fn render_table(&self) -> String {
        let mut out = format!("pass: {}\n", self.pass_name);
        let w = self
            .nodes_changed
            .iter()
            .map(|c| c.id.len())
            .max()
            .unwrap_or(0)
            .max(4);
        let wb = self
            .nodes_changed
            .iter()
            .map(|c| c.before.len())
            .max()
            .unwrap_or(0)
            .max(6);
        out.push_str(&format!("{:<w$}  {:<wb$}  {}\n", "node", "before", "after"));
        for c in &self.nodes_changed {
            out.push_str(&format!("{:<w$}  {:<wb$}  {}\n", c.id, c.before, c.after));
        }
        out.push_str(&format!(
            "nodes changed: {}\nparams: {} -> {}\n",
            self.nodes_changed.len(),
            self.params_before,
            self.params_after
        ));
        for v in &self.violations {
            out.push_str(&format!("violation: {v}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("invalid fire module spec {spec} for module '{module}': {reason}")]
    InvalidFireSpec {
        module: String,
        spec: FireModuleSpec,
        reason: String,
    },
    #[error("no module tagged '{0}' in graph")]
    UnknownModuleTag(String),
    #[error("residual connection at '{0}' could not be reconciled")]
    ResidualShapeBroken(String),
    #[error("module '{module}' cannot be rewritten: {reason}")]
    UnsupportedModule { module: String, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<ZooError> for TransformError {
    fn from(e: ZooError) -> Self {
        match e {
            ZooError::InvalidFireSpec {
                module,
                spec,
                reason,
            } => TransformError::InvalidFireSpec {
                module,
                spec,
                reason,
            },
            ZooError::Graph(g) => TransformError::Graph(g),
            other => TransformError::UnsupportedModule {
                module: String::new(),
                reason: other.to_string(),
            },
        }
    }
}
