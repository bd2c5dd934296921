use std::fmt;

use serde::{Deserialize, Serialize};

use super::ZooError;
use crate::graph::tag::{self, Role};
use crate::graph::{ActivationFn, Kernel, LayerKind, LayerNode, Padding, Stride};

/// Filter counts of a squeeze/expand fire module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FireModuleSpec {
    pub s1x1: usize,
    pub e1x1: usize,
    pub e3x3: usize,
}

impl FireModuleSpec {
    pub const fn new(s1x1: usize, e1x1: usize, e3x3: usize) -> Self {
        Self { s1x1, e1x1, e3x3 }
    }

    /// The squeeze layer must be narrower than the two expand layers combined.
    pub fn satisfies_squeeze_constraint(&self) -> bool {
        self.s1x1 < self.e1x1 + self.e3x3
    }

    pub fn check(&self, module: &str) -> Result<(), ZooError> {
        if self.s1x1 == 0 || self.e1x1 == 0 || self.e3x3 == 0 {
            return Err(ZooError::InvalidFireSpec {
                module: module.to_string(),
                spec: *self,
                reason: "filter counts must be >= 1".into(),
            });
        }
        if !self.satisfies_squeeze_constraint() {
            return Err(ZooError::InvalidFireSpec {
                module: module.to_string(),
                spec: *self,
                reason: format!(
                    "squeeze filters {} must be < e1x1 + e3x3 = {}",
                    self.s1x1,
                    self.e1x1 + self.e3x3
                ),
            });
        }
        Ok(())
    }

    /// Channels leaving the module.
    pub fn output_channels(&self) -> usize {
        self.e3x3
    }
}

impl fmt::Display for FireModuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.s1x1, self.e1x1, self.e3x3)
    }
}

/// Emits squeeze 1x1 -> expand 1x1 -> expand 3x3 separable convolutions,
/// each followed by BatchNorm and ReLU, fed from `input_id`.
///
/// Node ids are prefixed with the module's block name and tags carry the
/// module key plus the node's role. `stride_out` applies to the 3x3 expand.
pub fn make_fire_module(
    module_key: &str,
    input_id: &str,
    spec: FireModuleSpec,
    stride_out: Stride,
) -> Result<Vec<LayerNode>, ZooError> {
    spec.check(module_key)?;
    let block = tag::block_name(module_key);
    let stages = [
        (Role::Squeeze, spec.s1x1, Kernel::K1, Stride::One),
        (Role::Expand1, spec.e1x1, Kernel::K1, Stride::One),
        (Role::Expand3, spec.e3x3, Kernel::K3, stride_out),
    ];
    let mut nodes = Vec::with_capacity(9);
    let mut prev = input_id.to_string();
    for (role, filters, kernel, stride) in stages {
        let t = tag::role_tag(module_key, role);
        let conv = format!("{block}_{role}");
        let bn = format!("{conv}_bn");
        let act = format!("{conv}_act");
        nodes.push(
            LayerNode::new(
                conv.clone(),
                LayerKind::SeparableConv2D {
                    filters,
                    kernel,
                    stride,
                    padding: Padding::Same,
                    depthwise_only: false,
                },
                &[&prev],
            )
            .with_tag(t.clone()),
        );
        nodes.push(LayerNode::new(bn.clone(), LayerKind::BatchNorm, &[&conv]).with_tag(t.clone()));
        nodes.push(
            LayerNode::new(
                act.clone(),
                LayerKind::Activation(ActivationFn::Relu),
                &[&bn],
            )
            .with_tag(t),
        );
        prev = act;
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fire_module_layout() {
        let nodes = make_fire_module(
            "middle_flow.block5",
            "x",
            FireModuleSpec::new(16, 64, 64),
            Stride::One,
        )
        .unwrap();
        let convs: Vec<_> = nodes.iter().filter(|n| n.kind.is_conv()).collect();
        assert_eq!(convs.len(), 3);
        let kernels: Vec<usize> = convs.iter().map(|n| n.kind.kernel().unwrap().size()).collect();
        let filters: Vec<usize> = convs.iter().map(|n| n.kind.filters().unwrap()).collect();
        assert_eq!(kernels, [1, 1, 3]);
        assert_eq!(filters, [16, 64, 64]);
        assert_eq!(nodes[0].inputs, ["x"]);
        assert_eq!(nodes[0].tag.as_deref(), Some("middle_flow.block5.squeeze"));
        assert_eq!(nodes[8].tag.as_deref(), Some("middle_flow.block5.expand3"));
        assert_eq!(FireModuleSpec::new(16, 64, 64).output_channels(), 64);
    }

    #[test]
    fn squeeze_constraint_boundary() {
        let err = make_fire_module("m.b", "x", FireModuleSpec::new(128, 64, 64), Stride::One)
            .unwrap_err();
        assert!(matches!(err, ZooError::InvalidFireSpec { ref module, .. } if module == "m.b"));
        assert!(FireModuleSpec::new(127, 64, 64).satisfies_squeeze_constraint());
    }
}
