use super::config::{OptimizedConfig, XCEPTION_EXIT_FILTERS};
use super::fire::{make_fire_module, FireModuleSpec};
use super::ZooError;
use crate::graph::tag::{self, Role, ENTRY_FLOW, EXIT_FLOW, HEAD};
use crate::graph::{GraphBuilder, Kernel, ModelGraph, Padding, Stride, TensorShape};

pub const ENTRY_MODULES: [&str; 3] = [
    "entry_flow.block2",
    "entry_flow.block3",
    "entry_flow.block4",
];

pub const MIDDLE_MODULES: [&str; 8] = [
    "middle_flow.block5",
    "middle_flow.block6",
    "middle_flow.block7",
    "middle_flow.block8",
    "middle_flow.block9",
    "middle_flow.block10",
    "middle_flow.block11",
    "middle_flow.block12",
];

const ENTRY_FILTERS: [usize; 3] = [128, 256, 728];
const MIDDLE_FILTERS: usize = 728;

/// Main path of a residual module.
#[derive(Clone, Copy)]
enum Body {
    /// The original stack of separable convolutions; `first` is the kernel
    /// of the first one.
    Separable { first: Kernel },
    Fire(FireModuleSpec),
}

struct Plan {
    entry: [Body; 3],
    middle: [Body; 8],
    exit_first: Kernel,
    exit_filters: [usize; 4],
}

/// The original Xception: stem, three residual Entry modules, eight Middle
/// modules, the Exit residual module and the final separable pair, with a
/// GlobalAvgPool + Dense head.
pub fn build_xception(input_shape: TensorShape, num_classes: usize) -> Result<ModelGraph, ZooError> {
    let plan = Plan {
        entry: [Body::Separable { first: Kernel::K3 }; 3],
        middle: [Body::Separable { first: Kernel::K3 }; 8],
        exit_first: Kernel::K3,
        exit_filters: XCEPTION_EXIT_FILTERS,
    };
    build(input_shape, num_classes, "xception", &plan)
}

/// Xception with fire modules in the Entry and Middle flows and every
/// Exit-flow module's first separable conv reduced to 1x1.
pub fn build_optimized_xception(
    input_shape: TensorShape,
    num_classes: usize,
    config: &OptimizedConfig,
) -> Result<ModelGraph, ZooError> {
    config.validate()?;
    let mut entry = [Body::Separable { first: Kernel::K1 }; 3];
    for (slot, spec) in entry.iter_mut().zip(&config.entry_fire) {
        *slot = Body::Fire(*spec);
    }
    let mut middle = [Body::Separable { first: Kernel::K1 }; 8];
    for (slot, spec) in middle.iter_mut().zip(&config.middle_fire) {
        *slot = Body::Fire(*spec);
    }
    let plan = Plan {
        entry,
        middle,
        exit_first: Kernel::K1,
        exit_filters: config.exit_filters,
    };
    build(input_shape, num_classes, "optimized_xception", &plan)
}

fn build(
    input_shape: TensorShape,
    num_classes: usize,
    name: &str,
    plan: &Plan,
) -> Result<ModelGraph, ZooError> {
    if num_classes < 2 {
        return Err(ZooError::InvalidClasses(num_classes));
    }
    let mut b = GraphBuilder::new(name, input_shape, num_classes);
    b.metadata("architecture", name);
    let mut x = b.input("input")?;

    b.set_tag(Some(tag::module_tag(ENTRY_FLOW, "block1")));
    x = b.conv("block1_conv1", &x, 32, Kernel::K3, Stride::Two, Padding::Valid)?;
    x = b.bn("block1_conv1_bn", &x)?;
    x = b.relu("block1_conv1_act", &x)?;
    x = b.conv("block1_conv2", &x, 64, Kernel::K3, Stride::One, Padding::Valid)?;
    x = b.bn("block1_conv2_bn", &x)?;
    x = b.relu("block1_conv2_act", &x)?;
    let mut channels = 64;

    for (i, (key, body)) in ENTRY_MODULES.iter().zip(plan.entry).enumerate() {
        let out = match body {
            Body::Separable { .. } => ENTRY_FILTERS[i],
            Body::Fire(spec) => spec.output_channels(),
        };
        x = residual_module(&mut b, key, &x, channels, body, 2, out, i > 0, true)?;
        channels = out;
    }
    for (key, body) in MIDDLE_MODULES.iter().zip(plan.middle) {
        let out = match body {
            Body::Separable { .. } => MIDDLE_FILTERS,
            Body::Fire(spec) => spec.output_channels(),
        };
        x = residual_module(&mut b, key, &x, channels, body, 3, out, true, false)?;
        channels = out;
    }

    let [f13a, f13b, f14a, f14b] = plan.exit_filters;
    let key = tag::module_tag(EXIT_FLOW, "block13");
    b.set_tag(Some(tag::role_tag(&key, Role::Shortcut)));
    let sc = b.conv("block13_shortcut_conv", &x, f13b, Kernel::K1, Stride::Two, Padding::Same)?;
    let sc = b.bn("block13_shortcut_bn", &sc)?;
    b.set_tag(Some(key));
    let mut y = b.relu("block13_sepconv1_act", &x)?;
    y = b.sep("block13_sepconv1", &y, f13a, plan.exit_first, Stride::One)?;
    y = b.bn("block13_sepconv1_bn", &y)?;
    y = b.relu("block13_sepconv2_act", &y)?;
    y = b.sep("block13_sepconv2", &y, f13b, Kernel::K3, Stride::One)?;
    y = b.bn("block13_sepconv2_bn", &y)?;
    y = b.max_pool("block13_pool", &y)?;
    x = b.add("block13_add", &y, &sc)?;

    b.set_tag(Some(tag::module_tag(EXIT_FLOW, "block14")));
    x = b.sep("block14_sepconv1", &x, f14a, plan.exit_first, Stride::One)?;
    x = b.bn("block14_sepconv1_bn", &x)?;
    x = b.relu("block14_sepconv1_act", &x)?;
    x = b.sep("block14_sepconv2", &x, f14b, Kernel::K3, Stride::One)?;
    x = b.bn("block14_sepconv2_bn", &x)?;
    x = b.relu("block14_sepconv2_act", &x)?;

    b.set_tag(Some(HEAD.to_string()));
    b.classifier(&x, num_classes)?;
    Ok(b.finish()?)
}

/// One residual module. Entry modules downsample with a strided 1x1
/// projection on the shortcut and a MaxPool on the main path; Middle
/// modules use an identity shortcut unless the body changes the width, in
/// which case a stride-1 1x1 projection restores matching shapes.
#[allow(clippy::too_many_arguments)]
fn residual_module(
    b: &mut GraphBuilder,
    key: &str,
    input: &str,
    in_channels: usize,
    body: Body,
    depth: usize,
    out_channels: usize,
    pre_activation: bool,
    downsample: bool,
) -> Result<String, ZooError> {
    let block = tag::block_name(key);
    let shortcut = if downsample || out_channels != in_channels {
        let stride = if downsample { Stride::Two } else { Stride::One };
        b.set_tag(Some(tag::role_tag(key, Role::Shortcut)));
        let sc = b.conv(
            &format!("{block}_shortcut_conv"),
            input,
            out_channels,
            Kernel::K1,
            stride,
            Padding::Same,
        )?;
        b.bn(&format!("{block}_shortcut_bn"), &sc)?
    } else {
        input.to_string()
    };

    b.set_tag(Some(key.to_string()));
    let mut x = input.to_string();
    if pre_activation {
        x = b.relu(&format!("{block}_sepconv1_act"), &x)?;
    }
    match body {
        Body::Separable { first } => {
            for i in 1..=depth {
                if i > 1 {
                    x = b.relu(&format!("{block}_sepconv{i}_act"), &x)?;
                }
                let kernel = if i == 1 { first } else { Kernel::K3 };
                x = b.sep(&format!("{block}_sepconv{i}"), &x, out_channels, kernel, Stride::One)?;
                x = b.bn(&format!("{block}_sepconv{i}_bn"), &x)?;
            }
        }
        Body::Fire(spec) => {
            for node in make_fire_module(key, &x, spec, Stride::One)? {
                x = b.push(node)?;
            }
        }
    }
    if downsample {
        x = b.max_pool(&format!("{block}_pool"), &x)?;
    }
    Ok(b.add(&format!("{block}_add"), &x, &shortcut)?)
}
