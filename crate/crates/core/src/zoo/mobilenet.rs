use super::ZooError;
use crate::graph::tag::{self, HEAD};
use crate::graph::{GraphBuilder, Kernel, ModelGraph, Padding, Stride, TensorShape};

const FLOW: &str = "features";

/// (expansion t, output channels c, repeats n, first stride s).
const INVERTED_RESIDUALS: [(usize, usize, usize, Stride); 7] = [
    (1, 16, 1, Stride::One),
    (6, 24, 2, Stride::Two),
    (6, 32, 3, Stride::Two),
    (6, 64, 4, Stride::Two),
    (6, 96, 3, Stride::One),
    (6, 160, 3, Stride::Two),
    (6, 320, 1, Stride::One),
];

const STEM_FILTERS: usize = 32;
const LAST_FILTERS: usize = 1280;

/// MobileNetV2 at width multiplier 1.0.
///
/// Depthwise 3x3 layers are depthwise-only separable nodes, so parameter
/// counts match the reference network layer for layer.
pub fn build_mobilenet_v2(input_shape: TensorShape, num_classes: usize) -> Result<ModelGraph, ZooError> {
    if num_classes < 2 {
        return Err(ZooError::InvalidClasses(num_classes));
    }
    let mut b = GraphBuilder::new("mobilenet_v2", input_shape, num_classes);
    b.metadata("architecture", "mobilenet_v2");
    b.metadata("width_multiplier", "1.0");
    let mut x = b.input("input")?;

    b.set_tag(Some(tag::module_tag(FLOW, "block0")));
    x = b.conv("conv1", &x, STEM_FILTERS, Kernel::K3, Stride::Two, Padding::Same)?;
    x = b.bn("conv1_bn", &x)?;
    x = b.relu("conv1_relu", &x)?;
    let mut channels = STEM_FILTERS;

    let mut index = 1;
    for (expansion, out, repeats, first_stride) in INVERTED_RESIDUALS {
        for r in 0..repeats {
            let stride = if r == 0 { first_stride } else { Stride::One };
            let block = format!("block{index}");
            b.set_tag(Some(tag::module_tag(FLOW, &block)));
            let input = x.clone();
            let hidden = channels * expansion;
            if expansion != 1 {
                x = b.conv(&format!("{block}_expand"), &x, hidden, Kernel::K1, Stride::One, Padding::Same)?;
                x = b.bn(&format!("{block}_expand_bn"), &x)?;
                x = b.relu(&format!("{block}_expand_relu"), &x)?;
            }
            x = b.depthwise(&format!("{block}_depthwise"), &x, hidden, stride)?;
            x = b.bn(&format!("{block}_depthwise_bn"), &x)?;
            x = b.relu(&format!("{block}_depthwise_relu"), &x)?;
            x = b.conv(&format!("{block}_project"), &x, out, Kernel::K1, Stride::One, Padding::Same)?;
            x = b.bn(&format!("{block}_project_bn"), &x)?;
            if stride == Stride::One && channels == out {
                x = b.add(&format!("{block}_add"), &input, &x)?;
            }
            channels = out;
            index += 1;
        }
    }

    let block = format!("block{index}");
    b.set_tag(Some(tag::module_tag(FLOW, &block)));
    x = b.conv(&format!("{block}_conv"), &x, LAST_FILTERS, Kernel::K1, Stride::One, Padding::Same)?;
    x = b.bn(&format!("{block}_conv_bn"), &x)?;
    x = b.relu(&format!("{block}_conv_relu"), &x)?;

    b.set_tag(Some(HEAD.to_string()));
    b.classifier(&x, num_classes)?;
    Ok(b.finish()?)
}
