use std::fmt;

use serde::{Deserialize, Serialize};

/// Activation-map dimensions of a single tensor, batch dimension excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorShape {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl TensorShape {
    /// Returns `None` if any dimension is zero.
    pub fn new(height: usize, width: usize, channels: usize) -> Option<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return None;
        }
        Some(Self {
            height,
            width,
            channels,
        })
    }

    pub fn elements(&self) -> u64 {
        (self.height * self.width * self.channels) as u64
    }

    pub fn area(&self) -> u64 {
        (self.height * self.width) as u64
    }
}

impl fmt::Display for TensorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.height, self.width, self.channels)
    }
}

impl std::str::FromStr for TensorShape {
    type Err = String;

    /// Parses `HxWxC`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let dims: Vec<usize> = s
            .split(['x', 'X'])
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("invalid shape '{s}': {e}"))?;
        match dims.as_slice() {
            &[h, w, c] => TensorShape::new(h, w, c)
                .ok_or_else(|| format!("invalid shape '{s}': dimensions must be >= 1")),
            _ => Err(format!("invalid shape '{s}': expected HxWxC")),
        }
    }
}

/// Square kernel extent. Only 1x1 and 3x3 are representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    K1,
    K3,
}

impl Kernel {
    pub fn size(self) -> usize {
        match self {
            Kernel::K1 => 1,
            Kernel::K3 => 3,
        }
    }

    /// Number of spatial elements (the Ψ factor of the parameter count).
    pub fn elements(self) -> u64 {
        (self.size() * self.size()) as u64
    }

    pub fn from_size(size: u64) -> Option<Self> {
        match size {
            1 => Some(Kernel::K1),
            3 => Some(Kernel::K3),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stride {
    One,
    Two,
}

impl Stride {
    pub fn get(self) -> usize {
        match self {
            Stride::One => 1,
            Stride::Two => 2,
        }
    }

    pub fn from_value(v: u64) -> Option<Self> {
        match v {
            1 => Some(Stride::One),
            2 => Some(Stride::Two),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Padding {
    Same,
    Valid,
}

impl Padding {
    pub fn as_str(self) -> &'static str {
        match self {
            Padding::Same => "same",
            Padding::Valid => "valid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "same" => Some(Padding::Same),
            "valid" => Some(Padding::Valid),
            _ => None,
        }
    }

    /// Output extent along one axis, or `None` when the window does not fit.
    pub fn output_dim(self, input: usize, window: usize, stride: usize) -> Option<usize> {
        match self {
            Padding::Same => Some(input.div_ceil(stride)),
            Padding::Valid => (input >= window).then(|| (input - window) / stride + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActivationFn {
    Relu,
    Softmax,
    Sigmoid,
}

impl ActivationFn {
    pub fn as_str(self) -> &'static str {
        match self {
            ActivationFn::Relu => "relu",
            ActivationFn::Softmax => "softmax",
            ActivationFn::Sigmoid => "sigmoid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "relu" => Some(ActivationFn::Relu),
            "softmax" => Some(ActivationFn::Softmax),
            "sigmoid" => Some(ActivationFn::Sigmoid),
            _ => None,
        }
    }
}

/// The closed set of layer kinds the IR understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayerKind {
    Input,
    Conv2D {
        filters: usize,
        kernel: Kernel,
        stride: Stride,
        padding: Padding,
        has_bias: bool,
    },
    /// Depthwise followed by pointwise convolution, fused into one node.
    ///
    /// With `depthwise_only` set, the pointwise stage is absent and `filters`
    /// must equal the input channel count (MobileNet-style depthwise layers).
    SeparableConv2D {
        filters: usize,
        kernel: Kernel,
        stride: Stride,
        padding: Padding,
        depthwise_only: bool,
    },
    MaxPool {
        pool_size: usize,
        stride: usize,
        padding: Padding,
    },
    GlobalAvgPool,
    BatchNorm,
    Activation(ActivationFn),
    Add,
    Dense {
        units: usize,
        has_bias: bool,
    },
}

impl LayerKind {
    pub fn name(&self) -> &'static str {
        match self {
            LayerKind::Input => "Input",
            LayerKind::Conv2D { .. } => "Conv2D",
            LayerKind::SeparableConv2D { .. } => "SeparableConv2D",
            LayerKind::MaxPool { .. } => "MaxPool",
            LayerKind::GlobalAvgPool => "GlobalAvgPool",
            LayerKind::BatchNorm => "BatchNorm",
            LayerKind::Activation(_) => "Activation",
            LayerKind::Add => "Add",
            LayerKind::Dense { .. } => "Dense",
        }
    }

    /// Number of inputs the kind requires.
    pub fn arity(&self) -> usize {
        match self {
            LayerKind::Input => 0,
            LayerKind::Add => 2,
            _ => 1,
        }
    }

    pub fn is_conv(&self) -> bool {
        matches!(
            self,
            LayerKind::Conv2D { .. } | LayerKind::SeparableConv2D { .. }
        )
    }

    /// True for nodes that can shrink the spatial extent.
    pub fn is_downsampling(&self) -> bool {
        match self {
            LayerKind::Conv2D { stride, .. } | LayerKind::SeparableConv2D { stride, .. } => {
                *stride == Stride::Two
            }
            LayerKind::MaxPool { .. } => true,
            _ => false,
        }
    }

    pub fn kernel(&self) -> Option<Kernel> {
        match self {
            LayerKind::Conv2D { kernel, .. } | LayerKind::SeparableConv2D { kernel, .. } => {
                Some(*kernel)
            }
            _ => None,
        }
    }

    pub fn filters(&self) -> Option<usize> {
        match self {
            LayerKind::Conv2D { filters, .. } | LayerKind::SeparableConv2D { filters, .. } => {
                Some(*filters)
            }
            LayerKind::Dense { units, .. } => Some(*units),
            _ => None,
        }
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayerKind::Conv2D {
                filters,
                kernel,
                stride,
                padding,
                ..
            } => write!(
                f,
                "Conv2D({filters}, {k}x{k}, s{}, {})",
                stride.get(),
                padding.as_str(),
                k = kernel.size()
            ),
            LayerKind::SeparableConv2D {
                filters,
                kernel,
                stride,
                padding,
                depthwise_only,
            } => write!(
                f,
                "{}({filters}, {k}x{k}, s{}, {})",
                if *depthwise_only {
                    "DepthwiseConv2D"
                } else {
                    "SeparableConv2D"
                },
                stride.get(),
                padding.as_str(),
                k = kernel.size()
            ),
            LayerKind::MaxPool {
                pool_size, stride, ..
            } => write!(f, "MaxPool({pool_size}, s{stride})"),
            LayerKind::Activation(a) => write!(f, "Activation({})", a.as_str()),
            LayerKind::Dense { units, .. } => write!(f, "Dense({units})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerNode {
    pub id: String,
    pub kind: LayerKind,
    pub inputs: Vec<String>,
    pub tag: Option<String>,
}

impl LayerNode {
    pub fn new(id: impl Into<String>, kind: LayerKind, inputs: &[&str]) -> Self {
        Self {
            id: id.into(),
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            tag: None,
        }
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_arithmetic() {
        assert_eq!(Padding::Valid.output_dim(299, 3, 2), Some(149));
        assert_eq!(Padding::Same.output_dim(147, 3, 2), Some(74));
        assert_eq!(Padding::Same.output_dim(7, 1, 1), Some(7));
        assert_eq!(Padding::Valid.output_dim(2, 3, 1), None);
    }

    #[test]
    fn shape_parsing() {
        let s: TensorShape = "299x299x3".parse().unwrap();
        assert_eq!(s, TensorShape::new(299, 299, 3).unwrap());
        assert!("299x0x3".parse::<TensorShape>().is_err());
        assert!("299x3".parse::<TensorShape>().is_err());
        assert_eq!(s.elements(), 268_203);
    }

    #[test]
    fn kind_arity() {
        assert_eq!(LayerKind::Input.arity(), 0);
        assert_eq!(LayerKind::Add.arity(), 2);
        assert_eq!(LayerKind::BatchNorm.arity(), 1);
    }
}
