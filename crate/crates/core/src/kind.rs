//! Node kinds and their structural contracts (arity, weights, parameters).

use crate::error::{Error, Result};
use crate::prune::PruneNodeClass;
use crate::shape::TensorShape;
use serde::{Deserialize, Serialize};

/// Input source a graph input belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Vision,
    Radar,
}

impl Modality {
    pub fn name(self) -> &'static str {
        match self {
            Modality::Vision => "vision",
            Modality::Radar => "radar",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "vision" => Ok(Modality::Vision),
            "radar" => Ok(Modality::Radar),
            _ => Err(Error::InvalidArgument(format!("unknown modality '{s}'"))),
        }
    }
}

impl std::fmt::Display for Modality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conv2dSpec {
    pub kernel: (usize, usize),
    pub stride: (usize, usize),
    pub padding: (usize, usize),
    pub groups: usize,
    pub bias: bool,
}

impl Default for Conv2dSpec {
    fn default() -> Self {
        Conv2dSpec {
            kernel: (3, 3),
            stride: (1, 1),
            padding: (0, 0),
            groups: 1,
            bias: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Input { modality: Modality, shape: TensorShape },
    Output,
    Conv2d(Conv2dSpec),
    Linear { bias: bool },
    BatchNorm,
    ReLU,
    Sigmoid,
    AvgPool { kernel: (usize, usize), stride: (usize, usize), padding: (usize, usize) },
    /// Global average pool to a 1x1 map.
    AdaptiveAvgPool,
    /// Nearest-neighbour upsampling by an integer factor.
    Upsample { scale: usize },
    Add,
    /// Concatenation along the channel axis.
    Concat,
    /// Channel-axis split into fixed sizes; each size is one output port.
    Split { sizes: Vec<usize> },
    ChannelShuffle { groups: usize },
    /// Efficient channel attention: global pool, 1-D conv of odd width
    /// `kernel` across the channel axis, sigmoid gate.
    Eca { kernel: usize },
    /// Modulated deformable convolution. The node owns its offset
    /// predictor: a standard conv producing 3K channels (2K offsets as
    /// (dy,dx) per tap, then K modulation logits), K = k1*k2.
    DeformConv2d { kernel: (usize, usize), stride: (usize, usize), padding: (usize, usize), bias: bool },
    Flatten,
    Permute { order: [usize; 3] },
    Custom { name: String, class: Option<PruneNodeClass> },
}

impl NodeKind {
    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Input { .. } => "input",
            NodeKind::Output => "output",
            NodeKind::Conv2d(_) => "conv2d",
            NodeKind::Linear { .. } => "linear",
            NodeKind::BatchNorm => "batchnorm",
            NodeKind::ReLU => "relu",
            NodeKind::Sigmoid => "sigmoid",
            NodeKind::AvgPool { .. } => "avgpool",
            NodeKind::AdaptiveAvgPool => "adaptive_avgpool",
            NodeKind::Upsample { .. } => "upsample",
            NodeKind::Add => "add",
            NodeKind::Concat => "concat",
            NodeKind::Split { .. } => "split",
            NodeKind::ChannelShuffle { .. } => "channel_shuffle",
            NodeKind::Eca { .. } => "eca",
            NodeKind::DeformConv2d { .. } => "deform_conv2d",
            NodeKind::Flatten => "flatten",
            NodeKind::Permute { .. } => "permute",
            NodeKind::Custom { .. } => "custom",
        }
    }

    /// (min, max) input arity.
    pub fn arity(&self) -> (usize, usize) {
        match self {
            NodeKind::Input { .. } => (0, 0),
            NodeKind::Add | NodeKind::Concat => (2, usize::MAX),
            _ => (1, 1),
        }
    }

    /// Number of output ports (only `Split` has more than one).
    pub fn out_ports(&self) -> usize {
        match self {
            NodeKind::Split { sizes } => sizes.len(),
            _ => 1,
        }
    }

    /// Kinds that carry entries in the weight store.
    pub fn is_parametric(&self) -> bool {
        matches!(
            self,
            NodeKind::Conv2d(_)
                | NodeKind::Linear { .. }
                | NodeKind::BatchNorm
                | NodeKind::Eca { .. }
                | NodeKind::DeformConv2d { .. }
        )
    }

    /// Expected number of weight keys for this kind.
    pub fn weight_key_count(&self) -> usize {
        match self {
            NodeKind::Conv2d(spec) => 1 + spec.bias as usize,
            NodeKind::Linear { bias } => 1 + *bias as usize,
            NodeKind::BatchNorm => 4,
            NodeKind::Eca { .. } => 1,
            NodeKind::DeformConv2d { bias, .. } => 2 + 2 * (*bias as usize),
            _ => 0,
        }
    }
}

/// Number of sampling taps of a deformable conv kernel.
pub fn deform_taps(kernel: (usize, usize)) -> usize {
    kernel.0 * kernel.1
}
