//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("node '{node}' references missing weight '{key}'")]
    MissingWeight { node: String, key: String },

    #[error("shape mismatch at '{node}': {msg}")]
    ShapeMismatch { node: String, msg: String },

    #[error("cycle detected through node '{node}'")]
    CycleDetected { node: String },

    #[error("invalid node '{node}': {msg}")]
    InvalidNode { node: String, msg: String },

    #[error("unknown prune class for custom node '{node}'")]
    UnknownKind { node: String },

    #[error("inconsistent width in group '{group}': {msg}")]
    InconsistentWidth { group: String, msg: String },

    #[error("reshape node '{node}' mixes prunable channels into spatial axes")]
    ReshapeMixesChannels { node: String },

    #[error("grouping unsupported at '{node}': {msg}")]
    GroupingUnsupported { node: String, msg: String },

    #[error("no fusion stage found: graph is single-modality")]
    NoFusionFound,

    #[error("modality {modality} has no scored parameters in its prefusion set")]
    EmptyModality { modality: String },

    #[error("node '{node}' has no defined linearization for saliency")]
    UnsupportedForSaliency { node: String },

    #[error("non-finite saliency at {context}")]
    NonFiniteScore { context: String },

    #[error("degenerate modality score for {modality}: {value}")]
    DegenerateScore { modality: String, value: f64 },

    #[error("index remap conflict at '{node}': {msg}")]
    RemapConflict { node: String, msg: String },

    #[error("group '{group}' pruned below one channel")]
    WidthUnderflow { group: String },

    #[error("equivalence failure: max abs diff {max_abs_diff:.3e}{}", .node.as_ref().map(|n| format!(" first at '{n}'")).unwrap_or_default())]
    EquivalenceFailure {
        max_abs_diff: f64,
        node: Option<String>,
    },

    #[error("non-finite value produced by node '{node}'")]
    NonFiniteValue { node: String },

    #[error("unsupported kind for {op}: node '{node}'")]
    UnsupportedKind { node: String, op: String },

    #[error("invalid selection: {0}")]
    InvalidSelection(String),

    #[error("power trace has fewer than two samples")]
    EmptyTrace,

    #[error("power trace timestamps not strictly increasing at row {index}")]
    NonMonotonicTime { index: usize },

    #[error("power trace has zero duration")]
    ZeroDuration,

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn shape(node: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            node: node.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn invalid_node(node: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::InvalidNode {
            node: node.into(),
            msg: msg.into(),
        }
    }
}
