//! Structural channel pruning for multi-modal computation graphs.
//!
//! The crate models a network as a DAG of typed nodes with a flat weight
//! store, infers shapes, classifies prunable dimensions into coupled
//! groups, allocates per-group sparsity (uniform / ERK / modality-aware
//! SynFlow), prunes channels with cross-group index remapping, and checks
//! the result against a reference forward interpreter. A small power-trace
//! module computes energy-per-sample and average power from CSV traces.
//!
//! Numeric code is generic over the scalar type ([`Scalar`], implemented
//! for `f32` and `f64`); concrete aliases live at the crate root. Weights
//! on disk are always little-endian `f32`.

pub mod blob;
pub mod build;
pub mod cost;
pub mod error;
pub mod graph;
pub mod infer;
pub mod interp;
pub mod kind;
pub mod manifest;
pub mod modality;
pub mod num;
pub mod power;
pub mod prune;
pub mod rng;
pub mod saliency;
pub mod shape;
pub mod sparsity;
pub mod zoo;

pub use error::{Error, Result};
pub use graph::{Graph, InputRef, Node, Weight, WeightStore};
pub use interp::Tensor;
pub use kind::{Conv2dSpec, Modality, NodeKind};
pub use num::Scalar;
pub use shape::TensorShape;

/// Graph holding `f32` weights — the canonical on-disk representation.
pub type Graph32 = Graph<f32>;
/// Graph widened to `f64`, used for saliency scoring.
pub type Graph64 = Graph<f64>;
/// Activation tensor in `f32` (interpreter default).
pub type Tensor32 = Tensor<f32>;
/// Activation tensor in `f64`.
pub type Tensor64 = Tensor<f64>;
