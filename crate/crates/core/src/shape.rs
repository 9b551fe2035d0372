//! Tensor shapes, channels-first with the batch dimension implicit.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Ordered extents of a tensor. Activations are rank 1 (vectors) or
/// rank 3 (channels x height x width); weight arrays may carry any rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorShape(Vec<usize>);

impl TensorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("empty shape".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument(format!(
                "shape {dims:?} has a zero extent"
            )));
        }
        Ok(TensorShape(dims))
    }

    pub fn vector(len: usize) -> Self {
        TensorShape(vec![len])
    }

    pub fn chw(c: usize, h: usize, w: usize) -> Self {
        TensorShape(vec![c, h, w])
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn numel(&self) -> usize {
        self.0.iter().product()
    }

    /// Channel extent: first dim for rank 3, the length for rank 1.
    pub fn channels(&self) -> usize {
        self.0[0]
    }

    pub fn is_activation_rank(&self) -> bool {
        matches!(self.rank(), 1 | 3)
    }

    /// Spatial element count (1 for vectors).
    pub fn spatial(&self) -> usize {
        self.0[1..].iter().product()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let dims = text
            .split('x')
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad shape '{text}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        TensorShape::new(dims)
    }
}

impl std::fmt::Display for TensorShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_extent() {
        assert!(TensorShape::new(vec![3, 0, 2]).is_err());
        assert!(TensorShape::new(vec![]).is_err());
    }

    #[test]
    fn parse_round_trip() {
        let s = TensorShape::parse("8x16x16").unwrap();
        assert_eq!(s.dims(), &[8, 16, 16]);
        assert_eq!(s.to_string(), "8x16x16");
        assert_eq!(s.channels(), 8);
        assert_eq!(s.spatial(), 256);
        assert!(s.is_activation_rank());
        assert!(!TensorShape::parse("2x3x4x5").unwrap().is_activation_rank());
    }
}
