//! Graph data model: typed nodes over a flat weight store.
//!
//! Graphs are immutable after construction; pruning builds new graphs.

use crate::error::{Error, Result};
use crate::kind::{deform_taps, Modality, NodeKind};
use crate::num::Scalar;
use crate::shape::TensorShape;
use indexmap::IndexMap;
use std::collections::HashMap;

/// Reference to a producer output: node id plus output port
/// (port is nonzero only for `Split` producers).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InputRef {
    pub node: String,
    pub port: usize,
}

impl InputRef {
    pub fn new(node: impl Into<String>) -> Self {
        InputRef { node: node.into(), port: 0 }
    }

    /// Parses `id` or `id:port`.
    pub fn parse(text: &str) -> Result<Self> {
        match text.split_once(':') {
            None => Ok(InputRef::new(text)),
            Some((id, port)) => {
                let port = port
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad input ref '{text}'")))?;
                Ok(InputRef { node: id.into(), port })
            }
        }
    }
}

impl std::fmt::Display for InputRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.port == 0 {
            f.write_str(&self.node)
        } else {
            write!(f, "{}:{}", self.node, self.port)
        }
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub inputs: Vec<InputRef>,
    pub weight_keys: Vec<String>,
    /// One shape per output port; filled by shape inference.
    pub out_shapes: Vec<TensorShape>,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind, inputs: Vec<InputRef>) -> Self {
        Node { id: id.into(), kind, inputs, weight_keys: Vec::new(), out_shapes: Vec::new() }
    }

    pub fn with_weights(mut self, keys: Vec<String>) -> Self {
        self.weight_keys = keys;
        self
    }

    pub fn out_shape(&self, port: usize) -> &TensorShape {
        &self.out_shapes[port]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Weight<F> {
    pub dims: Vec<usize>,
    pub data: Vec<F>,
}

impl<F: Scalar> Weight<F> {
    pub fn new(dims: Vec<usize>, data: Vec<F>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!("bad weight dims {dims:?}")));
        }
        if n != data.len() {
            return Err(Error::InvalidArgument(format!(
                "weight dims {dims:?} expect {n} elements, got {}",
                data.len()
            )));
        }
        Ok(Weight { dims, data })
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }
}

/// Ordered map from key to weight array; insertion order is the on-disk
/// header order, so it must stay deterministic.
#[derive(Debug, Clone, Default)]
pub struct WeightStore<F> {
    entries: IndexMap<String, Weight<F>>,
}

impl<F: Scalar> WeightStore<F> {
    pub fn new() -> Self {
        WeightStore { entries: IndexMap::new() }
    }

    pub fn insert(&mut self, key: impl Into<String>, weight: Weight<F>) {
        self.entries.insert(key.into(), weight);
    }

    pub fn get(&self, key: &str) -> Option<&Weight<F>> {
        self.entries.get(key)
    }

    pub fn get_mut(&mut self, key: &str) -> Option<&mut Weight<F>> {
        self.entries.get_mut(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Weight<F>)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_elements(&self) -> u64 {
        self.entries.values().map(|w| w.numel() as u64).sum()
    }

    pub fn convert<T: Scalar>(&self) -> WeightStore<T> {
        let mut out = WeightStore::new();
        for (k, w) in self.iter() {
            let data = w.data.iter().map(|&v| T::from_f64(v.to_f64())).collect();
            out.insert(k.clone(), Weight { dims: w.dims.clone(), data });
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Graph<F> {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    pub weights: WeightStore<F>,
}

impl<F: Scalar> Graph<F> {
    /// Builds and structurally validates a graph; shapes are not yet
    /// inferred (use [`crate::infer::infer_shapes`] or [`Graph::finalize`]).
    pub fn new(nodes: Vec<Node>, weights: WeightStore<F>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                return Err(Error::invalid_node(&n.id, "duplicate node id"));
            }
        }
        let g = Graph { nodes, index, weights };
        g.validate()?;
        Ok(g)
    }

    /// Validates and infers shapes, returning the finished graph.
    pub fn finalize(mut self) -> Result<Self> {
        crate::infer::infer_shapes(&mut self)?;
        Ok(self)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub(crate) fn node_mut_at(&mut self, i: usize) -> &mut Node {
        &mut self.nodes[i]
    }

    pub fn node_at(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    /// Input nodes in declaration order.
    pub fn inputs(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Input { .. }))
    }

    /// Output nodes in declaration order.
    pub fn outputs(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Output))
    }

    pub fn input_modality(&self, id: &str) -> Option<Modality> {
        match self.node(id).map(|n| &n.kind) {
            Some(NodeKind::Input { modality, .. }) => Some(*modality),
            _ => None,
        }
    }

    /// Indices of direct consumers of each node.
    pub fn consumers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for r in &n.inputs {
                if let Some(&p) = self.index.get(&r.node) {
                    out[p].push(i);
                }
            }
        }
        out
    }

    /// Deterministic topological order (Kahn, declaration-order tie-break).
    pub fn topo_order(&self) -> Result<Vec<usize>> {
        let mut indegree: Vec<usize> = self.nodes.iter().map(|n| n.inputs.len()).collect();
        let consumers = self.consumers();
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut queue = std::collections::BinaryHeap::new();
        for i in (0..self.nodes.len()).filter(|&i| indegree[i] == 0) {
            queue.push(std::cmp::Reverse(i));
        }
        while let Some(std::cmp::Reverse(i)) = queue.pop() {
            order.push(i);
            for &c in &consumers[i] {
                // one edge per matching input ref
                let edges = self.nodes[c].inputs.iter().filter(|r| r.node == self.nodes[i].id).count();
                indegree[c] -= edges;
                if indegree[c] == 0 {
                    queue.push(std::cmp::Reverse(c));
                }
            }
        }
        if order.len() != self.nodes.len() {
            let leftover = (0..self.nodes.len())
                .find(|i| !order.contains(i))
                .map(|i| self.nodes[i].id.clone())
                .unwrap_or_default();
            return Err(Error::CycleDetected { node: leftover });
        }
        Ok(order)
    }

    /// Structural validation: ids resolve, arities match, the graph is a
    /// DAG, weight keys exist with legal ranks, outputs are reachable.
    pub fn validate(&self) -> Result<()> {
        for n in &self.nodes {
            let (lo, hi) = n.kind.arity();
            if n.inputs.len() < lo || n.inputs.len() > hi {
                return Err(Error::invalid_node(
                    &n.id,
                    format!("{} expects {}..={} inputs, got {}", n.kind.name(), lo,
                        if hi == usize::MAX { "many".into() } else { hi.to_string() },
                        n.inputs.len()),
                ));
            }
            for r in &n.inputs {
                let Some(&pi) = self.index.get(&r.node) else {
                    return Err(Error::invalid_node(&n.id, format!("unresolved input '{}'", r)));
                };
                let ports = self.nodes[pi].kind.out_ports();
                if r.port >= ports {
                    return Err(Error::invalid_node(
                        &n.id,
                        format!("input '{}' has only {} port(s)", r.node, ports),
                    ));
                }
                if matches!(self.nodes[pi].kind, NodeKind::Output) {
                    return Err(Error::invalid_node(&n.id, "cannot consume an output node"));
                }
            }
            self.validate_weights(n)?;
        }
        self.topo_order()?;
        self.check_reachability()?;
        Ok(())
    }

    fn check_reachability(&self) -> Result<()> {
        // every Output reachable from some Input
        let consumers = self.consumers();
        let mut reach = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.kind, NodeKind::Input { .. }))
            .map(|(i, _)| i)
            .collect();
        for &i in &stack {
            reach[i] = true;
        }
        while let Some(i) = stack.pop() {
            for &c in &consumers[i] {
                if !reach[c] {
                    reach[c] = true;
                    stack.push(c);
                }
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if matches!(n.kind, NodeKind::Output) && !reach[i] {
                return Err(Error::invalid_node(&n.id, "output not reachable from any input"));
            }
        }
        Ok(())
    }

    fn validate_weights(&self, n: &Node) -> Result<()> {
        let expected = n.kind.weight_key_count();
        if n.weight_keys.len() != expected {
            return Err(Error::invalid_node(
                &n.id,
                format!("{} expects {} weight key(s), got {}", n.kind.name(), expected, n.weight_keys.len()),
            ));
        }
        for k in &n.weight_keys {
            if !self.weights.contains(k) {
                return Err(Error::MissingWeight { node: n.id.clone(), key: k.clone() });
            }
        }
        let dims = |k: &str| self.weights.get(k).unwrap().dims.clone();
        match &n.kind {
            NodeKind::Conv2d(spec) => {
                let w = dims(&n.weight_keys[0]);
                if w.len() != 4 {
                    return Err(Error::shape(&n.id, format!("conv weight must be rank 4, got {w:?}")));
                }
                if w[2] != spec.kernel.0 || w[3] != spec.kernel.1 {
                    return Err(Error::shape(&n.id, format!(
                        "conv weight kernel {:?} != declared {:?}", (w[2], w[3]), spec.kernel)));
                }
                if spec.groups == 0 || w[0] % spec.groups != 0 {
                    return Err(Error::shape(&n.id, format!(
                        "groups {} must divide out channels {}", spec.groups, w[0])));
                }
                if spec.bias && dims(&n.weight_keys[1]) != vec![w[0]] {
                    return Err(Error::shape(&n.id, "bias length != out channels"));
                }
            }
            NodeKind::Linear { bias } => {
                let w = dims(&n.weight_keys[0]);
                if w.len() != 2 {
                    return Err(Error::shape(&n.id, format!("linear weight must be rank 2, got {w:?}")));
                }
                if *bias && dims(&n.weight_keys[1]) != vec![w[0]] {
                    return Err(Error::shape(&n.id, "bias length != out features"));
                }
            }
            NodeKind::BatchNorm => {
                let c = dims(&n.weight_keys[0]);
                if c.len() != 1 {
                    return Err(Error::shape(&n.id, "batchnorm gamma must be rank 1"));
                }
                for k in &n.weight_keys[1..] {
                    if dims(k) != c {
                        return Err(Error::shape(&n.id, "batchnorm parameter lengths differ"));
                    }
                }
            }
            NodeKind::Eca { kernel } => {
                let w = dims(&n.weight_keys[0]);
                if w != vec![*kernel] {
                    return Err(Error::shape(&n.id, format!("eca weight must be rank 1 of length {kernel}")));
                }
                if *kernel % 2 == 0 {
                    return Err(Error::invalid_node(&n.id, "eca kernel must be odd"));
                }
            }
            NodeKind::DeformConv2d { kernel, bias, .. } => {
                let w = dims(&n.weight_keys[0]);
                if w.len() != 4 || w[2] != kernel.0 || w[3] != kernel.1 {
                    return Err(Error::shape(&n.id, format!("deform weight {w:?} does not match kernel {kernel:?}")));
                }
                if kernel.0 % 2 == 0 || kernel.1 % 2 == 0 {
                    return Err(Error::invalid_node(&n.id, "deform kernel extents must be odd"));
                }
                let taps = deform_taps(*kernel);
                let off_key = if *bias { &n.weight_keys[2] } else { &n.weight_keys[1] };
                let ow = dims(off_key);
                if ow.len() != 4 || ow[0] != 3 * taps || ow[1] != w[1] || ow[2] != kernel.0 || ow[3] != kernel.1 {
                    return Err(Error::shape(&n.id, format!(
                        "offset conv weight {ow:?} must be [{}x{}x{}x{}]", 3 * taps, w[1], kernel.0, kernel.1)));
                }
                if *bias {
                    if dims(&n.weight_keys[1]) != vec![w[0]] {
                        return Err(Error::shape(&n.id, "bias length != out channels"));
                    }
                    if dims(&n.weight_keys[3]) != vec![3 * taps] {
                        return Err(Error::shape(&n.id, "offset bias length != 3*taps"));
                    }
                }
            }
            NodeKind::Split { sizes } => {
                if sizes.is_empty() || sizes.contains(&0) {
                    return Err(Error::invalid_node(&n.id, "split sizes must be positive"));
                }
            }
            NodeKind::ChannelShuffle { groups } => {
                if *groups == 0 {
                    return Err(Error::invalid_node(&n.id, "shuffle groups must be positive"));
                }
            }
            NodeKind::Upsample { scale } => {
                if *scale == 0 {
                    return Err(Error::invalid_node(&n.id, "upsample scale must be positive"));
                }
            }
            NodeKind::Permute { order } => {
                let mut seen = [false; 3];
                for &o in order {
                    if o > 2 || seen[o] {
                        return Err(Error::invalid_node(&n.id, "permute order must be a permutation of 0,1,2"));
                    }
                    seen[o] = true;
                }
            }
            NodeKind::Input { shape, .. } => {
                if !shape.is_activation_rank() {
                    return Err(Error::shape(&n.id, "input shape must be rank 1 or 3"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Widens (or narrows) the scalar type. f32 -> f64 is exact.
    pub fn convert<T: Scalar>(&self) -> Graph<T> {
        Graph {
            nodes: self.nodes.clone(),
            index: self.index.clone(),
            weights: self.weights.convert::<T>(),
        }
    }
}

impl Graph<f32> {
    pub fn widen(&self) -> Graph<f64> {
        self.convert::<f64>()
    }
}
