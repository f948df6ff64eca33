//! Game graphs: vertices, directed edges, weighted leaves.

use std::collections::{HashMap, VecDeque};

use num_rational::BigRational;
use thiserror::Error;

use crate::ratio::format_rational;

pub type VertexId = usize;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate edge `{0}` -> `{1}`")]
    DuplicateEdge(String, String),
    #[error("leaf `{0}` has an outgoing edge")]
    LeafWithOutgoingEdge(String),
    #[error("non-leaf vertex `{0}` has no outgoing edge")]
    NoOutgoingEdge(String),
    #[error("duplicate leaf weight {weight} on `{first}` and `{second}`")]
    DuplicateLeafWeight {
        first: String,
        second: String,
        weight: String,
    },
    #[error("vertex `{0}` reaches fewer than two different leaves")]
    TooFewReachableLeaves(String),
}

/// A reachability all-pay bidding game `<V, E, L, w>`.
///
/// Vertices are identified by dense indices in declaration order; the
/// original string ids are kept for I/O. Graphs are immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameGraph {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    succ: Vec<Vec<VertexId>>,
    pred: Vec<Vec<VertexId>>,
    weight: Vec<Option<BigRational>>,
    root: Option<VertexId>,
    /// Vertices ordered so that every vertex appears after all its successors.
    /// `None` when the graph has a cycle.
    reverse_topo: Option<Vec<VertexId>>,
    /// Longest path (in edges) from each vertex to a leaf; DAGs only.
    depth: Option<Vec<usize>>,
}

impl GameGraph {
    pub fn builder() -> GameGraphBuilder {
        GameGraphBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.names.len()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn id(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: VertexId) -> &[VertexId] {
        &self.pred[v]
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.weight[v].is_some()
    }

    pub fn weight(&self, v: VertexId) -> Option<&BigRational> {
        self.weight[v].as_ref()
    }

    pub fn leaves(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(|&v| self.is_leaf(v))
    }

    pub fn internal(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(|&v| !self.is_leaf(v))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn root(&self) -> Option<VertexId> {
        self.root
    }

    pub fn is_dag(&self) -> bool {
        self.reverse_topo.is_some()
    }

    /// Vertices with every successor listed before its predecessors.
    pub fn reverse_topological_order(&self) -> Option<&[VertexId]> {
        self.reverse_topo.as_deref()
    }

    /// Longest path from `v` to a leaf, in edges. `None` for cyclic graphs.
    pub fn depth(&self, v: VertexId) -> Option<usize> {
        self.depth.as_ref().map(|d| d[v])
    }

    /// `d(G)`: the longest path in the graph. `None` for cyclic graphs.
    pub fn longest_path(&self) -> Option<usize> {
        self.depth
            .as_ref()
            .map(|d| d.iter().copied().max().unwrap_or(0))
    }

    pub fn min_weight(&self) -> &BigRational {
        self.weight.iter().flatten().min().expect("validated graph has leaves")
    }

    pub fn max_weight(&self) -> &BigRational {
        self.weight.iter().flatten().max().expect("validated graph has leaves")
    }

    /// Maximal leaf weight reachable from each vertex.
    pub fn max_reachable_weight(&self) -> Vec<BigRational> {
        self.reachable_weight_extreme(true)
    }

    /// Minimal leaf weight reachable from each vertex.
    pub fn min_reachable_weight(&self) -> Vec<BigRational> {
        self.reachable_weight_extreme(false)
    }

    fn reachable_weight_extreme(&self, max: bool) -> Vec<BigRational> {
        let better = |a: &BigRational, b: &BigRational| if max { a > b } else { a < b };
        let mut best: Vec<Option<BigRational>> = self.weight.clone();
        let mut queue: VecDeque<VertexId> = self.leaves().collect();
        while let Some(u) = queue.pop_front() {
            let w = best[u].clone().expect("queued vertices have a value");
            for &p in &self.pred[u] {
                let improve = match &best[p] {
                    None => true,
                    Some(cur) => better(&w, cur),
                };
                if improve {
                    best[p] = Some(w.clone());
                    queue.push_back(p);
                }
            }
        }
        best.into_iter()
            .map(|w| w.expect("every vertex reaches a leaf"))
            .collect()
    }

    /// BFS distance (in edges) from every vertex to the nearest vertex in `targets`.
    pub fn distances_to(&self, targets: &[bool]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for v in self.vertices() {
            if targets[v] {
                dist[v] = Some(0);
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap() + 1;
            for &p in &self.pred[u] {
                if dist[p].is_none() {
                    dist[p] = Some(d);
                    queue.push_back(p);
                }
            }
        }
        dist
    }
}

/// Incremental constructor; [`GameGraphBuilder::build`] validates every invariant.
#[derive(Debug, Default, Clone)]
pub struct GameGraphBuilder {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    weight: Vec<Option<BigRational>>,
    edges: Vec<(VertexId, VertexId)>,
    root: Option<VertexId>,
}

impl GameGraphBuilder {
    pub fn vertex(&mut self, name: &str) -> Result<VertexId, GraphError> {
        self.insert(name, None)
    }

    pub fn leaf(&mut self, name: &str, weight: BigRational) -> Result<VertexId, GraphError> {
        self.insert(name, Some(weight))
    }

    fn insert(&mut self, name: &str, weight: Option<BigRational>) -> Result<VertexId, GraphError> {
        if self.index.contains_key(name) {
            return Err(GraphError::DuplicateVertex(name.to_string()));
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.weight.push(weight);
        Ok(id)
    }

    pub fn id(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn edge(&mut self, src: &str, dst: &str) -> Result<(), GraphError> {
        let s = self.lookup(src)?;
        let d = self.lookup(dst)?;
        self.edge_ids(s, d);
        Ok(())
    }

    pub fn edge_ids(&mut self, src: VertexId, dst: VertexId) {
        self.edges.push((src, dst));
    }

    pub fn root(&mut self, name: &str) -> Result<(), GraphError> {
        self.root = Some(self.lookup(name)?);
        Ok(())
    }

    fn lookup(&self, name: &str) -> Result<VertexId, GraphError> {
        self.id(name)
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn build(self) -> Result<GameGraph, GraphError> {
        let n = self.names.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(s, d) in &self.edges {
            if self.weight[s].is_some() {
                return Err(GraphError::LeafWithOutgoingEdge(self.names[s].clone()));
            }
            if succ[s].contains(&d) {
                return Err(GraphError::DuplicateEdge(
                    self.names[s].clone(),
                    self.names[d].clone(),
                ));
            }
            succ[s].push(d);
            pred[d].push(s);
        }
        for (v, out) in succ.iter().enumerate() {
            if self.weight[v].is_none() && out.is_empty() {
                return Err(GraphError::NoOutgoingEdge(self.names[v].clone()));
            }
        }
        let mut seen: HashMap<&BigRational, VertexId> = HashMap::new();
        for v in 0..n {
            if let Some(w) = &self.weight[v] {
                if let Some(&first) = seen.get(w) {
                    return Err(GraphError::DuplicateLeafWeight {
                        first: self.names[first].clone(),
                        second: self.names[v].clone(),
                        weight: format_rational(w),
                    });
                }
                seen.insert(w, v);
            }
        }
        check_two_leaves(&self.names, &self.weight, &pred)?;

        let reverse_topo = reverse_topological(&succ, &pred);
        let depth = reverse_topo.as_ref().map(|order| {
            let mut depth = vec![0usize; n];
            for &v in order {
                depth[v] = succ[v].iter().map(|&u| depth[u] + 1).max().unwrap_or(0);
            }
            depth
        });
        Ok(GameGraph {
            names: self.names,
            index: self.index,
            succ,
            pred,
            weight: self.weight,
            root: self.root,
            reverse_topo,
            depth,
        })
    }
}

/// Propagates up to two distinct leaves backwards from every leaf.
fn check_two_leaves(
    names: &[String],
    weight: &[Option<BigRational>],
    pred: &[Vec<VertexId>],
) -> Result<(), GraphError> {
    let n = names.len();
    let mut reach: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let mut queue = VecDeque::new();
    for (v, w) in weight.iter().enumerate() {
        if w.is_some() {
            queue.push_back((v, v));
        }
    }
    while let Some((u, leaf)) = queue.pop_front() {
        for &p in &pred[u] {
            if reach[p].len() < 2 && !reach[p].contains(&leaf) {
                reach[p].push(leaf);
                queue.push_back((p, leaf));
            }
        }
    }
    for v in 0..n {
        if weight[v].is_none() && reach[v].len() < 2 {
            return Err(GraphError::TooFewReachableLeaves(names[v].clone()));
        }
    }
    Ok(())
}

fn reverse_topological(succ: &[Vec<VertexId>], pred: &[Vec<VertexId>]) -> Option<Vec<VertexId>> {
    let n = succ.len();
    let mut out_degree: Vec<usize> = succ.iter().map(Vec::len).collect();
    let mut queue: VecDeque<VertexId> = (0..n).filter(|&v| out_degree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &p in &pred[u] {
            out_degree[p] -= 1;
            if out_degree[p] == 0 {
                queue.push_back(p);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// A quantitative game cut at `c`: leaves with weight ≥ `c` are Player 1's targets.
#[derive(Debug, Clone)]
pub struct QualitativeView<'a> {
    base: &'a GameGraph,
    cut: BigRational,
    target1: Vec<bool>,
}

impl<'a> QualitativeView<'a> {
    /// Returns `None` when no leaf meets the cut.
    pub fn new(base: &'a GameGraph, cut: BigRational) -> Option<Self> {
        let target1: Vec<bool> = base
            .vertices()
            .map(|v| base.weight(v).is_some_and(|w| *w >= cut))
            .collect();
        target1.iter().any(|&t| t).then_some(QualitativeView {
            base,
            cut,
            target1,
        })
    }

    /// The cut at the maximal leaf weight; for `{0, 1}` games this is the game itself.
    pub fn top(base: &'a GameGraph) -> Self {
        Self::new(base, base.max_weight().clone()).expect("max weight leaf meets its own cut")
    }

    pub fn base(&self) -> &'a GameGraph {
        self.base
    }

    pub fn cut(&self) -> &BigRational {
        &self.cut
    }

    pub fn is_target1(&self, v: VertexId) -> bool {
        self.target1[v]
    }

    pub fn is_target2(&self, v: VertexId) -> bool {
        self.base.is_leaf(v) && !self.target1[v]
    }

    pub fn target1_mask(&self) -> &[bool] {
        &self.target1
    }

    pub fn target2_mask(&self) -> Vec<bool> {
        self.base.vertices().map(|v| self.is_target2(v)).collect()
    }
}
