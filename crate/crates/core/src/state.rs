//! The GFlowNet state: a connected node set grown from a starting node, its
//! frontier, and the incremental cut-vertex tracker used to enumerate parents.

use std::collections::BTreeSet;

use crate::cutvertex::CutVertexMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Anything the policy can encode: an ordered node set, its starting node and
/// its frontier (ascending).
pub trait SubgraphView {
    fn nodes(&self) -> &[usize];
    fn v0(&self) -> usize;
    fn frontier(&self) -> &[usize];
}

#[derive(Clone, Debug)]
pub struct FrontierState {
    nodes: Vec<usize>,
    member: Vec<bool>,
    frontier: BTreeSet<usize>,
    frontier_vec: Vec<usize>,
    tracker: CutVertexMatrix,
    v0: usize,
}

impl FrontierState {
    pub fn new(g: &Graph, v0: usize) -> Result<Self> {
        g.check_node(v0)?;
        let mut member = vec![false; g.num_nodes()];
        member[v0] = true;
        let frontier: BTreeSet<usize> = g.neighbors(v0).iter().copied().collect();
        let frontier_vec = frontier.iter().copied().collect();
        Ok(FrontierState {
            nodes: vec![v0],
            member,
            frontier,
            frontier_vec,
            tracker: CutVertexMatrix::singleton(v0),
            v0,
        })
    }

    /// Rebuild a state by replaying an insertion order.
    pub fn from_order(g: &Graph, order: &[usize]) -> Result<Self> {
        let (&v0, rest) = order
            .split_first()
            .ok_or_else(|| Error::InvalidParameter("empty insertion order".into()))?;
        let mut s = Self::new(g, v0)?;
        for &v in rest {
            s.add(g, v)?;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.member.get(v).copied().unwrap_or(false)
    }

    pub fn in_frontier(&self, v: usize) -> bool {
        self.frontier.contains(&v)
    }

    pub fn tracker(&self) -> &CutVertexMatrix {
        &self.tracker
    }

    /// Add a frontier node; the frontier and the cut-vertex matrix are updated
    /// incrementally.
    pub fn add(&mut self, g: &Graph, v: usize) -> Result<()> {
        if !self.frontier.contains(&v) {
            return Err(Error::InvalidAction(format!(
                "node {v} is not in the frontier"
            )));
        }
        self.tracker.add_node(g, v)?;
        self.nodes.push(v);
        self.member[v] = true;
        self.frontier.remove(&v);
        for &w in g.neighbors(v) {
            if !self.member[w] {
                self.frontier.insert(w);
            }
        }
        self.frontier_vec = self.frontier.iter().copied().collect();
        Ok(())
    }

    pub fn cut_vertices(&self) -> Vec<usize> {
        self.tracker.cut_vertices()
    }

    /// Nodes whose removal leaves a valid (connected, still containing `v0`)
    /// parent state, in insertion order.
    pub fn removable_nodes(&self) -> Vec<usize> {
        if self.nodes.len() < 2 {
            return Vec::new();
        }
        (1..self.nodes.len())
            .filter(|&i| !self.tracker.is_cut_position(i))
            .map(|i| self.nodes[i])
            .collect()
    }

    /// Every valid parent as `(removed node, parent node set)`; the parent
    /// keeps this state's insertion order.
    pub fn valid_parents(&self) -> Vec<(usize, Vec<usize>)> {
        self.removable_nodes()
            .into_iter()
            .map(|v| (v, self.nodes.iter().copied().filter(|&u| u != v).collect()))
            .collect()
    }
}

impl SubgraphView for FrontierState {
    fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    fn v0(&self) -> usize {
        self.v0
    }

    fn frontier(&self) -> &[usize] {
        &self.frontier_vec
    }
}

/// A node set without a tracker, e.g. a parent state being evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSet {
    pub nodes: Vec<usize>,
    pub v0: usize,
    pub frontier: Vec<usize>,
}

impl NodeSet {
    pub fn new(g: &Graph, nodes: Vec<usize>, v0: usize) -> Self {
        let frontier = frontier_of(g, &nodes);
        NodeSet {
            nodes,
            v0,
            frontier,
        }
    }
}

impl SubgraphView for NodeSet {
    fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    fn v0(&self) -> usize {
        self.v0
    }

    fn frontier(&self) -> &[usize] {
        &self.frontier
    }
}

/// Graph neighbors of a node set: outside nodes adjacent to it, ascending.
pub fn frontier_of(g: &Graph, nodes: &[usize]) -> Vec<usize> {
    let inside: BTreeSet<usize> = nodes.iter().copied().collect();
    let mut out = BTreeSet::new();
    for &u in nodes {
        for &w in g.neighbors(u) {
            if !inside.contains(&w) {
                out.insert(w);
            }
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, edges, vec![vec![1.0]; n]).unwrap()
    }

    #[test]
    fn two_node_state_has_single_parent() {
        let g = graph(2, &[(0, 1)]);
        let s = FrontierState::from_order(&g, &[0, 1]).unwrap();
        assert_eq!(s.valid_parents(), vec![(1, vec![0])]);
    }

    #[test]
    fn path_parent_skips_cut_vertex() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let s = FrontierState::from_order(&g, &[0, 1, 2]).unwrap();
        assert_eq!(s.valid_parents(), vec![(2, vec![0, 1])]);
    }

    #[test]
    fn frontier_tracks_graph_neighbors() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (0, 4)]);
        let mut s = FrontierState::new(&g, 0).unwrap();
        assert_eq!(s.frontier(), &[1, 4]);
        s.add(&g, 1).unwrap();
        assert_eq!(s.frontier(), &[2, 4]);
        assert!(s.add(&g, 3).is_err());
        assert_eq!(frontier_of(&g, s.nodes()), s.frontier().to_vec());
    }
}
