//! Immutable undirected graphs, symmetric normalized adjacency and L-hop
//! computation graphs.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{axpy, Mat};

/// Ground-truth motif membership, aligned with [`Graph::edges`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotifMask {
    pub nodes: Vec<bool>,
    pub edges: Vec<bool>,
}

#[derive(Debug)]
pub struct Graph {
    num_nodes: usize,
    /// Canonical `(u, v)` with `u < v`, sorted, no duplicates.
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    edge_index: HashMap<u64, usize>,
    feature_dim: usize,
    features: Vec<f64>,
    node_labels: Option<Vec<usize>>,
    graph_label: Option<usize>,
    motif: Option<MotifMask>,
    norm_adj: OnceLock<NormalizedAdjacency>,
}

#[inline]
fn edge_key(u: usize, v: usize) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    ((a as u64) << 32) | b as u64
}

impl Graph {
    /// Builds a graph from an undirected edge list and per-node features.
    ///
    /// Symmetric duplicates are merged and self-loops dropped; self-loops are
    /// only ever introduced inside [`Graph::normalized_adjacency`].
    pub fn new(
        num_nodes: usize,
        edges: &[(usize, usize)],
        features: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if features.len() != num_nodes {
            return Err(Error::InvalidGraph(format!(
                "expected {num_nodes} feature rows, got {}",
                features.len()
            )));
        }
        let feature_dim = features.first().map_or(0, Vec::len);
        if let Some((i, row)) = features
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != feature_dim)
        {
            return Err(Error::InvalidGraph(format!(
                "ragged features: row {i} has dimension {} but row 0 has {feature_dim}",
                row.len()
            )));
        }
        let flat = features.into_iter().flatten().collect();
        Self::from_flat(num_nodes, edges, feature_dim, flat)
    }

    pub fn from_flat(
        num_nodes: usize,
        edges: &[(usize, usize)],
        feature_dim: usize,
        features: Vec<f64>,
    ) -> Result<Self> {
        if features.len() != num_nodes * feature_dim {
            return Err(Error::InvalidGraph(format!(
                "feature buffer has {} values, expected {}",
                features.len(),
                num_nodes * feature_dim
            )));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for node in [u, v] {
                if node >= num_nodes {
                    return Err(Error::NodeOutOfRange { node, num_nodes });
                }
            }
            if u != v {
                canon.push((u.min(v), u.max(v)));
            }
        }
        canon.sort_unstable();
        canon.dedup();

        let mut degree = vec![0usize; num_nodes];
        for &(u, v) in &canon {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(num_nodes + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0usize; offsets[num_nodes]];
        for &(u, v) in &canon {
            neighbors[fill[u]] = v;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            fill[v] += 1;
        }
        for i in 0..num_nodes {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        let edge_index = canon
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (edge_key(u, v), i))
            .collect();
        Ok(Graph {
            num_nodes,
            edges: canon,
            offsets,
            neighbors,
            edge_index,
            feature_dim,
            features,
            node_labels: None,
            graph_label: None,
            motif: None,
            norm_adj: OnceLock::new(),
        })
    }

    /// The same graph with every node's features replaced.
    pub fn with_features(&self, feature_dim: usize, features: Vec<f64>) -> Result<Self> {
        if features.len() != self.num_nodes * feature_dim {
            return Err(Error::InvalidGraph(format!(
                "feature buffer has {} values, expected {}",
                features.len(),
                self.num_nodes * feature_dim
            )));
        }
        let mut g = self.clone();
        g.feature_dim = feature_dim;
        g.features = features;
        Ok(g)
    }

    pub fn with_node_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.num_nodes {
            return Err(Error::InvalidGraph(format!(
                "expected {} node labels, got {}",
                self.num_nodes,
                labels.len()
            )));
        }
        self.node_labels = Some(labels);
        Ok(self)
    }

    pub fn with_graph_label(mut self, label: usize) -> Self {
        self.graph_label = Some(label);
        self
    }

    /// Attach a motif mask given as node flags and a list of motif edges.
    pub fn with_motif(mut self, nodes: Vec<bool>, motif_edges: &[(usize, usize)]) -> Result<Self> {
        if nodes.len() != self.num_nodes {
            return Err(Error::InvalidGraph(
                "motif node mask length mismatch".into(),
            ));
        }
        let mut edges = vec![false; self.edges.len()];
        for &(u, v) in motif_edges {
            let idx = self.edge_id(u, v).ok_or_else(|| {
                Error::InvalidGraph(format!("motif edge ({u}, {v}) is not in the graph"))
            })?;
            edges[idx] = true;
        }
        self.motif = Some(MotifMask { nodes, edges });
        Ok(self)
    }

    pub fn with_motif_mask(mut self, mask: MotifMask) -> Result<Self> {
        if mask.nodes.len() != self.num_nodes || mask.edges.len() != self.edges.len() {
            return Err(Error::InvalidGraph("motif mask length mismatch".into()));
        }
        self.motif = Some(mask);
        Ok(self)
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index.contains_key(&edge_key(u, v))
    }

    /// Index of edge `{u, v}` in [`Graph::edges`].
    #[inline]
    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&edge_key(u, v)).copied()
    }

    #[inline]
    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    #[inline]
    pub fn features(&self, v: usize) -> &[f64] {
        &self.features[v * self.feature_dim..(v + 1) * self.feature_dim]
    }

    pub fn feature_matrix(&self) -> Mat {
        Mat::from_vec(self.num_nodes, self.feature_dim, self.features.clone())
    }

    pub fn node_labels(&self) -> Option<&[usize]> {
        self.node_labels.as_deref()
    }

    pub fn graph_label(&self) -> Option<usize> {
        self.graph_label
    }

    pub fn motif(&self) -> Option<&MotifMask> {
        self.motif.as_ref()
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.num_nodes {
            Err(Error::NodeOutOfRange {
                node: v,
                num_nodes: self.num_nodes,
            })
        } else {
            Ok(())
        }
    }

    /// `D̃^{-1/2} (A + I) D̃^{-1/2}`, computed once and cached.
    pub fn normalized_adjacency(&self) -> &NormalizedAdjacency {
        self.norm_adj
            .get_or_init(|| NormalizedAdjacency::build(self))
    }

    /// Nodes within `hops` edges of `v`, in BFS discovery order.
    pub fn bfs_within(&self, v: usize, hops: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_nodes];
        let mut order = vec![v];
        let mut queue = VecDeque::from([v]);
        dist[v] = 0;
        while let Some(u) = queue.pop_front() {
            if dist[u] == hops {
                continue;
            }
            for &w in self.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Induced subgraph on `nodes`. Local ids follow ascending global id, so
    /// the result does not depend on the order of `nodes`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<LocalGraph> {
        let mut global: Vec<usize> = nodes.to_vec();
        global.sort_unstable();
        global.dedup();
        for &v in &global {
            self.check_node(v)?;
        }
        let local_of: HashMap<usize, usize> =
            global.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut edges = Vec::new();
        let mut motif_edges = Vec::new();
        for (lu, &gu) in global.iter().enumerate() {
            for &gw in self.neighbors(gu) {
                if gw <= gu {
                    continue;
                }
                if let Some(&lw) = local_of.get(&gw) {
                    edges.push((lu, lw));
                    if let Some(m) = &self.motif {
                        if m.edges[self.edge_id(gu, gw).unwrap()] {
                            motif_edges.push((lu, lw));
                        }
                    }
                }
            }
        }
        let mut features = Vec::with_capacity(global.len() * self.feature_dim);
        for &g in &global {
            features.extend_from_slice(self.features(g));
        }
        let mut graph = Graph::from_flat(global.len(), &edges, self.feature_dim, features)?;
        if let Some(labels) = &self.node_labels {
            graph = graph.with_node_labels(global.iter().map(|&g| labels[g]).collect())?;
        }
        graph.graph_label = self.graph_label;
        if let Some(m) = &self.motif {
            let nodes = global.iter().map(|&g| m.nodes[g]).collect();
            graph = graph.with_motif(nodes, &motif_edges)?;
        }
        Ok(LocalGraph { graph, global })
    }

    /// The `hops`-hop computation graph around `v`.
    pub fn l_hop_subgraph(&self, v: usize, hops: usize) -> Result<(LocalGraph, usize)> {
        self.check_node(v)?;
        if hops == 0 {
            return Err(Error::InvalidParameter(
                "hop count must be at least 1".into(),
            ));
        }
        let nodes = self.bfs_within(v, hops);
        let local = self.induced_subgraph(&nodes)?;
        let center = local
            .local_id(v)
            .expect("center is in its own neighborhood");
        Ok((local, center))
    }

    /// Whether the induced subgraph on `nodes` is connected. Empty sets count
    /// as connected.
    pub fn is_connected_subset(&self, nodes: &[usize]) -> bool {
        let Some(&start) = nodes.first() else {
            return true;
        };
        let set: HashSet<usize> = nodes.iter().copied().collect();
        let mut seen = HashSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in self.neighbors(u) {
                if set.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == set.len()
    }

    /// Copy of this graph without the given edges (node set unchanged).
    pub fn without_edges(&self, removed: &HashSet<usize>) -> Result<Graph> {
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, &e)| e)
            .collect();
        let mut g = Graph::from_flat(
            self.num_nodes,
            &edges,
            self.feature_dim,
            self.features.clone(),
        )?;
        g.node_labels = self.node_labels.clone();
        g.graph_label = self.graph_label;
        if let Some(m) = &self.motif {
            let kept: Vec<bool> = m
                .edges
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed.contains(i))
                .map(|(_, &b)| b)
                .collect();
            g.motif = Some(MotifMask {
                nodes: m.nodes.clone(),
                edges: kept,
            });
        }
        Ok(g)
    }
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Graph {
            num_nodes: self.num_nodes,
            edges: self.edges.clone(),
            offsets: self.offsets.clone(),
            neighbors: self.neighbors.clone(),
            edge_index: self.edge_index.clone(),
            feature_dim: self.feature_dim,
            features: self.features.clone(),
            node_labels: self.node_labels.clone(),
            graph_label: self.graph_label,
            motif: self.motif.clone(),
            norm_adj: OnceLock::new(),
        }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.num_nodes == other.num_nodes
            && self.edges == other.edges
            && self.feature_dim == other.feature_dim
            && self.features == other.features
            && self.node_labels == other.node_labels
            && self.graph_label == other.graph_label
            && self.motif == other.motif
    }
}

/// An induced subgraph together with the global id of every local node.
#[derive(Clone, Debug)]
pub struct LocalGraph {
    pub graph: Graph,
    /// `global[local] = global id`, ascending.
    pub global: Vec<usize>,
}

impl LocalGraph {
    pub fn local_id(&self, global: usize) -> Option<usize> {
        self.global.binary_search(&global).ok()
    }

    pub fn to_global(&self, local: usize) -> usize {
        self.global[local]
    }
}

/// Sparse rows of `D̃^{-1/2} (A + I) D̃^{-1/2}`.
///
/// Each row stores its diagonal entry first, then off-diagonal entries in
/// ascending column order.
#[derive(Clone, Debug)]
pub struct NormalizedAdjacency {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl NormalizedAdjacency {
    fn build(g: &Graph) -> Self {
        let n = g.num_nodes();
        let inv_sqrt: Vec<f64> = (0..n)
            .map(|i| 1.0 / ((g.degree(i) + 1) as f64).sqrt())
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(n + 2 * g.num_edges());
        let mut vals = Vec::with_capacity(n + 2 * g.num_edges());
        offsets.push(0);
        for i in 0..n {
            cols.push(i);
            vals.push(inv_sqrt[i] * inv_sqrt[i]);
            for &j in g.neighbors(i) {
                cols.push(j);
                vals.push(inv_sqrt[i] * inv_sqrt[j]);
            }
            offsets.push(cols.len());
        }
        NormalizedAdjacency {
            n,
            offsets,
            cols,
            vals,
        }
    }

    /// Builds the normalized adjacency of an arbitrary neighbor structure.
    /// `neighbors[i]` must already be in the desired summation order.
    pub fn from_neighbor_lists(neighbors: &[Vec<usize>]) -> Self {
        let n = neighbors.len();
        let inv_sqrt: Vec<f64> = neighbors
            .iter()
            .map(|nb| 1.0 / ((nb.len() + 1) as f64).sqrt())
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        offsets.push(0);
        for (i, nb) in neighbors.iter().enumerate() {
            cols.push(i);
            vals.push(inv_sqrt[i] * inv_sqrt[i]);
            for &j in nb {
                cols.push(j);
                vals.push(inv_sqrt[i] * inv_sqrt[j]);
            }
            offsets.push(cols.len());
        }
        NormalizedAdjacency {
            n,
            offsets,
            cols,
            vals,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.iter().position(|&c| c == j).map_or(0.0, |k| vals[k])
    }

    pub fn to_dense(&self) -> Mat {
        let mut m = Mat::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m.set(i, j, v);
            }
        }
        m
    }

    /// `Â · h`.
    pub fn propagate(&self, h: &Mat) -> Mat {
        assert_eq!(h.rows(), self.n);
        let mut out = Mat::zeros(h.rows(), h.cols());
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let o = out.row_mut(i);
            for (&j, &v) in cols.iter().zip(vals) {
                axpy(v, h.row(j), o);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(n: usize) -> Vec<Vec<f64>> {
        vec![vec![1.0]; n]
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::new(n, &edges, ones(n)).unwrap()
    }

    #[test]
    fn dedups_symmetric_pairs() {
        let g = Graph::new(2, &[(0, 1), (1, 0)], ones(2)).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert!(g.has_edge(1, 0));
    }

    #[test]
    fn rejects_out_of_range_endpoint() {
        let err = Graph::new(2, &[(0, 2)], ones(2)).unwrap_err();
        assert!(matches!(err, Error::NodeOutOfRange { node: 2, .. }));
    }

    #[test]
    fn rejects_ragged_features() {
        let err = Graph::new(2, &[(0, 1)], vec![vec![1.0], vec![1.0, 2.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidGraph(_)));
    }

    #[test]
    fn isolated_node_adjacency() {
        let g = Graph::new(1, &[], ones(1)).unwrap();
        assert_eq!(g.normalized_adjacency().to_dense().data(), &[1.0]);
    }

    #[test]
    fn single_edge_adjacency() {
        let g = Graph::new(2, &[(0, 1)], ones(2)).unwrap();
        let a = g.normalized_adjacency().to_dense();
        for v in a.data() {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn path_adjacency_entry() {
        // degrees with self-loops are (2, 3, 2): Â[0,1] = 1/sqrt(2*3)
        let g = path(3);
        let a = g.normalized_adjacency();
        assert!((a.get(0, 1) - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        assert!((a.get(1, 0) - a.get(0, 1)).abs() == 0.0);
        assert_eq!(a.get(0, 2), 0.0);
    }

    #[test]
    fn l_hop_on_path_and_star() {
        let g = path(5);
        let (local, center) = g.l_hop_subgraph(0, 2).unwrap();
        assert_eq!(local.global, vec![0, 1, 2]);
        assert_eq!(center, 0);
        assert_eq!(local.graph.num_edges(), 2);

        let star = Graph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], ones(5)).unwrap();
        let (local, _) = star.l_hop_subgraph(0, 1).unwrap();
        assert_eq!(local.global.len(), 5);
        assert!(g.l_hop_subgraph(9, 2).is_err());
    }

    #[test]
    fn connectivity_check() {
        let g = path(4);
        assert!(g.is_connected_subset(&[0, 1, 2]));
        assert!(!g.is_connected_subset(&[0, 2]));
    }
}
