//! Incremental cut-vertex (articulation point) maintenance for a connected
//! subgraph that grows one node at a time.
//!
//! The subgraph's nodes are indexed by insertion position. Row `i` of the
//! cut-vertex matrix is all zeros when node `i` is not a cut vertex. When it
//! is, entry `(i, k)` holds a small positive *child-group tag*: two nodes share
//! a tag exactly when they lie in the same connected component of the
//! subgraph with node `i` removed. The diagonal is always zero.
//!
//! Adding a node `j` with attachment positions `N(j)`:
//!
//! * `|N(j)| = 1`, attached to `k`: `j` inherits `k`'s tag in every other
//!   cut row. If `k` was not a cut vertex it becomes one, with tag 1 for all
//!   old nodes and tag 2 for `j`; otherwise `j` opens a fresh tag in row `k`.
//! * `|N(j)| > 1`: no new cut vertex can appear. For every cut row, the
//!   distinct tags touched by `N(j)` are merged into their maximum; if all of
//!   the row's tags were touched the node stops being a cut vertex and its row
//!   is cleared.
//!
//! The new node's own row is always zero.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Attachment positions of a node about to join the subgraph.
///
/// Stored sparsely; [`ConnectivityVector::to_binary`] gives the dense 0/1 form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityVector {
    len: usize,
    positions: Vec<usize>,
}

impl ConnectivityVector {
    pub fn from_binary(bits: &[u8]) -> Self {
        ConnectivityVector {
            len: bits.len(),
            positions: bits
                .iter()
                .enumerate()
                .filter(|(_, &b)| b != 0)
                .map(|(i, _)| i)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of attachment edges, `|N(a_t)|`.
    pub fn count(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut v = vec![0u8; self.len];
        for &p in &self.positions {
            v[p] = 1;
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct CutVertexMatrix {
    order: Vec<usize>,
    position: HashMap<usize, usize>,
    cap: usize,
    /// `cap × cap`, row-major.
    tags: Vec<u32>,
    /// Number of distinct nonzero tags per row; zero iff not a cut vertex.
    groups: Vec<u32>,
    max_tag: Vec<u32>,
}

impl CutVertexMatrix {
    /// A tracker over the 2-node subgraph `{v0, v1}`; the matrix starts as
    /// the 2×2 zero matrix.
    pub fn new(g: &Graph, v0: usize, v1: usize) -> Result<Self> {
        g.check_node(v0)?;
        g.check_node(v1)?;
        if !g.has_edge(v0, v1) {
            return Err(Error::NotAdjacent(v0, v1));
        }
        let mut m = Self::singleton(v0);
        m.push_node(
            v1,
            &ConnectivityVector {
                len: 1,
                positions: vec![0],
            },
        )?;
        Ok(m)
    }

    /// A tracker holding only the starting node (1×1 zero matrix). The first
    /// update produces the 2×2 zero matrix.
    pub fn singleton(v0: usize) -> Self {
        let cap = 4;
        CutVertexMatrix {
            order: vec![v0],
            position: HashMap::from([(v0, 0)]),
            cap,
            tags: vec![0; cap * cap],
            groups: vec![0; cap],
            max_tag: vec![0; cap],
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position_of(&self, node: usize) -> Option<usize> {
        self.position.get(&node).copied()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.position.contains_key(&node)
    }

    #[inline]
    pub fn tag(&self, i: usize, k: usize) -> u32 {
        self.tags[i * self.cap + k]
    }

    /// The current `t × t` matrix.
    pub fn matrix(&self) -> Vec<Vec<u32>> {
        let t = self.len();
        (0..t)
            .map(|i| (0..t).map(|k| self.tag(i, k)).collect())
            .collect()
    }

    /// `z[k] = 1` iff `{order[k], new_node}` is an edge.
    pub fn connectivity_vector(&self, g: &Graph, new_node: usize) -> Result<ConnectivityVector> {
        g.check_node(new_node)?;
        if self.contains(new_node) {
            return Err(Error::InvalidAction(format!(
                "node {new_node} is already in the subgraph"
            )));
        }
        let mut positions: Vec<usize> = g
            .neighbors(new_node)
            .iter()
            .filter_map(|w| self.position.get(w).copied())
            .collect();
        if positions.is_empty() {
            return Err(Error::Detached(new_node));
        }
        positions.sort_unstable();
        Ok(ConnectivityVector {
            len: self.len(),
            positions,
        })
    }

    /// Grow the matrix by one node attached at `z`.
    pub fn update(&mut self, new_node: usize, z: &ConnectivityVector) -> Result<()> {
        if z.len != self.len() {
            return Err(Error::InvalidParameter(format!(
                "connectivity vector has length {}, tracker has {} nodes",
                z.len,
                self.len()
            )));
        }
        if z.positions.is_empty() {
            return Err(Error::Detached(new_node));
        }
        if self.contains(new_node) {
            return Err(Error::InvalidAction(format!(
                "node {new_node} is already in the subgraph"
            )));
        }
        self.push_node(new_node, z)
    }

    /// Convenience: connectivity vector plus update.
    pub fn add_node(&mut self, g: &Graph, new_node: usize) -> Result<()> {
        let z = self.connectivity_vector(g, new_node)?;
        self.push_node(new_node, &z)
    }

    fn grow(&mut self) {
        let new_cap = self.cap * 2;
        let mut tags = vec![0u32; new_cap * new_cap];
        let t = self.len();
        for i in 0..t {
            tags[i * new_cap..i * new_cap + t]
                .copy_from_slice(&self.tags[i * self.cap..i * self.cap + t]);
        }
        self.tags = tags;
        self.groups.resize(new_cap, 0);
        self.max_tag.resize(new_cap, 0);
        self.cap = new_cap;
    }

    fn push_node(&mut self, new_node: usize, z: &ConnectivityVector) -> Result<()> {
        let t = self.len();
        if t + 1 > self.cap {
            self.grow();
        }
        let cap = self.cap;
        if t >= 2 {
            if let [k] = z.positions[..] {
                self.attach_single(t, k);
            } else {
                let mut touched: Vec<u32> = Vec::with_capacity(z.positions.len());
                for m in 0..t {
                    if self.groups[m] == 0 {
                        continue;
                    }
                    let row = &mut self.tags[m * cap..m * cap + t + 1];
                    touched.clear();
                    touched.extend(z.positions.iter().map(|&p| row[p]).filter(|&tag| tag != 0));
                    touched.sort_unstable();
                    touched.dedup();
                    if touched.len() as u32 == self.groups[m] {
                        row.iter_mut().for_each(|x| *x = 0);
                        self.groups[m] = 0;
                        self.max_tag[m] = 0;
                        continue;
                    }
                    let keep = *touched
                        .last()
                        .expect("a multi-attachment reaches a node other than m");
                    if touched.len() > 1 {
                        for x in row[..t].iter_mut() {
                            if *x != 0 && touched.binary_search(x).is_ok() {
                                *x = keep;
                            }
                        }
                        self.groups[m] -= touched.len() as u32 - 1;
                    }
                    row[t] = keep;
                }
            }
        }
        self.order.push(new_node);
        self.position.insert(new_node, t);
        Ok(())
    }

    fn attach_single(&mut self, t: usize, k: usize) {
        let cap = self.cap;
        for m in 0..t {
            if m != k && self.groups[m] != 0 {
                self.tags[m * cap + t] = self.tags[m * cap + k];
            }
        }
        let row = &mut self.tags[k * cap..k * cap + t + 1];
        if self.groups[k] == 0 {
            for (j, x) in row[..t].iter_mut().enumerate() {
                *x = u32::from(j != k);
            }
            row[t] = 2;
            self.groups[k] = 2;
            self.max_tag[k] = 2;
        } else {
            self.max_tag[k] += 1;
            row[t] = self.max_tag[k];
            self.groups[k] += 1;
        }
    }

    #[inline]
    pub fn is_cut_position(&self, i: usize) -> bool {
        self.groups[i] != 0
    }

    pub fn is_cut(&self, node: usize) -> bool {
        self.position_of(node)
            .is_some_and(|i| self.is_cut_position(i))
    }

    /// Global ids of the current cut vertices, in insertion order.
    pub fn cut_vertices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.is_cut_position(i))
            .map(|i| self.order[i])
            .collect()
    }
}

/// Articulation points of the induced subgraph on `nodes`, computed from
/// scratch with the low-link depth-first search.
pub fn static_articulation_oracle(g: &Graph, nodes: &[usize]) -> Result<BTreeSet<usize>> {
    let n = nodes.len();
    if n == 0 {
        return Ok(BTreeSet::new());
    }
    let mut local = vec![usize::MAX; g.num_nodes()];
    for (i, &v) in nodes.iter().enumerate() {
        g.check_node(v)?;
        local[v] = i;
    }
    let mut disc = vec![0usize; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut timer = 1;
    // (node, parent, next neighbor index)
    let mut stack: Vec<(usize, usize, usize)> = vec![(0, usize::MAX, 0)];
    disc[0] = timer;
    low[0] = timer;
    let mut root_children = 0;
    while let Some(&mut (u, parent, ref mut next)) = stack.last_mut() {
        let nbrs = g.neighbors(nodes[u]);
        if *next < nbrs.len() {
            let w = local[nbrs[*next]];
            *next += 1;
            if w == usize::MAX || w == parent {
                continue;
            }
            if disc[w] == 0 {
                timer += 1;
                disc[w] = timer;
                low[w] = timer;
                if u == 0 {
                    root_children += 1;
                }
                stack.push((w, u, 0));
            } else {
                low[u] = low[u].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _, _)) = stack.last() {
                low[p] = low[p].min(low[u]);
                if p != 0 && low[u] >= disc[p] {
                    is_cut[p] = true;
                }
            }
        }
    }
    if disc.contains(&0) {
        return Err(Error::Disconnected);
    }
    is_cut[0] = root_children > 1;
    Ok((0..n).filter(|&i| is_cut[i]).map(|i| nodes[i]).collect())
}
