//! Explanations, quantitative metrics, exports and the cut-vertex benchmark.

mod bench;
mod export;

use std::collections::{BTreeSet, HashSet};

pub use bench::{bench_csv, bench_cutvertex, random_connected_graph, BenchRow, BenchSummary};
pub use export::{
    explanation_csv, explanation_dot, load_explanations, metrics_csv, metrics_table,
    parse_explanations, save_explanations, write_explanations, write_text,
};

use crate::datasets::{Dataset, Task};
use crate::error::{Error, Result};
use crate::gnn::{GnnModel, Target};
use crate::graph::Graph;

/// A generated subgraph with importance weights derived from the order in
/// which its nodes were added. Node ids are global.
#[derive(Clone, Debug, PartialEq)]
pub struct Explanation {
    /// Node id (node task) or graph index (graph task).
    pub instance: usize,
    /// Insertion order; `nodes[0]` is the start node.
    pub nodes: Vec<usize>,
    /// Induced edges, most important first.
    pub edges: Vec<(usize, usize)>,
    pub edge_weights: Vec<f64>,
    pub node_weights: Vec<f64>,
    pub max_nodes: usize,
    pub reward: f64,
}

impl Explanation {
    /// Build from an insertion order on graph `g`.
    ///
    /// A node of rank `k` weighs `1 − k / K_M`; an edge weighs
    /// `1 − max(rank u, rank v) / K_M`. Edges are ordered by decreasing
    /// weight, then by the smaller endpoint rank, then by edge id.
    pub fn new(
        g: &Graph,
        instance: usize,
        nodes: Vec<usize>,
        max_nodes: usize,
        reward: f64,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("explanation has no nodes".into()));
        }
        if max_nodes == 0 || nodes.len() > max_nodes {
            return Err(Error::InvalidParameter(format!(
                "explanation has {} nodes but the cap is {max_nodes}",
                nodes.len()
            )));
        }
        let km = max_nodes as f64;
        let mut rank = std::collections::HashMap::new();
        for (r, &v) in nodes.iter().enumerate() {
            g.check_node(v)?;
            if rank.insert(v, r).is_some() {
                return Err(Error::InvalidParameter(format!("node {v} appears twice")));
            }
        }
        let mut keyed = Vec::new();
        for &(u, v) in g.edges() {
            if let (Some(&ru), Some(&rv)) = (rank.get(&u), rank.get(&v)) {
                keyed.push((ru.max(rv), ru.min(rv), g.edge_id(u, v).unwrap(), (u, v)));
            }
        }
        keyed.sort_unstable();
        Ok(Explanation {
            instance,
            edge_weights: keyed.iter().map(|k| 1.0 - k.0 as f64 / km).collect(),
            edges: keyed.into_iter().map(|k| k.3).collect(),
            node_weights: (0..nodes.len()).map(|r| 1.0 - r as f64 / km).collect(),
            nodes,
            max_nodes,
            reward,
        })
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> f64 {
        let e = (u.min(v), u.max(v));
        self.edges
            .iter()
            .position(|&x| x == e)
            .map_or(0.0, |i| self.edge_weights[i])
    }
}

/// Per-edge importance weights aligned with [`Explanation::edges`].
pub fn edge_importance(e: &Explanation) -> &[f64] {
    &e.edge_weights
}

/// ROC-AUC by the Mann–Whitney statistic; tied scores count one half.
/// `None` unless both classes are present.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    // average ranks over ties
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            if labels[k] {
                rank_sum += avg;
            }
        }
        i = j + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos as f64 * n_neg as f64))
}

/// The motif that contains `v`: nodes and edge ids reachable from `v` along
/// motif edges. Empty when `v` is not a motif node.
pub fn own_motif(g: &Graph, v: usize) -> (BTreeSet<usize>, HashSet<usize>) {
    let mut nodes = BTreeSet::new();
    let mut edges = HashSet::new();
    let Some(m) = g.motif() else {
        return (nodes, edges);
    };
    if !m.nodes[v] {
        return (nodes, edges);
    }
    nodes.insert(v);
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for &w in g.neighbors(u) {
            let id = g.edge_id(u, w).unwrap();
            if m.edges[id] {
                edges.insert(id);
                if nodes.insert(w) {
                    stack.push(w);
                }
            }
        }
    }
    (nodes, edges)
}

/// Which edges an instance's AUC is computed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AucScope {
    /// Edges of the instance's computation graph.
    ComputationGraph,
    /// Every edge of the graph.
    AllEdges,
}

fn instance_graph<'a>(ds: &'a Dataset, e: &Explanation) -> Result<&'a Graph> {
    match ds.task {
        Task::NodeClassification => Ok(ds.graph()),
        Task::GraphClassification => ds
            .graphs
            .get(e.instance)
            .ok_or_else(|| Error::InvalidParameter(format!("graph {} out of range", e.instance))),
    }
}

/// Edge ids of an instance's computation graph.
fn computation_edges(ds: &Dataset, e: &Explanation, hops: usize) -> Result<Vec<usize>> {
    let g = instance_graph(ds, e)?;
    match ds.task {
        Task::NodeClassification => {
            let nodes: HashSet<usize> = g.bfs_within(e.instance, hops).into_iter().collect();
            Ok((0..g.num_edges())
                .filter(|&i| {
                    let (u, v) = g.edges()[i];
                    nodes.contains(&u) && nodes.contains(&v)
                })
                .collect())
        }
        Task::GraphClassification => Ok((0..g.num_edges()).collect()),
    }
}

/// AUC of one explanation against its ground-truth motif edges.
pub fn instance_auc(
    ds: &Dataset,
    e: &Explanation,
    hops: usize,
    scope: AucScope,
) -> Result<Option<f64>> {
    let g = instance_graph(ds, e)?;
    let m = g
        .motif()
        .ok_or_else(|| Error::Validation("dataset has no motif masks".into()))?;
    let candidates: Vec<usize> = match scope {
        AucScope::ComputationGraph => computation_edges(ds, e, hops)?,
        AucScope::AllEdges => (0..g.num_edges()).collect(),
    };
    let positives: HashSet<usize> = match ds.task {
        Task::NodeClassification => own_motif(g, e.instance).1,
        Task::GraphClassification => (0..g.num_edges()).filter(|&i| m.edges[i]).collect(),
    };
    let scores: Vec<f64> = candidates
        .iter()
        .map(|&i| {
            let (u, v) = g.edges()[i];
            e.edge_weight(u, v)
        })
        .collect();
    let labels: Vec<bool> = candidates.iter().map(|i| positives.contains(i)).collect();
    Ok(roc_auc(&scores, &labels))
}

/// Mean explanation AUC over instances whose candidate edges contain both
/// motif and non-motif edges.
pub fn auc(
    ds: &Dataset,
    explanations: &[Explanation],
    hops: usize,
    scope: AucScope,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0;
    for e in explanations {
        if let Some(a) = instance_auc(ds, e, hops, scope)? {
            sum += a;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Validation(
            "no instance has both motif and non-motif edges".into(),
        ));
    }
    Ok(sum / count as f64)
}

/// Computation graph of an instance as a standalone graph, the target inside
/// it, and the explanation's edge ids inside it.
/// Maps a node id of the full graph into the computation graph.
type ToLocal = Box<dyn Fn(usize) -> Option<usize>>;

fn computation_graph(
    ds: &Dataset,
    e: &Explanation,
    hops: usize,
) -> Result<(Graph, Target, HashSet<usize>)> {
    let g = instance_graph(ds, e)?;
    let (local, target, to_local): (Graph, Target, ToLocal) = match ds.task {
        Task::NodeClassification => {
            let (local, center) = g.l_hop_subgraph(e.instance, hops)?;
            let lg = local.clone();
            (
                local.graph,
                Target::Node(center),
                Box::new(move |v| lg.local_id(v)),
            )
        }
        Task::GraphClassification => (g.clone(), Target::Graph, Box::new(Some)),
    };
    let mut removed = HashSet::new();
    for &(u, v) in &e.edges {
        if let (Some(a), Some(b)) = (to_local(u), to_local(v)) {
            if let Some(id) = local.edge_id(a, b) {
                removed.insert(id);
            }
        }
    }
    Ok((local, target, removed))
}

/// Mean of `f(G^L)_y − f(G^L without the explanation's edges)_y`, where `y`
/// is the class the model predicts on `G^L`.
pub fn fidelity(
    ds: &Dataset,
    model: &GnnModel,
    explanations: &[Explanation],
    hops: usize,
) -> Result<f64> {
    if explanations.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for e in explanations {
        let (local, target, removed) = computation_graph(ds, e, hops)?;
        let full = model.predict(&local, target)?;
        let y = crate::explainer::argmax(&full);
        let reduced = model.predict(&local.without_edges(&removed)?, target)?;
        sum += full[y] - reduced[y];
    }
    Ok(sum / explanations.len() as f64)
}

/// Mean of `1 − |explanation edges| / |G^L edges|`; instances whose
/// computation graph has no edges are skipped.
pub fn sparsity(ds: &Dataset, explanations: &[Explanation], hops: usize) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0;
    for e in explanations {
        let total = computation_edges(ds, e, hops)?.len();
        if total == 0 {
            continue;
        }
        sum += 1.0 - e.edges.len() as f64 / total as f64;
        count += 1;
    }
    Ok(if count == 0 { 0.0 } else { sum / count as f64 })
}

/// Mean fraction of the first `k` explanation nodes that lie in the
/// instance's motif.
pub fn accuracy_topk(ds: &Dataset, explanations: &[Explanation], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let mut sum = 0.0;
    for e in explanations {
        if k > e.max_nodes {
            return Err(Error::InvalidParameter(format!(
                "k = {k} exceeds the explanation size cap {}",
                e.max_nodes
            )));
        }
        let g = instance_graph(ds, e)?;
        let m = g
            .motif()
            .ok_or_else(|| Error::Validation("dataset has no motif masks".into()))?;
        let motif: BTreeSet<usize> = match ds.task {
            Task::NodeClassification => own_motif(g, e.instance).0,
            Task::GraphClassification => (0..g.num_nodes()).filter(|&v| m.nodes[v]).collect(),
        };
        let top = &e.nodes[..k.min(e.nodes.len())];
        sum += top.iter().filter(|v| motif.contains(v)).count() as f64 / top.len() as f64;
    }
    Ok(if explanations.is_empty() {
        0.0
    } else {
        sum / explanations.len() as f64
    })
}

/// All metrics of one evaluation run.
#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    pub dataset: String,
    pub instances: usize,
    pub auc: f64,
    pub fidelity: f64,
    pub sparsity: f64,
    pub accuracy_topk: f64,
    pub k: usize,
}

pub fn evaluate(
    ds: &Dataset,
    model: &GnnModel,
    explanations: &[Explanation],
    hops: usize,
    k: usize,
    scope: AucScope,
) -> Result<Metrics> {
    Ok(Metrics {
        dataset: ds.name.clone(),
        instances: explanations.len(),
        auc: auc(ds, explanations, hops, scope)?,
        fidelity: fidelity(ds, model, explanations, hops)?,
        sparsity: sparsity(ds, explanations, hops)?,
        accuracy_topk: accuracy_topk(ds, explanations, k)?,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::new(n, &edges, vec![vec![1.0]; n]).unwrap()
    }

    #[test]
    fn two_node_weight() {
        let e = Explanation::new(&path(3), 0, vec![0, 1], 20, 1.0).unwrap();
        assert_eq!(e.edges, vec![(0, 1)]);
        assert_eq!(e.edge_weights, vec![1.0 - 1.0 / 20.0]);
    }

    #[test]
    fn auc_extremes() {
        assert_eq!(
            roc_auc(&[0.9, 0.8, 0.1, 0.0], &[true, true, false, false]),
            Some(1.0)
        );
        assert_eq!(roc_auc(&[0.1, 0.8], &[true, false]), Some(0.0));
        assert_eq!(roc_auc(&[0.5, 0.5], &[true, false]), Some(0.5));
        assert_eq!(roc_auc(&[0.5, 0.5], &[true, true]), None);
    }
}
