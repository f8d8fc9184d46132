//! Synthetic benchmark generators.
//!
//! Every generator plants small motifs (house, cycle, grid) on a random base
//! graph (Barabási–Albert or a binary tree), links each motif to a distinct
//! base node with a single bridge edge and sprinkles random noise edges.
//! Labels are a pure function of motif role.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{Dataset, DatasetKind, Task};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::{self, Rng as SeededRng};

/// Generator parameters. See [`GenParams::defaults`] for each kind's values.
#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    /// Nodes in the base graph (BA graph or binary tree).
    pub base_nodes: usize,
    /// Edges per new node in the Barabási–Albert process.
    pub ba_m: usize,
    /// Motifs per graph.
    pub num_motifs: usize,
    /// Noise edges as a fraction of motif-attachment (bridge) edges.
    pub noise_ratio: f64,
    pub feature_dim: usize,
    /// Graph-classification only.
    pub num_graphs: usize,
    /// BA-Community only: random edges between the two communities.
    pub inter_edges: usize,
}

impl GenParams {
    pub fn defaults(kind: DatasetKind) -> Self {
        let base = GenParams {
            base_nodes: 300,
            ba_m: 5,
            num_motifs: 80,
            noise_ratio: 0.1,
            feature_dim: 10,
            num_graphs: 1,
            inter_edges: 0,
        };
        match kind {
            DatasetKind::BaShapes => base,
            DatasetKind::BaCommunity => GenParams {
                inter_edges: 350,
                ..base
            },
            // 391 + 80 * 6 = 871 nodes
            DatasetKind::TreeCycles => GenParams {
                base_nodes: 391,
                ..base
            },
            // 511 + 80 * 9 = 1231 nodes
            DatasetKind::TreeGrid => GenParams {
                base_nodes: 511,
                ..base
            },
            DatasetKind::Ba2Motifs => GenParams {
                base_nodes: 20,
                ba_m: 1,
                num_motifs: 1,
                num_graphs: 1000,
                ..base
            },
        }
    }

    fn check(&self, kind: DatasetKind) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.base_nodes < 2 {
            return bad("base graph needs at least 2 nodes");
        }
        if matches!(
            kind,
            DatasetKind::BaShapes | DatasetKind::BaCommunity | DatasetKind::Ba2Motifs
        ) && (self.ba_m == 0 || self.ba_m >= self.base_nodes)
        {
            return bad("ba_m must be in [1, base_nodes)");
        }
        if self.num_motifs > self.base_nodes {
            return Err(Error::InvalidParameter(format!(
                "{} motifs need distinct attachment sites but the base has only {} nodes",
                self.num_motifs, self.base_nodes
            )));
        }
        if !(0.0..=10.0).contains(&self.noise_ratio) {
            return bad("noise_ratio must be in [0, 10]");
        }
        if self.feature_dim == 0 {
            return bad("feature_dim must be positive");
        }
        if kind.task() == Task::GraphClassification && self.num_graphs == 0 {
            return bad("num_graphs must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
enum Motif {
    House,
    Cycle(usize),
    Grid3,
}

impl Motif {
    fn size(self) -> usize {
        match self {
            Motif::House => 5,
            Motif::Cycle(n) => n,
            Motif::Grid3 => 9,
        }
    }

    fn edges(self) -> Vec<(usize, usize)> {
        match self {
            // square 0-1-2-3 with roof apex 4 over the 0-1 side
            Motif::House => vec![(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1)],
            Motif::Cycle(n) => (0..n).map(|i| (i, (i + 1) % n)).collect(),
            Motif::Grid3 => {
                let mut e = Vec::new();
                for r in 0..3 {
                    for c in 0..3 {
                        let v = r * 3 + c;
                        if c < 2 {
                            e.push((v, v + 1));
                        }
                        if r < 2 {
                            e.push((v, v + 3));
                        }
                    }
                }
                e
            }
        }
    }

    /// Role of each motif node, starting from 1 (0 is the base).
    fn roles(self) -> Vec<usize> {
        match self {
            // apex = top, roof-side corners = middle, floor corners = bottom
            Motif::House => vec![2, 2, 3, 3, 1],
            _ => vec![1; self.size()],
        }
    }
}

/// Edge list under construction plus per-node motif bookkeeping.
struct Builder {
    edges: Vec<(usize, usize)>,
    edge_set: HashSet<(usize, usize)>,
    labels: Vec<usize>,
    motif_of: Vec<Option<usize>>,
    motif_edges: Vec<(usize, usize)>,
    attachments: usize,
    motifs: usize,
}

impl Builder {
    fn new(base_edges: Vec<(usize, usize)>, base_nodes: usize) -> Self {
        let mut b = Builder {
            edges: Vec::new(),
            edge_set: HashSet::new(),
            labels: vec![0; base_nodes],
            motif_of: vec![None; base_nodes],
            motif_edges: Vec::new(),
            attachments: 0,
            motifs: 0,
        };
        for (u, v) in base_edges {
            b.add_edge(u, v);
        }
        b
    }

    fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    fn add_edge(&mut self, u: usize, v: usize) -> bool {
        let key = (u.min(v), u.max(v));
        if u == v || !self.edge_set.insert(key) {
            return false;
        }
        self.edges.push(key);
        true
    }

    /// Plant `motif` and bridge its node 0 to `site`.
    fn attach(&mut self, motif: Motif, site: usize, label_offset: usize) {
        let start = self.num_nodes();
        let id = self.motifs;
        self.motifs += 1;
        for role in motif.roles() {
            self.labels.push(label_offset + role);
            self.motif_of.push(Some(id));
        }
        for (u, v) in motif.edges() {
            self.add_edge(start + u, start + v);
            self.motif_edges.push((start + u, start + v));
        }
        self.add_edge(site, start);
        self.attachments += 1;
    }

    /// Random extra edges that never join two nodes of the same motif.
    fn add_noise<R: Rng>(&mut self, count: usize, rng: &mut R) {
        let n = self.num_nodes();
        let mut added = 0;
        let mut attempts = 0;
        while added < count && attempts < 100 * (count + 1) {
            attempts += 1;
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if let (Some(a), Some(b)) = (self.motif_of[u], self.motif_of[v]) {
                if a == b {
                    continue;
                }
            }
            if self.add_edge(u, v) {
                added += 1;
            }
        }
    }

    fn noise_count(&self, ratio: f64) -> usize {
        (ratio * self.attachments as f64).round() as usize
    }

    fn finish(self, features: Vec<Vec<f64>>) -> Result<Graph> {
        let n = self.num_nodes();
        let nodes = self.motif_of.iter().map(Option::is_some).collect();
        Graph::new(n, &self.edges, features)?
            .with_node_labels(self.labels)?
            .with_motif(nodes, &self.motif_edges)
    }
}

/// Barabási–Albert preferential attachment: start from `m` isolated nodes,
/// each new node links to `m` distinct targets drawn proportionally to degree.
fn barabasi_albert<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(m * n.saturating_sub(m));
    let mut repeated: Vec<usize> = Vec::with_capacity(2 * m * n);
    let mut targets: Vec<usize> = (0..m).collect();
    for source in m..n {
        for &t in &targets {
            edges.push((source, t));
        }
        repeated.extend_from_slice(&targets);
        repeated.extend(std::iter::repeat_n(source, m));
        let mut chosen = HashSet::with_capacity(m);
        targets.clear();
        while targets.len() < m {
            let t = repeated[rng.random_range(0..repeated.len())];
            if chosen.insert(t) {
                targets.push(t);
            }
        }
    }
    edges
}

/// Heap-shaped binary tree: node `i` hangs off `(i - 1) / 2`.
fn binary_tree(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| ((i - 1) / 2, i)).collect()
}

fn attachment_sites<R: Rng>(base_nodes: usize, count: usize, rng: &mut R) -> Vec<usize> {
    let mut sites: Vec<usize> = (0..base_nodes).collect();
    sites.shuffle(rng);
    sites.truncate(count);
    sites
}

fn constant_features(n: usize, dim: usize) -> Vec<Vec<f64>> {
    vec![vec![1.0; dim]; n]
}

/// Generate a benchmark dataset. Identical `(kind, params, seed)` always
/// produce identical datasets.
pub fn gen_dataset(kind: DatasetKind, params: &GenParams, seed: u64) -> Result<Dataset> {
    params.check(kind)?;
    let mut rng = seed::rng_for(seed, kind.name(), 0);
    let (graphs, num_classes) = match kind {
        DatasetKind::BaShapes => (vec![shapes_graph(params, &mut rng)?], 4),
        DatasetKind::BaCommunity => (vec![community_graph(params, &mut rng)?], 8),
        DatasetKind::TreeCycles => (vec![tree_graph(params, Motif::Cycle(6), &mut rng)?], 2),
        DatasetKind::TreeGrid => (vec![tree_graph(params, Motif::Grid3, &mut rng)?], 2),
        DatasetKind::Ba2Motifs => (two_motif_graphs(params, &mut rng)?, 2),
    };
    let instances = match kind.task() {
        Task::NodeClassification => {
            let mask = &graphs[0]
                .motif()
                .expect("generated graphs carry motifs")
                .nodes;
            (0..mask.len()).filter(|&v| mask[v]).collect()
        }
        Task::GraphClassification => (0..graphs.len()).collect(),
    };
    let ds = Dataset {
        name: kind.name().to_string(),
        task: kind.task(),
        num_classes,
        graphs,
        instances,
        split_seed: seed::derive_seed(seed, "split", 0),
    };
    ds.validate()?;
    Ok(ds)
}

fn shapes_builder(params: &GenParams, label_offset: usize, rng: &mut SeededRng) -> Builder {
    let base = barabasi_albert(params.base_nodes, params.ba_m, rng);
    let mut b = Builder::new(base, params.base_nodes);
    for l in b.labels.iter_mut() {
        *l = label_offset;
    }
    for site in attachment_sites(params.base_nodes, params.num_motifs, rng) {
        b.attach(Motif::House, site, label_offset);
    }
    b
}

fn shapes_graph(params: &GenParams, rng: &mut SeededRng) -> Result<Graph> {
    let mut b = shapes_builder(params, 0, rng);
    let noise = b.noise_count(params.noise_ratio);
    b.add_noise(noise, rng);
    let n = b.num_nodes();
    b.finish(constant_features(n, params.feature_dim))
}

/// Two BA-Shapes graphs side by side with labels `4 * community + role` and
/// Gaussian features whose mean depends on the community.
fn community_graph(params: &GenParams, rng: &mut SeededRng) -> Result<Graph> {
    let first = shapes_builder(params, 0, rng);
    let second = shapes_builder(params, 4, rng);
    let offset = first.num_nodes();
    let mut b = first;
    let motif_offset = b.motifs;
    b.labels.extend(second.labels.iter().copied());
    b.motif_of.extend(
        second
            .motif_of
            .iter()
            .map(|m| m.map(|id| id + motif_offset)),
    );
    b.motifs += second.motifs;
    b.attachments += second.attachments;
    for &(u, v) in &second.edges {
        b.add_edge(u + offset, v + offset);
    }
    b.motif_edges.extend(
        second
            .motif_edges
            .iter()
            .map(|&(u, v)| (u + offset, v + offset)),
    );

    let mut linked = 0;
    let mut attempts = 0;
    while linked < params.inter_edges && attempts < 100 * (params.inter_edges + 1) {
        attempts += 1;
        let u = rng.random_range(0..params.base_nodes);
        let v = offset + rng.random_range(0..params.base_nodes);
        if b.add_edge(u, v) {
            linked += 1;
        }
    }
    let noise = b.noise_count(params.noise_ratio);
    b.add_noise(noise, rng);

    let n = b.num_nodes();
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let features = (0..n)
        .map(|v| {
            let mean = if v < offset { 0.0 } else { 1.0 };
            (0..params.feature_dim)
                .map(|_| mean + std_normal.sample(rng))
                .collect()
        })
        .collect();
    b.finish(features)
}

fn tree_graph(params: &GenParams, motif: Motif, rng: &mut SeededRng) -> Result<Graph> {
    let mut b = Builder::new(binary_tree(params.base_nodes), params.base_nodes);
    for site in attachment_sites(params.base_nodes, params.num_motifs, rng) {
        b.attach(motif, site, 0);
    }
    let noise = b.noise_count(params.noise_ratio);
    b.add_noise(noise, rng);
    let n = b.num_nodes();
    b.finish(constant_features(n, params.feature_dim))
}

/// Half the graphs carry a house (label 0), half a five-node cycle (label 1).
fn two_motif_graphs(params: &GenParams, rng: &mut SeededRng) -> Result<Vec<Graph>> {
    let mut labels: Vec<usize> = (0..params.num_graphs)
        .map(|i| usize::from(i >= params.num_graphs / 2))
        .collect();
    labels.shuffle(rng);
    labels
        .into_iter()
        .map(|label| {
            let base = barabasi_albert(params.base_nodes, params.ba_m, rng);
            let mut b = Builder::new(base, params.base_nodes);
            let motif = if label == 0 {
                Motif::House
            } else {
                Motif::Cycle(5)
            };
            for site in attachment_sites(params.base_nodes, params.num_motifs, rng) {
                b.attach(motif, site, 0);
            }
            let noise = b.noise_count(params.noise_ratio);
            b.add_noise(noise, rng);
            let n = b.num_nodes();
            b.labels = vec![label; n];
            Ok(b.finish(constant_features(n, params.feature_dim))?
                .with_graph_label(label))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ba_edge_count() {
        let mut rng = seed::rng_for(1, "t", 0);
        let e = barabasi_albert(300, 5, &mut rng);
        assert_eq!(e.len(), 5 * 295);
    }

    #[test]
    fn motif_shapes() {
        assert_eq!(Motif::House.edges().len(), 6);
        assert_eq!(Motif::Cycle(6).edges().len(), 6);
        assert_eq!(Motif::Grid3.edges().len(), 12);
    }

    #[test]
    fn too_many_motifs_is_infeasible() {
        let p = GenParams {
            num_motifs: 1000,
            ..GenParams::defaults(DatasetKind::BaShapes)
        };
        assert!(gen_dataset(DatasetKind::BaShapes, &p, 0).is_err());
    }
}
