//! Fixtures and brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use gflowx::explainer::{Env, Trajectory};
use gflowx::gnn::{Batch, GnnModel};
use gflowx::graph::Graph;
use gflowx::linalg::Mat;
use gflowx::policy::{Policy, PolicyConfig, PolicyParams};
use gflowx::seed;

/// Eight nodes, two cycles and a pendant, three-dimensional features.
pub fn small_graph() -> Graph {
    let edges = [
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 0),
        (2, 4),
        (4, 5),
        (5, 6),
        (1, 6),
        (6, 7),
    ];
    let feats = (0..8)
        .map(|i| {
            vec![
                (i as f64 * 0.37).sin(),
                (i as f64 * 0.91).cos(),
                0.1 * i as f64,
            ]
        })
        .collect();
    Graph::new(8, &edges, feats).unwrap()
}

pub fn small_policy(seed_: u64) -> Policy {
    let mut rng = seed::rng_for(seed_, "grad-test", 0);
    let config = PolicyConfig {
        hidden: 6,
        ..Default::default()
    };
    Policy::new(3, config, &mut rng).unwrap()
}

/// Four sampled trajectories of at most five nodes from node 0.
pub fn small_trajectories(g: &Graph, p: &Policy) -> Vec<Trajectory> {
    let reward = |_: &Graph, s: &[usize]| 0.2 + s.iter().map(|&v| v as f64).sum::<f64>() / 10.0;
    let env = Env::new(g.clone(), 0, 5, reward).unwrap();
    let mut rng = seed::rng_for(11, "grad-traj", 0);
    (0..4)
        .map(|_| env.sample_trajectory(p, &mut rng).unwrap())
        .collect()
}

fn rel_error(fd: f64, an: f64, floor: f64) -> f64 {
    (fd - an).abs() / fd.abs().max(an.abs()).max(floor)
}

/// Worst relative error between `analytic` and central differences of `f`
/// over every policy parameter.
pub fn policy_fd_error(
    analytic: &[&Mat],
    params: &mut PolicyParams,
    f: &dyn Fn(&PolicyParams) -> f64,
) -> f64 {
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for (t, grad) in analytic.iter().enumerate() {
        for (j, &an) in grad.data().iter().enumerate() {
            let orig = params.tensors()[t].data()[j];
            params.tensors_mut()[t].data_mut()[j] = orig + h;
            let fp = f(params);
            params.tensors_mut()[t].data_mut()[j] = orig - h;
            let fm = f(params);
            params.tensors_mut()[t].data_mut()[j] = orig;
            worst = worst.max(rel_error((fp - fm) / (2.0 * h), an, 1e-3));
        }
    }
    worst
}

/// Worst relative error of the target model's training-loss gradient.
pub fn gnn_fd_error(model: &GnnModel, batch: &Batch<'_>) -> f64 {
    let (_, grads) = model.loss_and_gradients(batch).unwrap();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for (t, grad) in grads.iter().enumerate() {
        for (j, &an) in grad.data().iter().enumerate() {
            let mut plus = model.clone();
            plus.tensors_mut()[t].data_mut()[j] += h;
            let mut minus = model.clone();
            minus.tensors_mut()[t].data_mut()[j] -= h;
            let fp = plus.loss_and_gradients(batch).unwrap().0;
            let fm = minus.loss_and_gradients(batch).unwrap().0;
            worst = worst.max(rel_error((fp - fm) / (2.0 * h), an, 1e-3));
        }
    }
    worst
}

fn one_hot_features(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect()
}

/// Star with hub 0 and `n - 1` leaves, one-hot features.
pub fn star(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (0, i)).collect();
    Graph::new(n, &edges, one_hot_features(n)).unwrap()
}

/// Path `0 - 1 - ... - n-1`, one-hot features.
pub fn path(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::new(n, &edges, one_hot_features(n)).unwrap()
}

/// A reward that favours larger subgraphs and is not a function of size
/// alone, so the target distribution is neither uniform nor degenerate.
pub fn toy_reward(_: &Graph, s: &[usize]) -> f64 {
    0.5 + s.len() as f64 / 4.0 + 0.3 * f64::from(u8::from(s.contains(&1)))
}

/// Whether `nodes` induces a connected subgraph, by BFS.
pub fn bfs_connected(g: &Graph, nodes: &[usize]) -> bool {
    let Some(&start) = nodes.first() else {
        return true;
    };
    let inside: BTreeSet<usize> = nodes.iter().copied().collect();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if inside.contains(&w) && seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen.len() == inside.len()
}

/// Nodes other than `v0` whose removal leaves the rest connected.
pub fn brute_force_parents(g: &Graph, nodes: &[usize], v0: usize) -> BTreeSet<usize> {
    nodes
        .iter()
        .copied()
        .filter(|&u| u != v0)
        .filter(|&u| {
            let rest: Vec<usize> = nodes.iter().copied().filter(|&w| w != u).collect();
            bfs_connected(g, &rest)
        })
        .collect()
}

/// Articulation points of the induced subgraph by removing each node and
/// re-running BFS.
pub fn brute_force_cut_vertices(g: &Graph, nodes: &[usize]) -> BTreeSet<usize> {
    nodes
        .iter()
        .copied()
        .filter(|&u| {
            let rest: Vec<usize> = nodes.iter().copied().filter(|&w| w != u).collect();
            !bfs_connected(g, &rest)
        })
        .collect()
}
