//! Property tests against brute-force oracles.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::{brute_force_cut_vertices, brute_force_parents};
use gflowx::cutvertex::CutVertexMatrix;
use gflowx::eval::{random_connected_graph, roc_auc};
use gflowx::explainer::mutual_information_reward;
use gflowx::graph::Graph;
use gflowx::policy::{Heads, Policy, PolicyConfig};
use gflowx::seed;
use gflowx::state::{frontier_of, FrontierState};

fn growth(g: &Graph, v0: usize, n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut order = vec![v0];
    while order.len() < n {
        let f = frontier_of(g, &order);
        if f.is_empty() {
            break;
        }
        order.push(f[rng.random_range(0..f.len())]);
    }
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tracker_matches_brute_force(n in 2usize..=30, density in 0usize..=3, s in any::<u64>()) {
        let mut rng = seed::rng_for(s, "prop-cut", 0);
        let g = random_connected_graph(n, density * n / 2, &mut rng);
        let order = growth(&g, rng.random_range(0..n), n, &mut rng);
        let mut tracker = CutVertexMatrix::singleton(order[0]);
        for k in 1..order.len() {
            tracker.add_node(&g, order[k]).unwrap();
            let fast: BTreeSet<usize> = tracker.cut_vertices().into_iter().collect();
            prop_assert_eq!(fast, brute_force_cut_vertices(&g, &order[..=k]));
        }
    }

    #[test]
    fn parents_match_brute_force(n in 2usize..=30, density in 0usize..=3, s in any::<u64>()) {
        let mut rng = seed::rng_for(s, "prop-parents", 0);
        let g = random_connected_graph(n, density * n / 2, &mut rng);
        let size = rng.random_range(1..=n);
        let order = growth(&g, rng.random_range(0..n), size, &mut rng);
        let state = FrontierState::from_order(&g, &order).unwrap();
        let parents = state.valid_parents();
        for (v, rest) in &parents {
            prop_assert_eq!(rest.len(), order.len() - 1);
            prop_assert!(!rest.contains(v));
        }
        let fast: BTreeSet<usize> = parents.into_iter().map(|(v, _)| v).collect();
        prop_assert_eq!(fast, brute_force_parents(&g, &order, order[0]));
    }

    #[test]
    fn flows_ignore_insertion_order(n in 3usize..=20, s in any::<u64>()) {
        let mut rng = seed::rng_for(s, "prop-order", 0);
        let g = random_connected_graph(n, n, &mut rng);
        let feats: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = g.with_features(2, feats).unwrap();
        let policy = Policy::new(2, PolicyConfig { hidden: 8, ..Default::default() }, &mut rng).unwrap();
        let size = rng.random_range(2..=n);
        let order = growth(&g, 0, size, &mut rng);
        let set: BTreeSet<usize> = order.iter().copied().collect();
        let mut other = vec![0];
        while other.len() < order.len() {
            let mut next: Vec<usize> = frontier_of(&g, &other).into_iter().filter(|v| set.contains(v)).collect();
            next.shuffle(&mut rng);
            other.push(next[0]);
        }
        let flows = |o: &[usize]| {
            let st = FrontierState::from_order(&g, o).unwrap();
            let f = policy.forward(&g, &st, Heads::All { stop: true }).unwrap();
            let mut v: Vec<(usize, u64)> = f.scored_nodes().into_iter().zip(f.flows().into_iter().map(f64::to_bits)).collect();
            v.sort_unstable();
            (v, f.stop_flow().map(f64::to_bits))
        };
        prop_assert_eq!(flows(&order), flows(&other));
    }

    #[test]
    fn one_hot_reward_is_restricted_probability(raw in prop::collection::vec(0.01f64..1.0, 2..8), c in 0usize..8) {
        let total: f64 = raw.iter().sum();
        let q: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let c = c % q.len();
        let p: Vec<f64> = (0..q.len()).map(|i| f64::from(u8::from(i == c))).collect();
        let r = mutual_information_reward(&p, &q);
        prop_assert!((r - q[c]).abs() <= 4.0 * f64::EPSILON * q[c]);
    }

    #[test]
    fn auc_is_rank_invariant(scores in prop::collection::vec(0.0f64..1.0, 2..30), labels in prop::collection::vec(any::<bool>(), 30)) {
        let labels = &labels[..scores.len()];
        let squashed: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
        prop_assert_eq!(roc_auc(&scores, labels), roc_auc(&squashed, labels));
    }
}

/// Mann-Whitney by explicit pair counting.
fn pairwise_auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if labels[i] && !labels[j] {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    (pairs > 0.0).then(|| wins / pairs)
}

proptest! {
    #[test]
    fn auc_matches_pair_counting(scores in prop::collection::vec(0u8..5, 1..25), labels in prop::collection::vec(any::<bool>(), 25)) {
        let scores: Vec<f64> = scores.into_iter().map(f64::from).collect();
        let labels = &labels[..scores.len()];
        let (a, b) = (roc_auc(&scores, labels), pairwise_auc(&scores, labels));
        prop_assert_eq!(a.is_some(), b.is_some());
        if let (Some(a), Some(b)) = (a, b) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
