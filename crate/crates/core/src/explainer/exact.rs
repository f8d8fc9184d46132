//! Exact terminal distributions on small graphs, by dynamic programming over
//! the state DAG.

use std::collections::BTreeMap;

use super::env::{stop_allowed, Reward};
use crate::error::Result;
use crate::graph::Graph;
use crate::policy::{Heads, Policy};
use crate::state::{frontier_of, NodeSet};

/// Node sets keyed in ascending order.
pub type SetDistribution = BTreeMap<Vec<usize>, f64>;

fn as_state(g: &Graph, set: &[usize], v0: usize) -> NodeSet {
    // v0 first, the rest ascending; flows do not depend on the order
    let mut nodes = vec![v0];
    nodes.extend(set.iter().copied().filter(|&u| u != v0));
    NodeSet::new(g, nodes, v0)
}

fn with_node(set: &[usize], v: usize) -> Vec<usize> {
    let mut s = set.to_vec();
    let at = s.binary_search(&v).unwrap_err();
    s.insert(at, v);
    s
}

/// Every terminal node set reachable from `v0` under a size cap.
pub fn terminal_sets(g: &Graph, v0: usize, max_nodes: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = vec![vec![v0]];
    if g.neighbors(v0).is_empty() {
        return level;
    }
    for _ in 1..max_nodes {
        let mut next = std::collections::BTreeSet::new();
        for set in &level {
            for v in frontier_of(g, set) {
                next.insert(with_node(set, v));
            }
        }
        if next.is_empty() {
            break;
        }
        level = next.into_iter().collect();
        out.extend(level.iter().cloned());
    }
    out
}

/// `P(s_f)` of the policy, computed exactly.
pub fn policy_terminal_distribution(
    policy: &Policy,
    g: &Graph,
    v0: usize,
    max_nodes: usize,
) -> Result<SetDistribution> {
    let mut terminal = SetDistribution::new();
    let mut level = SetDistribution::new();
    level.insert(vec![v0], 1.0);
    while !level.is_empty() {
        let mut next = SetDistribution::new();
        for (set, &p) in &level {
            let state = as_state(g, set, v0);
            if set.len() >= max_nodes || (set.len() == 1 && state.frontier.is_empty()) {
                *terminal.entry(set.clone()).or_insert(0.0) += p;
                continue;
            }
            let stop = stop_allowed(set.len(), state.frontier.is_empty());
            let fwd = policy.forward(g, &state, Heads::All { stop })?;
            let pi = fwd.policy();
            for (k, v) in fwd.scored_nodes().into_iter().enumerate() {
                *next.entry(with_node(set, v)).or_insert(0.0) += p * pi[k];
            }
            if stop {
                *terminal.entry(set.clone()).or_insert(0.0) += p * pi[pi.len() - 1];
            }
        }
        level = next;
    }
    Ok(terminal)
}

/// The target distribution `r(s_f) / Σ r`.
pub fn reward_distribution<R: Reward + ?Sized>(
    g: &Graph,
    v0: usize,
    max_nodes: usize,
    reward: &R,
) -> Result<SetDistribution> {
    let sets = terminal_sets(g, v0, max_nodes);
    let mut out = SetDistribution::new();
    let mut total = 0.0;
    for s in sets {
        let r = reward.reward(g, &s)?;
        total += r;
        out.insert(s, r);
    }
    for p in out.values_mut() {
        *p /= total;
    }
    Ok(out)
}

pub fn total_variation(p: &SetDistribution, q: &SetDistribution) -> f64 {
    let mut tv = 0.0;
    for (k, &a) in p {
        tv += (a - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &b) in q {
        if !p.contains_key(k) {
            tv += b.abs();
        }
    }
    tv / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_terminal_sets() {
        let g = Graph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], vec![vec![1.0]; 5]).unwrap();
        // every nonempty subset of the 4 leaves joined with the center
        assert_eq!(terminal_sets(&g, 0, 5).len(), 15);
        assert_eq!(terminal_sets(&g, 0, 2).len(), 4);
        // from a leaf: {1,0} then supersets through the center
        assert_eq!(terminal_sets(&g, 1, 5).len(), 8);
    }
}
