//! The subgraph-growing environment, rewards and trajectory sampling.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gnn::{GnnModel, Target};
use crate::graph::Graph;
use crate::policy::{Heads, Policy};
use crate::state::{FrontierState, SubgraphView};

/// Guard for `log` of a zero probability.
pub const PROB_FLOOR: f64 = 1e-12;

/// Terminal reward of a node set. Must be strictly positive.
pub trait Reward: Send + Sync {
    fn reward(&self, g: &Graph, nodes: &[usize]) -> Result<f64>;
}

impl<F> Reward for F
where
    F: Fn(&Graph, &[usize]) -> f64 + Send + Sync,
{
    fn reward(&self, g: &Graph, nodes: &[usize]) -> Result<f64> {
        Ok(self(g, nodes))
    }
}

/// How the original prediction enters the reward.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewardMode {
    /// The model's class probabilities on the full input.
    Soft,
    /// A one-hot vector at the model's predicted class.
    OneHot,
}

/// `r = exp(Σ_c P(Y = c) · log P(Ŷ = c | G_s))`: the exponentiated negative
/// cross-entropy between the original prediction and the prediction made
/// from the subgraph alone.
pub fn mutual_information_reward(reference: &[f64], restricted: &[f64]) -> f64 {
    let ce: f64 = reference
        .iter()
        .zip(restricted)
        .filter(|(&p, _)| p != 0.0)
        .map(|(&p, &q)| p * q.max(PROB_FLOOR).ln())
        .sum();
    ce.exp()
}

/// Reward given by the target model's prediction on the subgraph.
#[derive(Clone, Debug)]
pub struct GnnReward<'a> {
    pub model: &'a GnnModel,
    /// Target inside the environment graph.
    pub target: Target,
    /// `P(Y)`, already one-hot in [`RewardMode::OneHot`].
    pub reference: Vec<f64>,
    /// Graph the model reads, when the environment graph carries different
    /// node features. Node ids must agree with the environment graph.
    pub model_input: Option<Graph>,
}

impl<'a> GnnReward<'a> {
    pub fn new(model: &'a GnnModel, target: Target, original: &[f64], mode: RewardMode) -> Self {
        let reference = match mode {
            RewardMode::Soft => original.to_vec(),
            RewardMode::OneHot => {
                let best = argmax(original);
                (0..original.len())
                    .map(|c| if c == best { 1.0 } else { 0.0 })
                    .collect()
            }
        };
        GnnReward {
            model,
            target,
            reference,
            model_input: None,
        }
    }

    pub fn with_model_input(mut self, g: Graph) -> Self {
        self.model_input = Some(g);
        self
    }
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

impl Reward for GnnReward<'_> {
    fn reward(&self, g: &Graph, nodes: &[usize]) -> Result<f64> {
        let g = self.model_input.as_ref().unwrap_or(g);
        let q = self.model.predict_restricted(g, nodes, self.target)?;
        Ok(mutual_information_reward(&self.reference, &q))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Add(usize),
    Stop,
}

/// One explanation episode: a graph, a starting node, a size cap and a reward.
pub struct Env<R> {
    pub graph: Graph,
    pub v0: usize,
    pub max_nodes: usize,
    pub reward: R,
}

/// A sampled episode. States are prefixes of `order`: `s_t = order[..=t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub v0: usize,
    pub order: Vec<usize>,
    /// The last action was STOP (as opposed to hitting the size cap).
    pub stopped: bool,
    pub reward: f64,
    /// Removable nodes (valid parents) of `s_1, ..., s_n`.
    pub parents: Vec<Vec<usize>>,
}

impl Trajectory {
    /// Number of node additions.
    pub fn len(&self) -> usize {
        self.order.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.order.len() <= 1
    }

    pub fn actions(&self) -> Vec<Action> {
        let mut a: Vec<Action> = self.order[1..].iter().map(|&v| Action::Add(v)).collect();
        if self.stopped {
            a.push(Action::Stop);
        }
        a
    }

    /// An isolated start node: no action was possible.
    pub fn is_degenerate(&self) -> bool {
        self.order.len() == 1
    }
}

/// Whether STOP is a legal action in a state of `len` nodes with an empty
/// or non-empty frontier.
pub fn stop_allowed(len: usize, frontier_empty: bool) -> bool {
    len >= 2 || frontier_empty
}

impl<R: Reward> Env<R> {
    pub fn new(graph: Graph, v0: usize, max_nodes: usize, reward: R) -> Result<Self> {
        graph.check_node(v0)?;
        if max_nodes < 2 {
            return Err(Error::InvalidParameter(
                "max_nodes must be at least 2".into(),
            ));
        }
        Ok(Env {
            graph,
            v0,
            max_nodes,
            reward,
        })
    }

    pub fn reset(&self) -> FrontierState {
        FrontierState::new(&self.graph, self.v0).expect("v0 checked at construction")
    }

    /// Apply an action. Returns `true` when the episode is over.
    pub fn step(&self, state: &mut FrontierState, action: Action) -> Result<bool> {
        if self.is_terminal(state) {
            return Err(Error::InvalidAction("episode already finished".into()));
        }
        match action {
            Action::Stop => {
                if !stop_allowed(state.len(), state.frontier().is_empty()) {
                    return Err(Error::InvalidAction(
                        "STOP is not allowed at the initial state".into(),
                    ));
                }
                Ok(true)
            }
            Action::Add(v) => {
                state.add(&self.graph, v)?;
                Ok(self.is_terminal(state))
            }
        }
    }

    /// The size cap is reached or no node can be added from the start node.
    pub fn is_terminal(&self, state: &FrontierState) -> bool {
        state.len() >= self.max_nodes || (state.len() == 1 && state.frontier().is_empty())
    }

    pub fn reward_of(&self, nodes: &[usize]) -> Result<f64> {
        let r = self.reward.reward(&self.graph, nodes)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "reward must be positive and finite, got {r}"
            )));
        }
        Ok(r)
    }

    /// Roll out the policy: sample from `π(a|s)` or, with `greedy`, take the
    /// highest-flow action.
    pub fn rollout(&self, policy: &Policy, rng: &mut impl Rng, greedy: bool) -> Result<Trajectory> {
        let g = &self.graph;
        let mut state = self.reset();
        let mut parents = Vec::new();
        let mut stopped = false;
        while !self.is_terminal(&state) {
            let allow_stop = stop_allowed(state.len(), state.frontier().is_empty());
            let action = if state.frontier().is_empty() {
                Action::Stop
            } else {
                let fwd = policy.forward(g, &state, Heads::All { stop: allow_stop })?;
                let pi = fwd.policy();
                let k = if greedy {
                    argmax(&pi)
                } else {
                    sample_index(&pi, rng)
                };
                if k < state.frontier().len() {
                    Action::Add(state.frontier()[k])
                } else {
                    Action::Stop
                }
            };
            match action {
                Action::Stop => {
                    stopped = true;
                    break;
                }
                Action::Add(v) => {
                    state.add(g, v)?;
                    parents.push(state.removable_nodes());
                }
            }
        }
        let order = state.nodes().to_vec();
        if order.len() == 1 {
            stopped = true;
        }
        Ok(Trajectory {
            v0: self.v0,
            reward: self.reward_of(&order)?,
            order,
            stopped,
            parents,
        })
    }

    pub fn sample_trajectory(&self, policy: &Policy, rng: &mut impl Rng) -> Result<Trajectory> {
        self.rollout(policy, rng, false)
    }
}

/// Draw an index from a probability vector.
pub fn sample_index(p: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random::<f64>() * p.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reward_identities() {
        let one_hot = [0.0, 1.0, 0.0];
        assert_eq!(mutual_information_reward(&one_hot, &one_hot), 1.0);
        let uniform = [1.0 / 3.0; 3];
        assert!((mutual_information_reward(&one_hot, &uniform) - 1.0 / 3.0).abs() < 1e-15);
        let q = [0.2, 0.7, 0.1];
        assert!((mutual_information_reward(&one_hot, &q) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn zero_probability_is_floored() {
        let r = mutual_information_reward(&[1.0, 0.0], &[0.0, 1.0]);
        assert!(r > 0.0 && r <= 1e-11);
    }
}
