//! Training objectives: flow matching over visited states and
//! state-conditional trajectory balance.

use rand::Rng;

use super::env::{stop_allowed, Trajectory};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{log_sum_exp, Mat};
use crate::mlp::Mlp;
use crate::policy::{Forward, Heads, Policy, PolicyParams};
use crate::state::NodeSet;

/// Smoothing constant inside the logarithms of the log-space loss.
pub const FLOW_EPS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossSpace {
    /// `(log(ε + inflow) − log(ε + outflow))²`.
    Log,
    /// `(inflow − outflow)²`.
    Raw,
}

/// Residual and derivative factor of one flow-matching term.
///
/// Returns `(loss, d_in, d_out)` where the gradient with respect to the
/// logit of an inflow term `F_i` is `d_in · F_i` and likewise for outflows.
fn term(inflow: f64, outflow: f64, space: LossSpace) -> (f64, f64, f64) {
    match space {
        LossSpace::Log => {
            let delta = (FLOW_EPS + inflow).ln() - (FLOW_EPS + outflow).ln();
            (
                delta * delta,
                2.0 * delta / (FLOW_EPS + inflow),
                -2.0 * delta / (FLOW_EPS + outflow),
            )
        }
        LossSpace::Raw => {
            let delta = inflow - outflow;
            (delta * delta, 2.0 * delta, -2.0 * delta)
        }
    }
}

fn state_set(t: &Trajectory, step: usize, g: &Graph) -> NodeSet {
    NodeSet::new(g, t.order[..=step].to_vec(), t.v0)
}

fn position(fwd: &Forward, v: usize) -> Result<usize> {
    fwd.scored_nodes()
        .iter()
        .position(|&u| u == v)
        .ok_or_else(|| Error::InvalidAction(format!("node {v} is not in the frontier")))
}

/// Flow-matching loss of one trajectory, summed over its states. When
/// `grads` is given the gradient is accumulated into it.
///
/// Every state `s_t` with `t ≥ 1` contributes one term whose inflow sums
/// `F(parent, v)` over all valid parents and whose outflow is the terminal
/// reward (size cap reached) or the sum of the state's action flows. A
/// trajectory ended by STOP adds the term `F(s_n, STOP)` against `r`.
pub fn flow_matching_loss(
    policy: &Policy,
    g: &Graph,
    traj: &Trajectory,
    space: LossSpace,
    mut grads: Option<&mut PolicyParams>,
) -> Result<f64> {
    if traj.is_degenerate() {
        return Ok(0.0);
    }
    let n = traj.len();
    if traj.parents.len() != n {
        return Err(Error::InvalidParameter(
            "trajectory parent lists do not match its length".into(),
        ));
    }
    let capped = !traj.stopped;

    // Full passes for s_0..s_n; s_n of a capped trajectory has no actions.
    let mut fwds = Vec::with_capacity(n + 1);
    for t in 0..=n {
        if t == n && capped {
            break;
        }
        let s = state_set(traj, t, g);
        let stop = stop_allowed(s.nodes.len(), s.frontier.is_empty());
        fwds.push(policy.forward(g, &s, Heads::All { stop })?);
    }
    let mut d_logits: Vec<Vec<f64>> = fwds.iter().map(|f| vec![0.0; f.logits().len()]).collect();
    let mut d_stop = vec![0.0; fwds.len()];
    let mut total = 0.0;

    for t in 1..=n {
        let added = traj.order[t];
        // inflow: s_{t-1} via `added`, plus every other valid parent
        let prev_pos = position(&fwds[t - 1], added)?;
        let prev_flow = fwds[t - 1].flows()[prev_pos];
        let mut others = Vec::new();
        for &v in &traj.parents[t - 1] {
            if v == added {
                continue;
            }
            let nodes: Vec<usize> = traj.order[..=t]
                .iter()
                .copied()
                .filter(|&u| u != v)
                .collect();
            let parent = NodeSet::new(g, nodes, traj.v0);
            let f = policy.forward(g, &parent, Heads::Node(v))?;
            others.push(f);
        }
        let inflow = prev_flow + others.iter().map(|f| f.flows()[0]).sum::<f64>();

        let terminal = t == n && capped;
        let outflow = if terminal {
            traj.reward
        } else {
            fwds[t].flows().iter().sum::<f64>() + fwds[t].stop_flow().unwrap_or(0.0)
        };
        let (loss, d_in, d_out) = term(inflow, outflow, space);
        total += loss;

        if grads.is_some() {
            d_logits[t - 1][prev_pos] += d_in * prev_flow;
            for f in &others {
                let flow = f.flows()[0];
                policy.backward(f, &[d_in * flow], 0.0, grads.as_deref_mut().unwrap())?;
            }
            if !terminal {
                for (d, fl) in d_logits[t].iter_mut().zip(fwds[t].flows()) {
                    *d += d_out * fl;
                }
                if let Some(sf) = fwds[t].stop_flow() {
                    d_stop[t] += d_out * sf;
                }
            }
        }
    }

    if traj.stopped {
        let stop_flow = fwds[n].stop_flow().ok_or_else(|| {
            Error::InvalidAction("trajectory stopped where STOP is not allowed".into())
        })?;
        let (loss, d_in, _) = term(stop_flow, traj.reward, space);
        total += loss;
        d_stop[n] += d_in * stop_flow;
    }

    if let Some(gr) = grads {
        for ((f, dl), &ds) in fwds.iter().zip(&d_logits).zip(&d_stop) {
            policy.backward(f, dl, ds, gr)?;
        }
    }
    Ok(total)
}

/// Width of the hidden layers of the `log Z(v0)` perceptron.
pub const LOGZ_HIDDEN: usize = 128;

/// Three-layer perceptron for `log Z(v0)` from the start node's features.
pub fn logz_head<R: Rng + ?Sized>(feature_dim: usize, rng: &mut R) -> Mlp {
    Mlp::new(&[feature_dim, LOGZ_HIDDEN, LOGZ_HIDDEN], rng)
}

/// State-conditional trajectory balance:
/// `(log Z(v0) + Σ log P_F − log r − Σ log P_B)²`, with `P_B` uniform over
/// valid parents and equal to one for the STOP transition.
pub fn trajectory_balance_loss(
    policy: &Policy,
    logz: &Mlp,
    g: &Graph,
    traj: &Trajectory,
    grads: Option<(&mut PolicyParams, &mut [Mat])>,
) -> Result<f64> {
    let n = traj.len();
    if traj.parents.len() != n {
        return Err(Error::InvalidParameter(
            "trajectory parent lists do not match its length".into(),
        ));
    }
    let zc = logz.run(g.features(traj.v0));
    let mut fwds = Vec::new();
    let mut chosen = Vec::new();
    let mut log_pf = 0.0;
    let steps = if traj.stopped && !traj.is_degenerate() {
        n + 1
    } else {
        n
    };
    for t in 0..steps {
        let s = state_set(traj, t, g);
        let stop = stop_allowed(s.nodes.len(), s.frontier.is_empty());
        let f = policy.forward(g, &s, Heads::All { stop })?;
        let mut logits = f.logits();
        let k = if t < n {
            position(&f, traj.order[t + 1])?
        } else {
            logits.len()
        };
        if let Some(sl) = f.stop_logit() {
            logits.push(sl);
        }
        log_pf += logits[k] - log_sum_exp(&logits);
        fwds.push(f);
        chosen.push(k);
    }
    let log_pb: f64 = traj.parents.iter().map(|p| -(p.len() as f64).ln()).sum();
    let delta = zc.output + log_pf - traj.reward.ln() - log_pb;
    let loss = delta * delta;

    if let Some((pg, zg)) = grads {
        let d = 2.0 * delta;
        logz.backward(&zc, d, zg);
        for (f, &k) in fwds.iter().zip(&chosen) {
            let pi = f.policy();
            let nf = f.logits().len();
            let dl: Vec<f64> = (0..nf)
                .map(|i| d * (f64::from(u8::from(i == k)) - pi[i]))
                .collect();
            let ds = if f.stop_logit().is_some() {
                d * (f64::from(u8::from(k == nf)) - pi[nf])
            } else {
                0.0
            };
            policy.backward(f, &dl, ds, pg)?;
        }
    }
    Ok(loss)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matched_flows_have_zero_loss() {
        for space in [LossSpace::Log, LossSpace::Raw] {
            assert_eq!(term(2.5, 2.5, space).0, 0.0);
        }
    }

    #[test]
    fn log_term_hand_value() {
        let (l, _, _) = term(1.0, std::f64::consts::E, LossSpace::Log);
        let expect = ((1.0 + FLOW_EPS).ln() - (std::f64::consts::E + FLOW_EPS).ln()).powi(2);
        assert_eq!(l, expect);
        assert!((l - 1.0).abs() < 1e-7);
    }
}
