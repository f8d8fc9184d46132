//! The flow network: feature augmentation, APPNP propagation, a per-node MLP,
//! attention pooling for the STOP action and exponentiated flow heads, with
//! exact reverse-mode gradients.
//!
//! For a state with subgraph `S` and frontier `N`, every node of `S ∪ N`
//! gets the row `[x_i, 1{i = v0}, 1{i ∈ S}]`. Rows are laid out as `S` in
//! insertion order followed by `N` ascending. Propagation runs on the
//! normalized adjacency of the subgraph induced by `S ∪ N`:
//!
//! ```text
//! H0 = X' Θ1,   H_{l+1} = (1 - α) Â H_l + α H0        (l < L)
//! H̄(v) = ReLU(H_L(v) W_a + b_a) W_b + b_b
//! γ = softmax(θ · H̄(v)),  H̄(STOP) = Σ_v γ_v H̄(v)
//! F(s, v) = exp(w_f · H̄(v) + b_f),  F(s, STOP) = exp(w_s · H̄(STOP) + b_s)
//! ```
//!
//! Every row is computed independently and neighbor sums run in ascending
//! global id, so the flows of a node set do not depend on insertion order.

use std::collections::HashMap;

use rand::Rng;

use crate::checkpoint;
use crate::error::{Error, Result};
use crate::graph::{Graph, NormalizedAdjacency};
use crate::linalg::{axpy, dot, softmax, Mat};
use crate::state::SubgraphView;

/// Logits are clamped to `[-LOGIT_CLAMP, LOGIT_CLAMP]` before exponentiation.
pub const LOGIT_CLAMP: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicyConfig {
    pub hidden: usize,
    /// Teleport weight of the propagation.
    pub alpha: f64,
    /// Propagation depth.
    pub layers: usize,
    /// Pool the STOP representation over subgraph and frontier nodes instead
    /// of the frontier alone.
    pub stop_over_subgraph: bool,
    /// Read the STOP logit with the node flow head instead of its own head.
    pub shared_stop_head: bool,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            hidden: 64,
            alpha: 0.85,
            layers: 3,
            stop_over_subgraph: false,
            shared_stop_head: false,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha {} outside [0, 1]",
                self.alpha
            )));
        }
        if self.hidden == 0 {
            return Err(Error::InvalidParameter(
                "hidden width must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// All learnable tensors. The same type doubles as a gradient buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyParams {
    /// `(d + 2) × h`.
    pub theta1: Mat,
    pub mlp_a: Mat,
    pub mlp_a_bias: Mat,
    pub mlp_b: Mat,
    pub mlp_b_bias: Mat,
    /// Attention vector, `h × 1`.
    pub attention: Mat,
    pub flow_w: Mat,
    pub flow_b: Mat,
    pub stop_w: Mat,
    pub stop_b: Mat,
}

impl PolicyParams {
    pub const NUM_TENSORS: usize = 10;

    pub fn init<R: Rng + ?Sized>(feature_dim: usize, hidden: usize, rng: &mut R) -> Self {
        PolicyParams {
            theta1: Mat::glorot(feature_dim + 2, hidden, rng),
            mlp_a: Mat::glorot(hidden, hidden, rng),
            mlp_a_bias: Mat::zeros(1, hidden),
            mlp_b: Mat::glorot(hidden, hidden, rng),
            mlp_b_bias: Mat::zeros(1, hidden),
            attention: Mat::glorot(hidden, 1, rng),
            flow_w: Mat::glorot(hidden, 1, rng),
            flow_b: Mat::zeros(1, 1),
            stop_w: Mat::glorot(hidden, 1, rng),
            stop_b: Mat::zeros(1, 1),
        }
    }

    pub fn zeros_like(&self) -> Self {
        let z = |m: &Mat| Mat::zeros(m.rows(), m.cols());
        PolicyParams {
            theta1: z(&self.theta1),
            mlp_a: z(&self.mlp_a),
            mlp_a_bias: z(&self.mlp_a_bias),
            mlp_b: z(&self.mlp_b),
            mlp_b_bias: z(&self.mlp_b_bias),
            attention: z(&self.attention),
            flow_w: z(&self.flow_w),
            flow_b: z(&self.flow_b),
            stop_w: z(&self.stop_w),
            stop_b: z(&self.stop_b),
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.theta1.rows() - 2
    }

    pub fn hidden(&self) -> usize {
        self.theta1.cols()
    }

    pub fn tensors(&self) -> [&Mat; Self::NUM_TENSORS] {
        [
            &self.theta1,
            &self.mlp_a,
            &self.mlp_a_bias,
            &self.mlp_b,
            &self.mlp_b_bias,
            &self.attention,
            &self.flow_w,
            &self.flow_b,
            &self.stop_w,
            &self.stop_b,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Mat; Self::NUM_TENSORS] {
        [
            &mut self.theta1,
            &mut self.mlp_a,
            &mut self.mlp_a_bias,
            &mut self.mlp_b,
            &mut self.mlp_b_bias,
            &mut self.attention,
            &mut self.flow_w,
            &mut self.flow_b,
            &mut self.stop_w,
            &mut self.stop_b,
        ]
    }

    pub fn add_assign(&mut self, other: &PolicyParams) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            a.add_assign(b);
        }
    }

    pub fn scale(&mut self, s: f64) {
        for t in self.tensors_mut() {
            t.scale(s);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.is_finite())
    }

    pub(crate) fn from_tensors(mut ts: Vec<Mat>) -> Result<Self> {
        if ts.len() != 10 {
            return Err(Error::Checkpoint(format!(
                "expected 10 policy tensors, found {}",
                ts.len()
            )));
        }
        let mut next = || ts.remove(0);
        let p = PolicyParams {
            theta1: next(),
            mlp_a: next(),
            mlp_a_bias: next(),
            mlp_b: next(),
            mlp_b_bias: next(),
            attention: next(),
            flow_w: next(),
            flow_b: next(),
            stop_w: next(),
            stop_b: next(),
        };
        let h = p.hidden();
        let shapes_ok = p.mlp_a.shape() == (h, h)
            && p.mlp_a_bias.shape() == (1, h)
            && p.mlp_b.shape() == (h, h)
            && p.mlp_b_bias.shape() == (1, h)
            && p.attention.shape() == (h, 1)
            && p.flow_w.shape() == (h, 1)
            && p.flow_b.shape() == (1, 1)
            && p.stop_w.shape() == (h, 1)
            && p.stop_b.shape() == (1, 1)
            && p.theta1.rows() >= 2;
        if !shapes_ok {
            return Err(Error::Checkpoint(
                "policy tensors have inconsistent shapes".into(),
            ));
        }
        Ok(p)
    }
}

/// A policy: configuration plus parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    pub config: PolicyConfig,
    pub params: PolicyParams,
}

/// Which outputs a forward pass must produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Heads {
    /// Every frontier node, plus STOP when `stop` is set.
    All { stop: bool },
    /// Only the flow of adding this node (a frontier node of the state).
    Node(usize),
}

/// Rows of one state: subgraph nodes in insertion order, then the frontier.
#[derive(Clone, Debug)]
struct RowLayout {
    ids: Vec<usize>,
    num_sub: usize,
    adj: NormalizedAdjacency,
}

impl RowLayout {
    fn new(g: &Graph, nodes: &[usize], frontier: &[usize]) -> Self {
        let mut ids = Vec::with_capacity(nodes.len() + frontier.len());
        ids.extend_from_slice(nodes);
        ids.extend_from_slice(frontier);
        let row_of: HashMap<usize, usize> = ids.iter().enumerate().map(|(r, &v)| (v, r)).collect();
        // g.neighbors is ascending, so each neighbor list is ordered by global id
        let neighbors: Vec<Vec<usize>> = ids
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .filter_map(|w| row_of.get(w).copied())
                    .collect()
            })
            .collect();
        RowLayout {
            adj: NormalizedAdjacency::from_neighbor_lists(&neighbors),
            ids,
            num_sub: nodes.len(),
        }
    }
}

/// Recorded forward pass, consumed by [`Policy::backward`].
#[derive(Clone, Debug)]
pub struct Forward {
    layout: RowLayout,
    x: Mat,
    /// Rows that went through the MLP, in order.
    mlp_rows: Vec<usize>,
    /// `H_L` restricted to `mlp_rows`.
    mlp_in: Mat,
    mlp_pre: Mat,
    mlp_out: Mat,
    /// Positions in `mlp_rows` of the scored nodes.
    scored: Vec<usize>,
    raw_logits: Vec<f64>,
    stop: Option<StopCache>,
}

#[derive(Clone, Debug)]
struct StopCache {
    /// Positions in `mlp_rows` of the pooled nodes.
    pool: Vec<usize>,
    gamma: Vec<f64>,
    hbar: Vec<f64>,
    raw_logit: f64,
}

#[inline]
fn clamp_logit(x: f64) -> f64 {
    x.clamp(-LOGIT_CLAMP, LOGIT_CLAMP)
}

/// Gradient factor of the clamp.
#[inline]
fn clamp_grad(x: f64) -> f64 {
    if x.abs() < LOGIT_CLAMP {
        1.0
    } else {
        0.0
    }
}

impl Forward {
    /// Global ids of the scored nodes, aligned with [`Forward::logits`].
    pub fn scored_nodes(&self) -> Vec<usize> {
        self.scored
            .iter()
            .map(|&p| self.layout.ids[self.mlp_rows[p]])
            .collect()
    }

    /// Clamped node logits.
    pub fn logits(&self) -> Vec<f64> {
        self.raw_logits.iter().map(|&x| clamp_logit(x)).collect()
    }

    pub fn stop_logit(&self) -> Option<f64> {
        self.stop.as_ref().map(|s| clamp_logit(s.raw_logit))
    }

    /// Node flows `exp(logit)`.
    pub fn flows(&self) -> Vec<f64> {
        self.logits().into_iter().map(f64::exp).collect()
    }

    pub fn stop_flow(&self) -> Option<f64> {
        self.stop_logit().map(f64::exp)
    }

    /// Attention weights of the STOP pooling.
    pub fn attention(&self) -> Option<&[f64]> {
        self.stop.as_ref().map(|s| s.gamma.as_slice())
    }

    pub fn stop_representation(&self) -> Option<&[f64]> {
        self.stop.as_ref().map(|s| s.hbar.as_slice())
    }

    /// Action probabilities: node actions in frontier order, then STOP if
    /// it was computed.
    pub fn policy(&self) -> Vec<f64> {
        let mut logits = self.logits();
        if let Some(s) = self.stop_logit() {
            logits.push(s);
        }
        softmax(&logits)
    }

    /// The augmented feature matrix `X'`.
    pub fn augmented_features(&self) -> &Mat {
        &self.x
    }

    /// Global ids of the rows of [`Forward::augmented_features`].
    pub fn row_ids(&self) -> &[usize] {
        &self.layout.ids
    }
}

/// `X'` rows: `[x_i, 1{i = v0}, 1{i ∈ S}]` for `S` then `N`.
pub fn augment_features(g: &Graph, state: &impl SubgraphView) -> Mat {
    let layout_ids: Vec<usize> = state
        .nodes()
        .iter()
        .chain(state.frontier())
        .copied()
        .collect();
    augment_rows(g, &layout_ids, state.nodes().len(), state.v0())
}

fn augment_rows(g: &Graph, ids: &[usize], num_sub: usize, v0: usize) -> Mat {
    let d = g.feature_dim();
    let mut x = Mat::zeros(ids.len(), d + 2);
    for (r, &v) in ids.iter().enumerate() {
        let row = x.row_mut(r);
        row[..d].copy_from_slice(g.features(v));
        row[d] = if v == v0 { 1.0 } else { 0.0 };
        row[d + 1] = if r < num_sub { 1.0 } else { 0.0 };
    }
    x
}

/// `H_L` of the propagation, for any `Â`, `α` and depth.
pub fn appnp_encode(
    x: &Mat,
    adj: &NormalizedAdjacency,
    theta1: &Mat,
    alpha: f64,
    layers: usize,
) -> Result<Mat> {
    if x.cols() != theta1.rows() || adj.size() != x.rows() {
        return Err(Error::InvalidParameter(format!(
            "dimension mismatch: X' is {}x{}, Θ1 is {}x{}, Â is {}x{}",
            x.rows(),
            x.cols(),
            theta1.rows(),
            theta1.cols(),
            adj.size(),
            adj.size()
        )));
    }
    Ok(propagate(&x.matmul(theta1), adj, alpha, layers))
}

fn propagate(h0: &Mat, adj: &NormalizedAdjacency, alpha: f64, layers: usize) -> Mat {
    let mut h = h0.clone();
    for _ in 0..layers {
        let mut next = adj.propagate(&h);
        for (n, &z) in next.data_mut().iter_mut().zip(h0.data()) {
            *n = (1.0 - alpha) * *n + alpha * z;
        }
        h = next;
    }
    h
}

impl Policy {
    pub fn new<R: Rng + ?Sized>(
        feature_dim: usize,
        config: PolicyConfig,
        rng: &mut R,
    ) -> Result<Self> {
        config.validate()?;
        Ok(Policy {
            params: PolicyParams::init(feature_dim, config.hidden, rng),
            config,
        })
    }

    /// Run the flow network on a state.
    pub fn forward(&self, g: &Graph, state: &impl SubgraphView, heads: Heads) -> Result<Forward> {
        if g.feature_dim() != self.params.feature_dim() {
            return Err(Error::InvalidParameter(format!(
                "policy expects {} node features, graph has {}",
                self.params.feature_dim(),
                g.feature_dim()
            )));
        }
        let layout = RowLayout::new(g, state.nodes(), state.frontier());
        let x = augment_rows(g, &layout.ids, layout.num_sub, state.v0());
        let p = &self.params;
        let hl = propagate(
            &x.matmul(&p.theta1),
            &layout.adj,
            self.config.alpha,
            self.config.layers,
        );
        let num_rows = layout.ids.len();
        let frontier_rows = layout.num_sub..num_rows;

        let (mlp_rows, scored, pool): (Vec<usize>, Vec<usize>, Option<Vec<usize>>) = match heads {
            Heads::Node(v) => {
                let r = frontier_rows
                    .clone()
                    .find(|&r| layout.ids[r] == v)
                    .ok_or_else(|| {
                        Error::InvalidAction(format!("node {v} is not in the frontier"))
                    })?;
                (vec![r], vec![0], None)
            }
            Heads::All { stop } => {
                let nf = frontier_rows.len();
                let mut rows: Vec<usize> = frontier_rows.clone().collect();
                let scored: Vec<usize> = (0..nf).collect();
                let pool = if !stop {
                    None
                } else if self.config.stop_over_subgraph {
                    let mut sub: Vec<usize> = (0..layout.num_sub).collect();
                    sub.sort_by_key(|&r| layout.ids[r]);
                    rows.extend(sub);
                    // pool in ascending global id over S ∪ N
                    let mut all: Vec<usize> = (0..rows.len()).collect();
                    all.sort_by_key(|&i| layout.ids[rows[i]]);
                    Some(all)
                } else {
                    Some(scored.clone())
                };
                (rows, scored, pool)
            }
        };

        let h = self.config.hidden;
        let mut mlp_in = Mat::zeros(mlp_rows.len(), h);
        for (i, &r) in mlp_rows.iter().enumerate() {
            mlp_in.row_mut(i).copy_from_slice(hl.row(r));
        }
        let mut mlp_pre = mlp_in.matmul(&p.mlp_a);
        mlp_pre.add_row_vector(p.mlp_a_bias.data());
        let mut act = mlp_pre.clone();
        act.relu_inplace();
        let mut mlp_out = act.matmul(&p.mlp_b);
        mlp_out.add_row_vector(p.mlp_b_bias.data());

        let raw_logits = scored
            .iter()
            .map(|&i| dot(mlp_out.row(i), p.flow_w.data()) + p.flow_b.data()[0])
            .collect();

        let stop = pool.map(|pool| {
            let scores: Vec<f64> = pool
                .iter()
                .map(|&i| dot(mlp_out.row(i), p.attention.data()))
                .collect();
            let gamma = softmax(&scores);
            let mut hbar = vec![0.0; h];
            for (&i, &gm) in pool.iter().zip(&gamma) {
                axpy(gm, mlp_out.row(i), &mut hbar);
            }
            let (w, b) = if self.config.shared_stop_head {
                (&p.flow_w, &p.flow_b)
            } else {
                (&p.stop_w, &p.stop_b)
            };
            let raw_logit = dot(&hbar, w.data()) + b.data()[0];
            StopCache {
                pool,
                gamma,
                hbar,
                raw_logit,
            }
        });

        Ok(Forward {
            layout,
            x,
            mlp_rows,
            mlp_in,
            mlp_pre,
            mlp_out,
            scored,
            raw_logits,
            stop,
        })
    }

    /// Accumulate into `grads` the gradient of a scalar loss whose partial
    /// derivatives with respect to the clamped logits are `d_logits` (aligned
    /// with [`Forward::logits`]) and `d_stop`.
    pub fn backward(
        &self,
        fwd: &Forward,
        d_logits: &[f64],
        d_stop: f64,
        grads: &mut PolicyParams,
    ) -> Result<()> {
        if d_logits.len() != fwd.raw_logits.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} logit gradients, got {}",
                fwd.raw_logits.len(),
                d_logits.len()
            )));
        }
        if d_stop != 0.0 && fwd.stop.is_none() {
            return Err(Error::InvalidParameter(
                "STOP gradient for a pass without STOP head".into(),
            ));
        }
        let p = &self.params;
        let h = self.config.hidden;
        let m = fwd.mlp_rows.len();
        let mut d_out = Mat::zeros(m, h);

        for ((&i, &dl), &raw) in fwd.scored.iter().zip(d_logits).zip(&fwd.raw_logits) {
            let dl = dl * clamp_grad(raw);
            if dl == 0.0 {
                continue;
            }
            axpy(dl, p.flow_w.data(), d_out.row_mut(i));
            axpy(dl, fwd.mlp_out.row(i), grads.flow_w.data_mut());
            grads.flow_b.data_mut()[0] += dl;
        }

        if let Some(stop) = &fwd.stop {
            let ds = d_stop * clamp_grad(stop.raw_logit);
            if ds != 0.0 {
                let (w, gw, gb) = if self.config.shared_stop_head {
                    (&p.flow_w, &mut grads.flow_w, &mut grads.flow_b)
                } else {
                    (&p.stop_w, &mut grads.stop_w, &mut grads.stop_b)
                };
                axpy(ds, &stop.hbar, gw.data_mut());
                gb.data_mut()[0] += ds;
                let d_hbar: Vec<f64> = w.data().iter().map(|&x| ds * x).collect();
                let d_gamma: Vec<f64> = stop
                    .pool
                    .iter()
                    .map(|&i| dot(fwd.mlp_out.row(i), &d_hbar))
                    .collect();
                let mean: f64 = stop.gamma.iter().zip(&d_gamma).map(|(g, d)| g * d).sum();
                for ((&i, &gm), &dg) in stop.pool.iter().zip(&stop.gamma).zip(&d_gamma) {
                    axpy(gm, &d_hbar, d_out.row_mut(i));
                    let de = gm * (dg - mean);
                    if de != 0.0 {
                        axpy(de, p.attention.data(), d_out.row_mut(i));
                        axpy(de, fwd.mlp_out.row(i), grads.attention.data_mut());
                    }
                }
            }
        }

        // MLP: out = ReLU(in A + a) B + b
        let mut d_pre = Mat::zeros(m, h);
        for i in 0..m {
            let dr = d_out.row(i);
            if dr.iter().all(|&x| x == 0.0) {
                continue;
            }
            axpy(1.0, dr, grads.mlp_b_bias.data_mut());
            let pre = fwd.mlp_pre.row(i);
            for (k, &z) in pre.iter().enumerate() {
                if z > 0.0 {
                    axpy(z, dr, grads.mlp_b.row_mut(k));
                }
            }
            let dp = d_pre.row_mut(i);
            for (k, (d, &z)) in dp.iter_mut().zip(pre).enumerate() {
                *d = if z > 0.0 {
                    dot(p.mlp_b.row(k), dr)
                } else {
                    0.0
                };
            }
        }
        let mut d_hl = Mat::zeros(fwd.layout.ids.len(), h);
        for i in 0..m {
            let dp = d_pre.row(i);
            if dp.iter().all(|&x| x == 0.0) {
                continue;
            }
            axpy(1.0, dp, grads.mlp_a_bias.data_mut());
            for (k, &x) in fwd.mlp_in.row(i).iter().enumerate() {
                if x != 0.0 {
                    axpy(x, dp, grads.mlp_a.row_mut(k));
                }
            }
            let r = fwd.mlp_rows[i];
            let out = d_hl.row_mut(r);
            for (k, o) in out.iter_mut().enumerate() {
                *o += dot(p.mlp_a.row(k), dp);
            }
        }

        // propagation is linear in H0 and Â is symmetric
        let alpha = self.config.alpha;
        let mut d_h0 = Mat::zeros(d_hl.rows(), h);
        let mut gcur = d_hl;
        for _ in 0..self.config.layers {
            axpy(alpha, gcur.data(), d_h0.data_mut());
            let mut next = fwd.layout.adj.propagate(&gcur);
            next.scale(1.0 - alpha);
            gcur = next;
        }
        d_h0.add_assign(&gcur);
        fwd.x.matmul_tn_acc(&d_h0, &mut grads.theta1);
        Ok(())
    }

    pub(crate) fn tag(&self) -> String {
        let c = &self.config;
        format!(
            "policy {} {} {} {} {}",
            c.hidden,
            c.alpha.to_bits(),
            c.layers,
            u8::from(c.stop_over_subgraph),
            u8::from(c.shared_stop_head)
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        checkpoint::encode(&self.tag(), &self.params.tensors())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (tag, tensors) = checkpoint::decode(bytes)?;
        let bad = || Error::Checkpoint(format!("not a policy checkpoint (tag `{tag}`)"));
        let parts: Vec<&str> = tag.split(' ').collect();
        if parts.len() != 6 || parts[0] != "policy" {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
        let config = PolicyConfig {
            hidden: num(parts[1])? as usize,
            alpha: f64::from_bits(num(parts[2])?),
            layers: num(parts[3])? as usize,
            stop_over_subgraph: num(parts[4])? != 0,
            shared_stop_head: num(parts[5])? != 0,
        };
        let params = PolicyParams::from_tensors(tensors)?;
        if params.hidden() != config.hidden {
            return Err(Error::Checkpoint(
                "hidden width does not match tensors".into(),
            ));
        }
        Ok(Policy { config, params })
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use crate::state::{FrontierState, NodeSet};

    fn graph() -> Graph {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (1, 4), (4, 5), (2, 5)];
        let feats = (0..6).map(|i| vec![1.0, (i as f64 * 0.37).sin()]).collect();
        Graph::new(6, &edges, feats).unwrap()
    }

    fn policy(cfg: PolicyConfig) -> Policy {
        let mut rng = seed::rng_for(3, "policy-test", 0);
        Policy::new(2, cfg, &mut rng).unwrap()
    }

    #[test]
    fn augmented_rows_carry_indicators() {
        let g = graph();
        let s = FrontierState::from_order(&g, &[0, 1]).unwrap();
        let x = augment_features(&g, &s);
        assert_eq!(&x.row(0)[2..], &[1.0, 1.0]);
        assert_eq!(&x.row(1)[2..], &[0.0, 1.0]);
        assert_eq!(&x.row(2)[2..], &[0.0, 0.0]);
    }

    #[test]
    fn alpha_one_and_zero_layers_are_identity() {
        let g = graph();
        let x = Mat::from_vec(6, 4, (0..24).map(|i| (i as f64).cos()).collect());
        let theta = Mat::from_vec(4, 3, (0..12).map(|i| i as f64 * 0.1).collect());
        let h0 = x.matmul(&theta);
        assert_eq!(
            appnp_encode(&x, g.normalized_adjacency(), &theta, 1.0, 3).unwrap(),
            h0
        );
        assert_eq!(
            appnp_encode(&x, g.normalized_adjacency(), &theta, 0.5, 0).unwrap(),
            h0
        );
        assert!(appnp_encode(&x, g.normalized_adjacency(), &Mat::zeros(3, 3), 0.5, 1).is_err());
    }

    #[test]
    fn policy_is_a_distribution() {
        let g = graph();
        let p = policy(PolicyConfig::default());
        let s = FrontierState::from_order(&g, &[0, 1, 2]).unwrap();
        let f = p.forward(&g, &s, Heads::All { stop: true }).unwrap();
        let pi = f.policy();
        assert_eq!(pi.len(), s.frontier().len() + 1);
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(f.flows().iter().all(|&x| x > 0.0));
        let gamma = f.attention().unwrap();
        assert!((gamma.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_head_matches_full_pass() {
        let g = graph();
        let p = policy(PolicyConfig::default());
        let s = NodeSet::new(&g, vec![0, 3], 0);
        let full = p.forward(&g, &s, Heads::All { stop: false }).unwrap();
        for (v, l) in full.scored_nodes().into_iter().zip(full.logits()) {
            let one = p.forward(&g, &s, Heads::Node(v)).unwrap();
            assert_eq!(one.logits(), vec![l]);
        }
    }

    #[test]
    fn zero_upstream_gives_zero_gradient() {
        let g = graph();
        let p = policy(PolicyConfig::default());
        let s = FrontierState::from_order(&g, &[0, 1]).unwrap();
        let f = p.forward(&g, &s, Heads::All { stop: true }).unwrap();
        let mut grads = p.params.zeros_like();
        p.backward(&f, &vec![0.0; f.logits().len()], 0.0, &mut grads)
            .unwrap();
        assert!(grads.tensors().iter().all(|t| t.max_abs() == 0.0));
    }

    #[test]
    fn checkpoint_round_trip() {
        let p = policy(PolicyConfig {
            stop_over_subgraph: true,
            ..PolicyConfig::default()
        });
        assert_eq!(Policy::from_bytes(&p.to_bytes()).unwrap(), p);
    }
}
