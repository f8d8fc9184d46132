//! Training and inference of the explainer.
//!
//! An epoch visits the (optionally subsampled) instances in shuffled batches.
//! Every instance in a batch contributes one sampled trajectory; the batch
//! mean of the objective's gradient drives one Adam step. Trajectories are
//! sampled in parallel, each from its own random stream, and gradients are
//! summed in batch order, so results do not depend on the thread count.

use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::env::{Env, GnnReward, Reward, RewardMode, Trajectory};
use super::locator::Locator;
use super::loss::{flow_matching_loss, logz_head, trajectory_balance_loss, LossSpace};
use crate::checkpoint;
use crate::datasets::{Dataset, Task};
use crate::error::{Error, Result};
use crate::eval::Explanation;
use crate::gnn::{Embeddings, GnnModel, Target};
use crate::graph::Graph;
use crate::linalg::Mat;
use crate::mlp::Mlp;
use crate::optim::Adam;
use crate::policy::{Policy, PolicyConfig, PolicyParams};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    FlowMatching(LossSpace),
    TrajectoryBalance,
}

/// What the policy sees of each node besides the two state indicators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeInput {
    /// The dataset's node features.
    Features,
    /// Node features followed by the target model's last-layer node
    /// embedding on the full graph.
    FeaturesAndEmbeddings,
}

impl NodeInput {
    pub fn dim(self, model: &GnnModel) -> usize {
        match self {
            NodeInput::Features => model.input_dim(),
            NodeInput::FeaturesAndEmbeddings => model.input_dim() + model.hidden(),
        }
    }

    /// `g` with the node features the policy reads.
    pub fn apply(self, model: &GnnModel, g: &Graph) -> Result<Graph> {
        match self {
            NodeInput::Features => Ok(g.clone()),
            NodeInput::FeaturesAndEmbeddings => {
                let z = model.embeddings(g)?.nodes;
                let mut flat = Vec::with_capacity(g.num_nodes() * self.dim(model));
                for v in 0..g.num_nodes() {
                    flat.extend_from_slice(g.features(v));
                    flat.extend_from_slice(z.row(v));
                }
                g.with_features(self.dim(model), flat)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    /// Trajectories per optimizer step.
    pub batch: usize,
    pub epochs: usize,
    pub lr: f64,
    /// Learning rate reached at the last step through geometric decay;
    /// constant at `lr` when `None`.
    pub final_lr: Option<f64>,
    /// Size cap `K_M` of a generated subgraph.
    pub max_nodes: usize,
    /// Radius of the computation graph an explanation is drawn from.
    pub hops: usize,
    /// Fraction of graphs used to fit the locator each epoch.
    pub locator_sample: f64,
    /// Candidate start nodes scored per locator graph.
    pub locator_candidates: usize,
    pub objective: Objective,
    pub reward_mode: RewardMode,
    pub node_input: NodeInput,
    pub policy: PolicyConfig,
    /// Instances visited per epoch; every instance when `None`.
    pub instances_per_epoch: Option<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch: 64,
            epochs: 50,
            lr: 1e-2,
            final_lr: None,
            max_nodes: 20,
            hops: 3,
            locator_sample: 0.2,
            locator_candidates: 5,
            objective: Objective::FlowMatching(LossSpace::Log),
            reward_mode: RewardMode::Soft,
            node_input: NodeInput::FeaturesAndEmbeddings,
            policy: PolicyConfig::default(),
            instances_per_epoch: None,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.batch == 0 || self.epochs == 0 || self.hops == 0 || self.locator_candidates == 0 {
            return bad("batch, epochs, hops and locator candidates must be positive");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.final_lr.is_some_and(|f| !(f > 0.0 && f.is_finite())) {
            return bad("final learning rate must be positive");
        }
        if self.max_nodes < 2 {
            return bad("max_nodes must be at least 2");
        }
        if !(self.locator_sample > 0.0 && self.locator_sample <= 1.0) {
            return bad("locator sample ratio must lie in (0, 1]");
        }
        if self.instances_per_epoch == Some(0) {
            return bad("instances per epoch must be positive");
        }
        self.policy.validate()
    }
}

/// One line of the training log.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochRow {
    pub epoch: usize,
    pub mean_loss: f64,
    pub mean_reward: f64,
    pub wall_ms: u128,
}

/// CSV with header `epoch,mean_loss,mean_reward,wall_ms`.
pub fn training_csv(rows: &[EpochRow]) -> String {
    let mut out = String::from("epoch,mean_loss,mean_reward,wall_ms\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.epoch, r.mean_loss, r.mean_reward, r.wall_ms
        );
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExplainMode {
    /// Take the highest-probability action at every step.
    Greedy,
    /// Sample actions from the policy.
    Sample,
}

/// A trained explainer.
#[derive(Clone, Debug, PartialEq)]
pub struct Explainer {
    pub policy: Policy,
    /// `log Z(v0)` head, present when trained with trajectory balance.
    pub logz: Option<Mlp>,
    /// Start-node locator, present for graph classification.
    pub locator: Option<Locator>,
    pub max_nodes: usize,
    pub hops: usize,
    pub reward_mode: RewardMode,
    pub node_input: NodeInput,
}

/// An environment for one instance plus the map back to global node ids.
struct Episode<'a> {
    env: Env<GnnReward<'a>>,
    global: Vec<usize>,
}

struct Setup<'a> {
    ds: &'a Dataset,
    model: &'a GnnModel,
    hops: usize,
    max_nodes: usize,
    mode: RewardMode,
    input: NodeInput,
    /// Full-graph class probabilities of every node (node task).
    node_probs: Vec<Vec<f64>>,
    /// The node-task graph with policy features.
    policy_graph: Option<Graph>,
}

impl<'a> Setup<'a> {
    fn new(
        ds: &'a Dataset,
        model: &'a GnnModel,
        hops: usize,
        max_nodes: usize,
        mode: RewardMode,
        input: NodeInput,
    ) -> Result<Self> {
        ds.validate()?;
        if model.task() != ds.task {
            return Err(Error::InvalidParameter(format!(
                "model was trained for {} classification but the dataset is {} classification",
                model.task().as_str(),
                ds.task.as_str()
            )));
        }
        let node_probs = match ds.task {
            Task::NodeClassification => model.predict_nodes(ds.graph())?,
            Task::GraphClassification => Vec::new(),
        };
        let policy_graph = match (ds.task, input) {
            (Task::NodeClassification, NodeInput::FeaturesAndEmbeddings) => {
                Some(input.apply(model, ds.graph())?)
            }
            _ => None,
        };
        Ok(Setup {
            ds,
            model,
            hops,
            max_nodes,
            mode,
            input,
            node_probs,
            policy_graph,
        })
    }

    /// For graph tasks `start` picks the first node.
    fn episode(&self, instance: usize, start: Option<usize>) -> Result<Episode<'a>> {
        match self.ds.task {
            Task::NodeClassification => {
                let (local, center) = self.ds.graph().l_hop_subgraph(instance, self.hops)?;
                let mut reward = GnnReward::new(
                    self.model,
                    Target::Node(center),
                    &self.node_probs[instance],
                    self.mode,
                );
                let graph = match &self.policy_graph {
                    None => local.graph,
                    Some(pg) => {
                        let seen = pg.induced_subgraph(&local.global)?.graph;
                        reward = reward.with_model_input(local.graph);
                        seen
                    }
                };
                Ok(Episode {
                    env: Env::new(graph, center, self.max_nodes, reward)?,
                    global: local.global,
                })
            }
            Task::GraphClassification => {
                let g = self.ds.graphs.get(instance).ok_or_else(|| {
                    Error::InvalidParameter(format!("graph {instance} out of range"))
                })?;
                let v0 = start.ok_or_else(|| {
                    Error::InvalidParameter("graph explanations need a start node".into())
                })?;
                let original = self.model.predict_graph(g)?;
                let mut reward = GnnReward::new(self.model, Target::Graph, &original, self.mode);
                let graph = match self.input {
                    NodeInput::Features => g.clone(),
                    NodeInput::FeaturesAndEmbeddings => {
                        reward = reward.with_model_input(g.clone());
                        self.input.apply(self.model, g)?
                    }
                };
                Ok(Episode {
                    env: Env::new(graph, v0, self.max_nodes, reward)?,
                    global: (0..g.num_nodes()).collect(),
                })
            }
        }
    }
}

fn objective_loss(
    objective: Objective,
    policy: &Policy,
    logz: Option<&Mlp>,
    g: &Graph,
    traj: &Trajectory,
    grads: Option<(&mut PolicyParams, &mut [Mat])>,
) -> Result<f64> {
    match objective {
        Objective::FlowMatching(space) => {
            flow_matching_loss(policy, g, traj, space, grads.map(|(p, _)| p))
        }
        Objective::TrajectoryBalance => {
            let logz = logz.ok_or_else(|| {
                Error::InvalidParameter("trajectory balance needs a log Z head".into())
            })?;
            trajectory_balance_loss(policy, logz, g, traj, grads)
        }
    }
}

struct Sample {
    loss: f64,
    reward: f64,
    policy_grads: PolicyParams,
    logz_grads: Vec<Mat>,
}

/// Stream index of the `j`-th draw of epoch `epoch`.
fn stream(epoch: usize, j: usize) -> u64 {
    ((epoch as u64) << 32) | j as u64
}

pub fn train_explainer(
    ds: &Dataset,
    model: &GnnModel,
    cfg: &TrainConfig,
) -> Result<(Explainer, Vec<EpochRow>)> {
    train_explainer_with(ds, model, cfg, |_| {})
}

/// [`train_explainer`] with a callback after every epoch.
pub fn train_explainer_with(
    ds: &Dataset,
    model: &GnnModel,
    cfg: &TrainConfig,
    mut progress: impl FnMut(&EpochRow),
) -> Result<(Explainer, Vec<EpochRow>)> {
    cfg.validate()?;
    let setup = Setup::new(
        ds,
        model,
        cfg.hops,
        cfg.max_nodes,
        cfg.reward_mode,
        cfg.node_input,
    )?;
    if ds.instances.is_empty() {
        return Err(Error::InvalidParameter(
            "dataset has no instances to explain".into(),
        ));
    }
    let feature_dim = cfg.node_input.dim(model);
    let mut init = seed::rng_for(cfg.seed, "explainer-init", 0);
    let mut policy = Policy::new(feature_dim, cfg.policy, &mut init)?;
    let mut logz =
        (cfg.objective == Objective::TrajectoryBalance).then(|| logz_head(feature_dim, &mut init));
    let mut locator =
        (ds.task == Task::GraphClassification).then(|| Locator::new(model.hidden(), &mut init));

    let embeddings: Vec<Embeddings> = match ds.task {
        Task::NodeClassification => Vec::new(),
        Task::GraphClassification => ds
            .instances
            .par_iter()
            .map(|&i| model.embeddings(&ds.graphs[i]))
            .collect::<Result<_>>()?,
    };
    let starts = |loc: Option<&Locator>| -> Result<Vec<Option<usize>>> {
        match loc {
            None => Ok(vec![None; ds.instances.len()]),
            Some(l) => embeddings
                .par_iter()
                .map(|e| l.locate(e).map(Some))
                .collect(),
        }
    };
    let first = starts(locator.as_ref())?;
    let mut episodes: Vec<Episode> = ds
        .instances
        .par_iter()
        .zip(first)
        .map(|(&i, s)| setup.episode(i, s))
        .collect::<Result<_>>()?;

    let per_epoch = cfg
        .instances_per_epoch
        .map_or(episodes.len(), |k| k.min(episodes.len()));
    let total_steps = cfg.epochs * per_epoch.div_ceil(cfg.batch);
    let decay = match cfg.final_lr {
        Some(f) if total_steps > 1 => (f / cfg.lr).powf(1.0 / (total_steps - 1) as f64),
        _ => 1.0,
    };
    let mut step = 0usize;
    let mut adam = Adam::new(cfg.lr);
    let mut locator_adam = Adam::new(cfg.lr);
    let mut order_rng = seed::rng_for(cfg.seed, "explainer-order", 0);
    let mut locator_rng = seed::rng_for(cfg.seed, "locator-graphs", 0);
    let mut rows = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let clock = Instant::now();
        let mut visit: Vec<usize> = (0..episodes.len()).collect();
        visit.shuffle(&mut order_rng);
        if let Some(k) = cfg.instances_per_epoch {
            visit.truncate(k);
        }
        let mut loss_sum = 0.0;
        let mut reward_sum = 0.0;
        for (b, chunk) in visit.chunks(cfg.batch).enumerate() {
            let results: Vec<Result<Sample>> = chunk
                .par_iter()
                .enumerate()
                .map(|(j, &e)| {
                    let mut rng = seed::rng_for(
                        cfg.seed,
                        "explainer-trajectory",
                        stream(epoch, b * cfg.batch + j),
                    );
                    let ep = &episodes[e];
                    let traj = ep.env.sample_trajectory(&policy, &mut rng)?;
                    let mut policy_grads = policy.params.zeros_like();
                    let mut logz_grads = logz.as_ref().map_or_else(Vec::new, Mlp::zeros_like);
                    let loss = objective_loss(
                        cfg.objective,
                        &policy,
                        logz.as_ref(),
                        &ep.env.graph,
                        &traj,
                        Some((&mut policy_grads, &mut logz_grads)),
                    )?;
                    Ok(Sample {
                        loss,
                        reward: traj.reward,
                        policy_grads,
                        logz_grads,
                    })
                })
                .collect();
            let mut policy_grads = policy.params.zeros_like();
            let mut logz_grads = logz.as_ref().map_or_else(Vec::new, Mlp::zeros_like);
            for (r, &e) in results.into_iter().zip(chunk) {
                let s = r?;
                if !s.loss.is_finite() {
                    return Err(Error::Diverged(format!(
                        "epoch {epoch}: loss {} on instance {}",
                        s.loss, ds.instances[e]
                    )));
                }
                loss_sum += s.loss;
                reward_sum += s.reward;
                policy_grads.add_assign(&s.policy_grads);
                for (a, g) in logz_grads.iter_mut().zip(&s.logz_grads) {
                    a.add_assign(g);
                }
            }
            let scale = 1.0 / chunk.len() as f64;
            policy_grads.scale(scale);
            logz_grads.iter_mut().for_each(|g| g.scale(scale));

            let mut params: Vec<&mut Mat> = policy.params.tensors_mut().into_iter().collect();
            let mut grads: Vec<&Mat> = policy_grads.tensors().into_iter().collect();
            if let Some(z) = logz.as_mut() {
                params.extend(z.params.iter_mut());
                grads.extend(logz_grads.iter());
            }
            adam.lr = cfg.lr * decay.powi(step as i32);
            step += 1;
            adam.step(&mut params, &grads);
            let logz_finite = logz
                .as_ref()
                .is_none_or(|z| z.params.iter().all(Mat::is_finite));
            if !policy.params.is_finite() || !logz_finite {
                return Err(Error::Diverged(format!(
                    "epoch {epoch} batch {b}: parameters became non-finite"
                )));
            }
        }

        if let Some(loc) = locator.as_mut() {
            let count = ((cfg.locator_sample * episodes.len() as f64).ceil() as usize)
                .clamp(1, episodes.len());
            let mut picked: Vec<usize> = (0..episodes.len()).collect();
            picked.shuffle(&mut locator_rng);
            picked.truncate(count);
            let fits: Vec<Result<Vec<Mat>>> = picked
                .par_iter()
                .enumerate()
                .map(|(j, &e)| {
                    let mut rng = seed::rng_for(cfg.seed, "locator-candidates", stream(epoch, j));
                    let env = &episodes[e].env;
                    let mut candidates: Vec<usize> = (0..env.graph.num_nodes()).collect();
                    candidates.shuffle(&mut rng);
                    candidates.truncate(cfg.locator_candidates);
                    candidates.sort_unstable();
                    let mut losses = Vec::with_capacity(candidates.len());
                    for &c in &candidates {
                        let probe =
                            Env::new(env.graph.clone(), c, env.max_nodes, env.reward.clone())?;
                        let traj = probe.sample_trajectory(&policy, &mut rng)?;
                        losses.push(objective_loss(
                            cfg.objective,
                            &policy,
                            logz.as_ref(),
                            &probe.graph,
                            &traj,
                            None,
                        )?);
                    }
                    let mut grads = loc.mlp.zeros_like();
                    loc.kl_loss(&embeddings[e], &candidates, &losses, &mut grads)?;
                    Ok(grads)
                })
                .collect();
            let mut total = loc.mlp.zeros_like();
            for g in fits {
                for (a, b) in total.iter_mut().zip(&g?) {
                    a.add_assign(b);
                }
            }
            total.iter_mut().for_each(|g| g.scale(1.0 / count as f64));
            let mut params: Vec<&mut Mat> = loc.mlp.params.iter_mut().collect();
            locator_adam.step(&mut params, &total.iter().collect::<Vec<_>>());
            if !loc.mlp.params.iter().all(Mat::is_finite) {
                return Err(Error::Diverged(format!(
                    "epoch {epoch}: locator parameters became non-finite"
                )));
            }
            let next = starts(Some(loc))?;
            for (ep, s) in episodes.iter_mut().zip(next) {
                ep.env.v0 = s.expect("locator present");
            }
        }

        let row = EpochRow {
            epoch,
            mean_loss: loss_sum / visit.len() as f64,
            mean_reward: reward_sum / visit.len() as f64,
            wall_ms: clock.elapsed().as_millis(),
        };
        progress(&row);
        rows.push(row);
    }

    let explainer = Explainer {
        policy,
        logz,
        locator,
        max_nodes: cfg.max_nodes,
        hops: cfg.hops,
        reward_mode: cfg.reward_mode,
        node_input: cfg.node_input,
    };
    Ok((explainer, rows))
}

/// Optimizer schedule for [`fit_env`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    pub steps: usize,
    /// Trajectories per step.
    pub batch: usize,
    /// Learning rate of the first step.
    pub lr: f64,
    /// Learning rate of the last step; intermediate steps interpolate
    /// geometrically.
    pub final_lr: f64,
    pub seed: u64,
}

/// Fit `policy` (and `logz` for trajectory balance) on one fixed
/// environment. Returns the mean loss of every step.
pub fn fit_env<R: Reward>(
    env: &Env<R>,
    policy: &mut Policy,
    mut logz: Option<&mut Mlp>,
    objective: Objective,
    cfg: &FitConfig,
) -> Result<Vec<f64>> {
    let FitConfig {
        steps,
        batch,
        lr,
        final_lr,
        seed,
    } = *cfg;
    if batch == 0 || !(lr > 0.0 && final_lr > 0.0) {
        return Err(Error::InvalidParameter(
            "batch and learning rates must be positive".into(),
        ));
    }
    let decay = if steps > 1 {
        (final_lr / lr).powf(1.0 / (steps - 1) as f64)
    } else {
        1.0
    };
    let mut adam = Adam::new(lr);
    let mut history = Vec::with_capacity(steps);
    for step in 0..steps {
        adam.lr = lr * decay.powi(step as i32);
        let samples: Vec<Result<Sample>> = (0..batch)
            .into_par_iter()
            .map(|j| {
                let mut rng = seed::rng_for(seed, "fit-env", stream(step, j));
                let traj = env.sample_trajectory(policy, &mut rng)?;
                let mut policy_grads = policy.params.zeros_like();
                let mut logz_grads = logz.as_deref().map_or_else(Vec::new, Mlp::zeros_like);
                let loss = objective_loss(
                    objective,
                    policy,
                    logz.as_deref(),
                    &env.graph,
                    &traj,
                    Some((&mut policy_grads, &mut logz_grads)),
                )?;
                Ok(Sample {
                    loss,
                    reward: traj.reward,
                    policy_grads,
                    logz_grads,
                })
            })
            .collect();
        let mut policy_grads = policy.params.zeros_like();
        let mut logz_grads = logz.as_deref().map_or_else(Vec::new, Mlp::zeros_like);
        let mut total = 0.0;
        for s in samples {
            let s = s?;
            total += s.loss;
            policy_grads.add_assign(&s.policy_grads);
            for (a, g) in logz_grads.iter_mut().zip(&s.logz_grads) {
                a.add_assign(g);
            }
        }
        if !total.is_finite() {
            return Err(Error::Diverged(format!("step {step}: loss {total}")));
        }
        let scale = 1.0 / batch as f64;
        policy_grads.scale(scale);
        logz_grads.iter_mut().for_each(|g| g.scale(scale));
        let mut params: Vec<&mut Mat> = policy.params.tensors_mut().into_iter().collect();
        let mut grads: Vec<&Mat> = policy_grads.tensors().into_iter().collect();
        if let Some(z) = logz.as_deref_mut() {
            params.extend(z.params.iter_mut());
            grads.extend(logz_grads.iter());
        }
        adam.step(&mut params, &grads);
        history.push(total * scale);
    }
    Ok(history)
}

impl Explainer {
    /// Explain several instances in parallel. Sampling uses one random
    /// stream per instance, derived from `seed`.
    pub fn explain_many(
        &self,
        ds: &Dataset,
        model: &GnnModel,
        instances: &[usize],
        mode: ExplainMode,
        seed: u64,
    ) -> Result<Vec<Explanation>> {
        let setup = Setup::new(
            ds,
            model,
            self.hops,
            self.max_nodes,
            self.reward_mode,
            self.node_input,
        )?;
        instances
            .par_iter()
            .map(|&i| {
                let start = match ds.task {
                    Task::NodeClassification => None,
                    Task::GraphClassification => {
                        let loc = self.locator.as_ref().ok_or_else(|| {
                            Error::InvalidParameter(
                                "explainer has no locator for graph classification".into(),
                            )
                        })?;
                        let g = ds.graphs.get(i).ok_or_else(|| {
                            Error::InvalidParameter(format!("graph {i} out of range"))
                        })?;
                        Some(loc.locate(&model.embeddings(g)?)?)
                    }
                };
                let ep = setup.episode(i, start)?;
                let mut rng = seed::rng_for(seed, "explain", i as u64);
                let traj = ep
                    .env
                    .rollout(&self.policy, &mut rng, mode == ExplainMode::Greedy)?;
                let nodes = traj.order.iter().map(|&v| ep.global[v]).collect();
                let g = match ds.task {
                    Task::NodeClassification => ds.graph(),
                    Task::GraphClassification => &ds.graphs[i],
                };
                Explanation::new(g, i, nodes, self.max_nodes, traj.reward)
            })
            .collect()
    }

    pub fn explain(
        &self,
        ds: &Dataset,
        model: &GnnModel,
        instance: usize,
        mode: ExplainMode,
        seed: u64,
    ) -> Result<Explanation> {
        Ok(self
            .explain_many(ds, model, &[instance], mode, seed)?
            .pop()
            .expect("one explanation per instance"))
    }

    fn tag(&self) -> String {
        format!(
            "explainer {} {} {} {} {} {}|{}",
            self.max_nodes,
            self.hops,
            u8::from(self.reward_mode == RewardMode::OneHot),
            u8::from(self.node_input == NodeInput::FeaturesAndEmbeddings),
            self.logz.as_ref().map_or(0, |m| m.params.len()),
            self.locator.as_ref().map_or(0, |l| l.mlp.params.len()),
            self.policy.tag()
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut tensors: Vec<&Mat> = self.policy.params.tensors().into_iter().collect();
        if let Some(z) = &self.logz {
            tensors.extend(z.params.iter());
        }
        if let Some(l) = &self.locator {
            tensors.extend(l.mlp.params.iter());
        }
        checkpoint::encode(&self.tag(), &tensors)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (tag, mut tensors) = checkpoint::decode(bytes)?;
        let bad = || Error::Checkpoint(format!("not an explainer checkpoint (tag `{tag}`)"));
        let (head, policy_tag) = tag.split_once('|').ok_or_else(bad)?;
        let parts: Vec<&str> = head.split(' ').collect();
        if parts.len() != 7 || parts[0] != "explainer" {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
        let (max_nodes, hops, one_hot, embed) = (
            num(parts[1])?,
            num(parts[2])?,
            num(parts[3])?,
            num(parts[4])?,
        );
        let (n_logz, n_loc) = (num(parts[5])?, num(parts[6])?);
        let n_policy = PolicyParams::NUM_TENSORS;
        if tensors.len() != n_policy + n_logz + n_loc {
            return Err(Error::Checkpoint(format!(
                "expected {} tensors, found {}",
                n_policy + n_logz + n_loc,
                tensors.len()
            )));
        }
        let loc_tensors = tensors.split_off(n_policy + n_logz);
        let logz_tensors = tensors.split_off(n_policy);
        let policy_refs: Vec<&Mat> = tensors.iter().collect();
        let policy = Policy::from_bytes(&checkpoint::encode(policy_tag, &policy_refs))?;
        Ok(Explainer {
            policy,
            logz: (n_logz > 0).then_some(Mlp {
                params: logz_tensors,
            }),
            locator: (n_loc > 0).then_some(Locator {
                mlp: Mlp {
                    params: loc_tensors,
                },
            }),
            max_nodes,
            hops,
            reward_mode: if one_hot != 0 {
                RewardMode::OneHot
            } else {
                RewardMode::Soft
            },
            node_input: if embed != 0 {
                NodeInput::FeaturesAndEmbeddings
            } else {
                NodeInput::Features
            },
        })
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
