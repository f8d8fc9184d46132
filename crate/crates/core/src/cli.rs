//! Command-line front end: dataset generation, target-model training,
//! explainer training, explanation, evaluation and the cut-vertex benchmark.
//!
//! Progress goes to standard error; results go to the paths given on the
//! command line. Every command is deterministic given its `--seed`,
//! whatever `--threads` is.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datasets::{gen_dataset, load_dataset, save_dataset, DatasetKind, GenParams, Task};
use crate::error::{Error, Result};
use crate::eval::{
    bench_csv, bench_cutvertex, evaluate, explanation_csv, explanation_dot, load_explanations,
    metrics_csv, metrics_table, save_explanations, write_text, AucScope,
};
use crate::explainer::{
    train_explainer_with, training_csv, ExplainMode, Explainer, LossSpace, NodeInput, Objective,
    RewardMode, TrainConfig,
};
use crate::gnn::{train_gnn, GnnConfig, GnnModel};
use crate::policy::PolicyConfig;

#[derive(Debug, Parser)]
#[command(
    name = "gflowx",
    version,
    about = "GFlowNet explanations for graph neural network predictions"
)]
pub struct Cli {
    /// Worker threads; all available cores by default.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic benchmark and write it as a dataset file.
    Gen(GenArgs),
    /// Train the target GNN on a dataset.
    TrainGnn(TrainGnnArgs),
    /// Train a GFlowNet explainer for a trained target GNN.
    TrainExplainer(TrainExplainerArgs),
    /// Generate explanations with a trained explainer.
    Explain(ExplainArgs),
    /// Score explanations against the ground-truth motifs.
    Eval(EvalArgs),
    /// Time incremental cut-vertex tracking against static recomputation.
    BenchCutvertex(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// ba-shapes, ba-community, tree-cycles, tree-grid or ba-2motifs.
    #[arg(long)]
    pub kind: DatasetKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Override the number of planted motifs per graph.
    #[arg(long)]
    pub motifs: Option<usize>,
    /// Override the number of base nodes.
    #[arg(long)]
    pub base_nodes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainGnnArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults depend on the task (node or graph classification).
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub hidden: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    /// Flow matching on log flows.
    Fm,
    /// Flow matching on raw flows.
    FmRaw,
    /// Trajectory balance with a learned, start-conditioned partition function.
    Tb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RewardArg {
    Soft,
    Onehot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NodeInputArg {
    Features,
    Embeddings,
}

#[derive(Debug, Args)]
pub struct TrainExplainerArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch training log as CSV.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub batch: u64,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub epochs: u64,
    #[arg(long, default_value_t = 1e-2)]
    pub lr: f64,
    /// Decay the learning rate geometrically to this value by the last step.
    #[arg(long)]
    pub final_lr: Option<f64>,
    #[arg(long, default_value_t = 0.85)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3)]
    pub appnp_layers: usize,
    #[arg(long, default_value_t = 64)]
    pub hidden: usize,
    #[arg(long, default_value_t = 3)]
    pub hops: usize,
    #[arg(long, default_value_t = 20)]
    pub max_nodes: usize,
    #[arg(long, default_value_t = 0.2)]
    pub locator_sample: f64,
    #[arg(long, default_value_t = 5)]
    pub locator_candidates: usize,
    /// Visit only this many shuffled instances per epoch.
    #[arg(long)]
    pub instances_per_epoch: Option<usize>,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Fm)]
    pub objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = RewardArg::Soft)]
    pub reward: RewardArg,
    #[arg(long, value_enum, default_value_t = NodeInputArg::Embeddings)]
    pub node_input: NodeInputArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Greedy,
    Sample,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub explainer: PathBuf,
    /// Explanation list, one line per instance.
    #[arg(long)]
    pub out: PathBuf,
    /// Explain only these instances (comma separated); all by default.
    #[arg(long, value_delimiter = ',')]
    pub instances: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Greedy)]
    pub mode: ModeArg,
    /// Graphviz drawing of the first explanation.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// `node,insertion_rank` CSV of the first explanation.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Context radius drawn around the explanation in `--dot`.
    #[arg(long, default_value_t = 1)]
    pub context_hops: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    /// Edges of each instance's computation graph.
    Computation,
    /// Every edge of the instance's graph.
    All,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub explanations: PathBuf,
    /// Metrics CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub hops: usize,
    /// Edges counted by the top-k accuracy.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = ScopeArg::Computation)]
    pub scope: ScopeArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Growth length of each trial.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-step timings as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Run a parsed command inside a thread pool of the requested size.
pub fn run(cli: Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n as usize);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Gen(a) => gen(a),
        Command::TrainGnn(a) => train_gnn_cmd(a),
        Command::TrainExplainer(a) => train_explainer_cmd(a),
        Command::Explain(a) => explain(a),
        Command::Eval(a) => eval(a),
        Command::BenchCutvertex(a) => bench(a),
    })
}

fn gen(a: GenArgs) -> Result<()> {
    let mut params = GenParams::defaults(a.kind);
    if let Some(m) = a.motifs {
        params.num_motifs = m;
    }
    if let Some(b) = a.base_nodes {
        params.base_nodes = b;
    }
    let ds = gen_dataset(a.kind, &params, a.seed)?;
    save_dataset(&ds, &a.out)?;
    let nodes: usize = ds.graphs.iter().map(|g| g.num_nodes()).sum();
    let edges: usize = ds.graphs.iter().map(|g| g.num_edges()).sum();
    eprintln!(
        "{}: {} graph(s), {nodes} nodes, {edges} edges, {} instances -> {}",
        ds.name,
        ds.graphs.len(),
        ds.instances.len(),
        a.out.display()
    );
    Ok(())
}

fn train_gnn_cmd(a: TrainGnnArgs) -> Result<()> {
    let ds = load_dataset(&a.data)?;
    let mut cfg = GnnConfig {
        hidden: a.hidden,
        seed: a.seed,
        ..GnnConfig::for_dataset(&ds)
    };
    if let Some(e) = a.epochs {
        cfg.epochs = e;
    }
    if let Some(lr) = a.lr {
        cfg.lr = lr;
    }
    let (model, report) = train_gnn(&ds, &cfg)?;
    model.save(&a.out)?;
    eprintln!(
        "train accuracy {:.4}, test accuracy {:.4}, loss {:.4} -> {}",
        report.train_accuracy,
        report.test_accuracy,
        report.final_loss,
        a.out.display()
    );
    if !report.converged() {
        eprintln!(
            "warning: training accuracy is below {}",
            crate::gnn::ACCURACY_FLOOR
        );
    }
    Ok(())
}

impl TrainExplainerArgs {
    pub fn config(&self) -> TrainConfig {
        TrainConfig {
            batch: self.batch as usize,
            epochs: self.epochs as usize,
            lr: self.lr,
            final_lr: self.final_lr,
            max_nodes: self.max_nodes,
            hops: self.hops,
            locator_sample: self.locator_sample,
            locator_candidates: self.locator_candidates,
            objective: match self.objective {
                ObjectiveArg::Fm => Objective::FlowMatching(LossSpace::Log),
                ObjectiveArg::FmRaw => Objective::FlowMatching(LossSpace::Raw),
                ObjectiveArg::Tb => Objective::TrajectoryBalance,
            },
            reward_mode: match self.reward {
                RewardArg::Soft => RewardMode::Soft,
                RewardArg::Onehot => RewardMode::OneHot,
            },
            node_input: match self.node_input {
                NodeInputArg::Features => NodeInput::Features,
                NodeInputArg::Embeddings => NodeInput::FeaturesAndEmbeddings,
            },
            policy: PolicyConfig {
                hidden: self.hidden,
                alpha: self.alpha,
                layers: self.appnp_layers,
                ..PolicyConfig::default()
            },
            instances_per_epoch: self.instances_per_epoch,
            seed: self.seed,
        }
    }
}

fn train_explainer_cmd(a: TrainExplainerArgs) -> Result<()> {
    let cfg = a.config();
    cfg.validate()?;
    let ds = load_dataset(&a.data)?;
    let model = GnnModel::load(&a.model)?;
    let (explainer, rows) = train_explainer_with(&ds, &model, &cfg, |r| {
        eprintln!(
            "epoch {:>3}  loss {:.5}  reward {:.4}  {} ms",
            r.epoch, r.mean_loss, r.mean_reward, r.wall_ms
        );
    })?;
    explainer.save(&a.out)?;
    if let Some(log) = &a.log {
        write_text(log, &training_csv(&rows))?;
    }
    eprintln!("explainer -> {}", a.out.display());
    Ok(())
}

fn explain(a: ExplainArgs) -> Result<()> {
    let ds = load_dataset(&a.data)?;
    let model = GnnModel::load(&a.model)?;
    let explainer = Explainer::load(&a.explainer)?;
    let instances = if a.instances.is_empty() {
        ds.instances.clone()
    } else {
        a.instances.clone()
    };
    let mode = match a.mode {
        ModeArg::Greedy => ExplainMode::Greedy,
        ModeArg::Sample => ExplainMode::Sample,
    };
    let explanations = explainer.explain_many(&ds, &model, &instances, mode, a.seed)?;
    save_explanations(&explanations, &a.out)?;
    if let Some(first) = explanations.first() {
        let g = match ds.task {
            Task::NodeClassification => ds.graph(),
            Task::GraphClassification => &ds.graphs[first.instance],
        };
        if let Some(p) = &a.dot {
            write_text(p, &explanation_dot(g, first, a.context_hops))?;
        }
        if let Some(p) = &a.csv {
            write_text(p, &explanation_csv(first))?;
        }
    }
    eprintln!(
        "{} explanation(s) -> {}",
        explanations.len(),
        a.out.display()
    );
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let ds = load_dataset(&a.data)?;
    let model = GnnModel::load(&a.model)?;
    let explanations = load_explanations(&ds, &a.explanations)?;
    let scope = match a.scope {
        ScopeArg::Computation => AucScope::ComputationGraph,
        ScopeArg::All => AucScope::AllEdges,
    };
    let m = evaluate(&ds, &model, &explanations, a.hops, a.k, scope)?;
    let rows = [m];
    write_text(&a.out, &metrics_csv(&rows))?;
    eprint!("{}", metrics_table(&rows));
    // Same formatting as the CSV so the two agree character for character.
    println!("auc {}", rows[0].auc);
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let (rows, summary) = bench_cutvertex(a.n, a.trials, a.seed)?;
    if let Some(p) = &a.out {
        write_text(p, &bench_csv(&rows))?;
    }
    println!(
        "incremental {} ns, static {} ns, speedup {:.2}x",
        summary.incremental_total_ns,
        summary.static_total_ns,
        summary.speedup()
    );
    Ok(())
}

/// Entry point of the binary: parse, run, and map failures to exit codes
/// (2 for usage errors, 1 for everything else).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
