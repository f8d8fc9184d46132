//! Flow matching on an environment small enough to enumerate: a five-node
//! star explored from its hub. After training, the policy's exact terminal
//! distribution is compared with the normalized reward.
//!
//! ```text
//! cargo run --release --example toy_flow_matching
//! ```

use gflowx::explainer::exact::{
    policy_terminal_distribution, reward_distribution, total_variation,
};
use gflowx::explainer::{fit_env, Env, FitConfig, LossSpace, Objective};
use gflowx::graph::Graph;
use gflowx::policy::{Policy, PolicyConfig};
use gflowx::seed;

fn reward(_: &Graph, s: &[usize]) -> f64 {
    0.5 + s.len() as f64 / 4.0 + 0.3 * f64::from(u8::from(s.contains(&1)))
}

fn main() -> gflowx::Result<()> {
    let n = 5;
    let one_hot = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    let g = Graph::new(n, &[(0, 1), (0, 2), (0, 3), (0, 4)], one_hot)?;
    let env = Env::new(g.clone(), 0, n, reward)?;
    let target = reward_distribution(&g, 0, n, &reward)?;

    let mut rng = seed::rng_for(5, "toy", 0);
    let config = PolicyConfig {
        hidden: 32,
        alpha: 0.1,
        ..Default::default()
    };
    let mut policy = Policy::new(n, config, &mut rng)?;
    let fit = FitConfig {
        steps: 20_000,
        batch: 16,
        lr: 5e-3,
        final_lr: 5e-4,
        seed: 5,
    };
    let history = fit_env(
        &env,
        &mut policy,
        None,
        Objective::FlowMatching(LossSpace::Log),
        &fit,
    )?;
    println!(
        "loss {:.4} -> {:.5}",
        history[0],
        history[history.len() - 1]
    );

    let learned = policy_terminal_distribution(&policy, &g, 0, n)?;
    println!("{:<18} {:>8} {:>8}", "subgraph", "target", "policy");
    for (set, p) in &target {
        println!(
            "{:<18} {:>8.4} {:>8.4}",
            format!("{set:?}"),
            p,
            learned.get(set).copied().unwrap_or(0.0)
        );
    }
    println!("total variation {:.4}", total_variation(&learned, &target));
    Ok(())
}
