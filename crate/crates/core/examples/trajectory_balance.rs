//! Trajectory balance with a start-conditioned partition function on the
//! same enumerable star as `toy_flow_matching`, reporting the learned
//! `log Z` against the exact log of the reward total.
//!
//! ```text
//! cargo run --release --example trajectory_balance
//! ```

use gflowx::explainer::exact::{
    policy_terminal_distribution, reward_distribution, terminal_sets, total_variation,
};
use gflowx::explainer::{fit_env, logz_head, Env, FitConfig, Objective};
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
    let total: f64 = terminal_sets(&g, 0, n).iter().map(|s| reward(&g, s)).sum();

    let mut rng = seed::rng_for(5, "toy", 0);
    let config = PolicyConfig {
        hidden: 32,
        alpha: 0.1,
        ..Default::default()
    };
    let mut policy = Policy::new(n, config, &mut rng)?;
    let mut logz = logz_head(n, &mut rng);
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
        Some(&mut logz),
        Objective::TrajectoryBalance,
        &fit,
    )?;
    println!(
        "loss {:.4} -> {:.5}",
        history[0],
        history[history.len() - 1]
    );

    let learned = policy_terminal_distribution(&policy, &g, 0, n)?;
    println!(
        "log Z learned {:.4}, exact {:.4}",
        logz.forward(g.features(0)),
        total.ln()
    );
    println!("total variation {:.4}", total_variation(&learned, &target));
    Ok(())
}
