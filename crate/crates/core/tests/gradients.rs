//! Analytic gradients against central finite differences.

mod common;

use common::{gnn_fd_error, policy_fd_error, small_graph, small_policy, small_trajectories};
use gflowx::datasets::Task;
use gflowx::explainer::{flow_matching_loss, logz_head, trajectory_balance_loss, LossSpace};
use gflowx::gnn::{Batch, GnnModel};
use gflowx::graph::Graph;
use gflowx::policy::{Policy, PolicyParams};
use gflowx::seed;

#[test]
fn flow_matching_gradients() {
    let g = small_graph();
    let p = small_policy(1);
    for space in [LossSpace::Log, LossSpace::Raw] {
        for traj in small_trajectories(&g, &p) {
            let mut grads = p.params.zeros_like();
            flow_matching_loss(&p, &g, &traj, space, Some(&mut grads)).unwrap();
            let mut params = p.params.clone();
            let config = p.config;
            let f = |pp: &PolicyParams| {
                let q = Policy {
                    config,
                    params: pp.clone(),
                };
                flow_matching_loss(&q, &g, &traj, space, None).unwrap()
            };
            let err = policy_fd_error(&grads.tensors(), &mut params, &f);
            assert!(err <= 1e-4, "{space:?} relative error {err}");
        }
    }
}

#[test]
fn trajectory_balance_gradients() {
    let g = small_graph();
    let p = small_policy(2);
    let mut rng = seed::rng_for(2, "logz", 0);
    let logz = logz_head(3, &mut rng);
    for traj in small_trajectories(&g, &p) {
        let mut grads = p.params.zeros_like();
        let mut zg = logz.zeros_like();
        trajectory_balance_loss(&p, &logz, &g, &traj, Some((&mut grads, &mut zg))).unwrap();
        let mut params = p.params.clone();
        let config = p.config;
        let f = |pp: &PolicyParams| {
            let q = Policy {
                config,
                params: pp.clone(),
            };
            trajectory_balance_loss(&q, &logz, &g, &traj, None).unwrap()
        };
        let err = policy_fd_error(&grads.tensors(), &mut params, &f);
        assert!(err <= 1e-4, "policy relative error {err}");

        let h = 1e-6;
        for (t, grad) in zg.iter().enumerate() {
            for (j, &an) in grad.data().iter().enumerate() {
                let mut plus = logz.clone();
                plus.params[t].data_mut()[j] += h;
                let mut minus = logz.clone();
                minus.params[t].data_mut()[j] -= h;
                let fp = trajectory_balance_loss(&p, &plus, &g, &traj, None).unwrap();
                let fm = trajectory_balance_loss(&p, &minus, &g, &traj, None).unwrap();
                let fd = (fp - fm) / (2.0 * h);
                assert!(
                    (fd - an).abs() <= 1e-4 * fd.abs().max(an.abs()).max(1e-3),
                    "logZ {t}/{j}: {fd} vs {an}"
                );
            }
        }
    }
}

#[test]
fn target_model_gradients() {
    let g = small_graph();
    let h = Graph::new(
        3,
        &[(0, 1), (1, 2)],
        (0..3).map(|i| vec![-0.5, 0.7 * i as f64, 0.2]).collect(),
    )
    .unwrap();
    let node = GnnModel::new(Task::NodeClassification, 3, 4, 3, 5);
    let batch = Batch::Nodes {
        graph: &g,
        nodes: &[0, 2, 4, 7],
        labels: &[0, 1, 2, 1],
    };
    let err = gnn_fd_error(&node, &batch);
    assert!(err <= 1e-4, "node task relative error {err}");

    let graph = GnnModel::new(Task::GraphClassification, 3, 4, 2, 6);
    let batch = Batch::Graphs {
        graphs: vec![&g, &h],
        labels: vec![1, 0],
    };
    let err = gnn_fd_error(&graph, &batch);
    assert!(err <= 1e-4, "graph task relative error {err}");
}
