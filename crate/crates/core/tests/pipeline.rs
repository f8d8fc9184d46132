//! Round trips and determinism of the library pipeline on small instances.

use gflowx::datasets::{
    gen_dataset, parse_dataset, write_dataset, Dataset, DatasetKind, GenParams,
};
use gflowx::eval::{
    evaluate, metrics_csv, parse_explanations, write_explanations, AucScope, Explanation,
};
use gflowx::explainer::{
    train_explainer, ExplainMode, Explainer, LossSpace, Objective, TrainConfig,
};
use gflowx::gnn::{train_gnn, GnnConfig, GnnModel};

fn small(kind: DatasetKind, seed: u64) -> Dataset {
    let mut params = GenParams::defaults(kind);
    match kind {
        DatasetKind::Ba2Motifs => params.num_graphs = 40,
        _ => {
            params.base_nodes = params.base_nodes.min(63);
            params.num_motifs = 6;
        }
    }
    gen_dataset(kind, &params, seed).unwrap()
}

fn model(ds: &Dataset, epochs: usize) -> GnnModel {
    let cfg = GnnConfig {
        epochs,
        seed: 1,
        ..GnnConfig::for_dataset(ds)
    };
    train_gnn(ds, &cfg).unwrap().0
}

fn quick(seed: u64) -> TrainConfig {
    TrainConfig {
        epochs: 2,
        batch: 4,
        lr: 3e-3,
        instances_per_epoch: Some(12),
        seed,
        ..Default::default()
    }
}

#[test]
fn datasets_round_trip_through_text() {
    for kind in DatasetKind::ALL {
        let ds = small(kind, 4);
        ds.validate().unwrap();
        let text = write_dataset(&ds);
        assert_eq!(parse_dataset(&text).unwrap(), ds, "{kind}");
        assert_eq!(
            write_dataset(&parse_dataset(&text).unwrap()),
            text,
            "{kind}"
        );
    }
}

#[test]
fn generation_is_a_function_of_the_seed() {
    let kind = DatasetKind::TreeCycles;
    assert_eq!(small(kind, 9), small(kind, 9));
    assert_ne!(small(kind, 9), small(kind, 10));
}

#[test]
fn explainer_checkpoint_round_trips() {
    let ds = small(DatasetKind::BaShapes, 2);
    let gnn = model(&ds, 100);
    for objective in [
        Objective::FlowMatching(LossSpace::Log),
        Objective::TrajectoryBalance,
    ] {
        let (ex, _) = train_explainer(
            &ds,
            &gnn,
            &TrainConfig {
                objective,
                ..quick(2)
            },
        )
        .unwrap();
        let back = Explainer::from_bytes(&ex.to_bytes()).unwrap();
        assert_eq!(back, ex);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ex.bin");
        ex.save(&path).unwrap();
        assert_eq!(Explainer::load(&path).unwrap(), ex);
    }
}

#[test]
fn explanations_round_trip_through_text() {
    let ds = small(DatasetKind::BaShapes, 3);
    let gnn = model(&ds, 100);
    let (ex, _) = train_explainer(&ds, &gnn, &quick(3)).unwrap();
    let es: Vec<Explanation> = ex
        .explain_many(&ds, &gnn, &ds.instances, ExplainMode::Sample, 3)
        .unwrap();
    let text = write_explanations(&es);
    assert_eq!(parse_explanations(&ds, &text).unwrap(), es);
    assert!(parse_explanations(&ds, "not a header\n").is_err());
}

fn run_with_threads(
    threads: usize,
    ds: &Dataset,
    gnn: &GnnModel,
) -> (Vec<(usize, f64, f64)>, String) {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap();
    pool.install(|| {
        let (ex, rows) = train_explainer(ds, gnn, &quick(5)).unwrap();
        let es = ex
            .explain_many(ds, gnn, &ds.instances, ExplainMode::Sample, 5)
            .unwrap();
        let m = evaluate(ds, gnn, &es, 3, 5, AucScope::ComputationGraph).unwrap();
        let rows = rows
            .iter()
            .map(|r| (r.epoch, r.mean_loss, r.mean_reward))
            .collect();
        (rows, metrics_csv(&[m]))
    })
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let ds = small(DatasetKind::TreeCycles, 5);
    let gnn = model(&ds, 100);
    assert_eq!(
        run_with_threads(1, &ds, &gnn),
        run_with_threads(3, &ds, &gnn)
    );
}

#[test]
fn graph_task_uses_the_locator() {
    let ds = small(DatasetKind::Ba2Motifs, 6);
    let gnn = model(&ds, 30);
    let (ex, rows) = train_explainer(&ds, &gnn, &quick(6)).unwrap();
    assert!(ex.locator.is_some());
    assert_eq!(rows.len(), 2);
    let es = ex
        .explain_many(&ds, &gnn, &ds.instances[..5], ExplainMode::Greedy, 6)
        .unwrap();
    for e in &es {
        assert!(e.nodes.len() <= ex.max_nodes);
        assert!(ds.graphs[e.instance].is_connected_subset(&e.nodes));
    }
}
