//! Train the three-layer GCN that later gets explained, then check that a
//! saved checkpoint reproduces its predictions exactly.
//!
//! ```text
//! cargo run --release --example train_target_gnn -- [kind] [seed]
//! ```

use gflowx::datasets::{gen_dataset, DatasetKind, GenParams};
use gflowx::gnn::{train_gnn, GnnConfig, GnnModel};

fn main() -> gflowx::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind: DatasetKind = args.next().as_deref().unwrap_or("ba-shapes").parse()?;
    let seed: u64 = args
        .next()
        .map_or(1, |s| s.parse().expect("seed must be an integer"));

    let ds = gen_dataset(kind, &GenParams::defaults(kind), seed)?;
    let cfg = GnnConfig {
        seed,
        ..GnnConfig::for_dataset(&ds)
    };
    println!("{kind}: {} epochs at lr {}", cfg.epochs, cfg.lr);
    let (model, report) = train_gnn(&ds, &cfg)?;
    println!(
        "train accuracy {:.4}, test accuracy {:.4}, loss {:.4}",
        report.train_accuracy, report.test_accuracy, report.final_loss
    );

    let path = std::env::temp_dir().join(format!("gflowx-{kind}-gnn.bin"));
    model.save(&path)?;
    let back = GnnModel::load(&path)?;
    let g = &ds.graphs[0];
    match ds.task {
        gflowx::datasets::Task::NodeClassification => {
            assert_eq!(back.predict_nodes(g)?, model.predict_nodes(g)?)
        }
        gflowx::datasets::Task::GraphClassification => {
            assert_eq!(back.predict_graph(g)?, model.predict_graph(g)?)
        }
    }
    println!("checkpoint {} reloads bit-exactly", path.display());
    Ok(())
}
