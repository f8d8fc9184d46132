//! Generate every synthetic benchmark, print its size and write it to disk.
//!
//! ```text
//! cargo run --release --example generate_datasets -- [out_dir] [seed]
//! ```

use std::path::PathBuf;

use gflowx::datasets::{gen_dataset, load_dataset, save_dataset, DatasetKind, GenParams};

fn main() -> gflowx::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(
        args.next()
            .unwrap_or_else(|| std::env::temp_dir().display().to_string()),
    );
    let seed: u64 = args
        .next()
        .map_or(0, |s| s.parse().expect("seed must be an integer"));

    for kind in DatasetKind::ALL {
        let ds = gen_dataset(kind, &GenParams::defaults(kind), seed)?;
        let nodes: usize = ds.graphs.iter().map(|g| g.num_nodes()).sum();
        let edges: usize = ds.graphs.iter().map(|g| g.num_edges()).sum();
        let path = out.join(format!("{kind}.txt"));
        save_dataset(&ds, &path)?;
        assert_eq!(load_dataset(&path)?, ds);
        println!(
            "{:<13} {:>5} graphs {:>7} nodes {:>7} edges {:>2} classes {:>5} instances -> {}",
            kind.name(),
            ds.graphs.len(),
            nodes,
            edges,
            ds.num_classes,
            ds.instances.len(),
            path.display()
        );
    }
    Ok(())
}
