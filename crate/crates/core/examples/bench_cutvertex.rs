//! Accumulated time of incremental cut-vertex tracking against recomputing
//! articulation points from scratch after every added node.
//!
//! ```text
//! cargo run --release --example bench_cutvertex -- [growth_length] [trials]
//! ```

use gflowx::eval::bench_cutvertex;

fn main() -> gflowx::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(200, |s| {
        s.parse().expect("growth length must be an integer")
    });
    let trials: usize = args
        .next()
        .map_or(5, |s| s.parse().expect("trials must be an integer"));
    let (rows, summary) = bench_cutvertex(n, trials, 0)?;

    println!("{:>6} {:>16} {:>16}", "step", "incremental_us", "static_us");
    let mut acc = (0u128, 0u128);
    for step in 1..=n {
        for r in rows.iter().filter(|r| r.step == step) {
            acc.0 += r.incremental_ns;
            acc.1 += r.static_ns;
        }
        if step % (n / 10).max(1) == 0 {
            println!("{step:>6} {:>16} {:>16}", acc.0 / 1000, acc.1 / 1000);
        }
    }
    println!("static / incremental: {:.2}", summary.speedup());
    Ok(())
}
