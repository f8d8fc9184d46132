//! Incremental cut-vertex maintenance versus static recomputation.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::Rng;

use crate::cutvertex::{static_articulation_oracle, CutVertexMatrix};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;
use crate::state::frontier_of;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub trial: usize,
    pub step: usize,
    pub incremental_ns: u128,
    pub static_ns: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSummary {
    pub incremental_total_ns: u128,
    pub static_total_ns: u128,
}

impl BenchSummary {
    /// Static time over incremental time.
    pub fn speedup(&self) -> f64 {
        self.static_total_ns as f64 / self.incremental_total_ns.max(1) as f64
    }
}

/// A random spanning tree on `n` nodes plus `extra` random edges.
pub fn random_connected_graph(n: usize, extra: usize, rng: &mut impl Rng) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        edges.push((u, v));
    }
    Graph::new(n, &edges, vec![Vec::new(); n]).expect("endpoints are in range")
}

/// Grow `trials` random connected subgraphs by `n` node additions each,
/// timing the incremental tracker update against a full articulation-point
/// recomputation at every step. The two results are compared at every step
/// outside the timed regions.
pub fn bench_cutvertex(
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<(Vec<BenchRow>, BenchSummary)> {
    if n < 10 {
        return Err(Error::InvalidParameter(
            "growth length must be at least 10".into(),
        ));
    }
    let mut rows = Vec::with_capacity(n * trials);
    let mut summary = BenchSummary {
        incremental_total_ns: 0,
        static_total_ns: 0,
    };
    for trial in 0..trials {
        let mut rng = seed::rng_for(seed, "bench-cutvertex", trial as u64);
        let g = random_connected_graph(n + 1, n, &mut rng);
        let v0 = rng.random_range(0..=n);
        let mut tracker = CutVertexMatrix::singleton(v0);
        let mut order = vec![v0];
        for step in 1..=n {
            let frontier = frontier_of(&g, &order);
            let v = frontier[rng.random_range(0..frontier.len())];

            let t = Instant::now();
            let z = tracker.connectivity_vector(&g, v)?;
            tracker.update(v, &z)?;
            let incremental = tracker.cut_vertices();
            let incremental_ns = t.elapsed().as_nanos();

            order.push(v);
            let t = Instant::now();
            let fixed = static_articulation_oracle(&g, &order)?;
            let static_ns = t.elapsed().as_nanos();

            let incremental: BTreeSet<usize> = incremental.into_iter().collect();
            if incremental != fixed {
                return Err(Error::Validation(format!(
                    "trial {trial} step {step}: tracker reports {incremental:?}, recomputation {fixed:?}"
                )));
            }
            summary.incremental_total_ns += incremental_ns;
            summary.static_total_ns += static_ns;
            rows.push(BenchRow {
                trial,
                step,
                incremental_ns,
                static_ns,
            });
        }
    }
    Ok((rows, summary))
}

/// CSV with header `trial,step,incremental_ns,static_ns`.
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("trial,step,incremental_ns,static_ns\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.trial, r.step, r.incremental_ns, r.static_ns
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_per_trial() {
        let (rows, _) = bench_cutvertex(12, 2, 1).unwrap();
        assert_eq!(rows.len(), 24);
        assert!(bench_cutvertex(5, 1, 1).is_err());
    }
}
