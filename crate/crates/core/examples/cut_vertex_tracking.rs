//! Grow a subgraph node by node and watch the cut-vertex matrix change.
//!
//! At every step the tracked cut vertices are compared with a fresh
//! articulation-point computation, and the valid parent states (nodes whose
//! removal keeps the subgraph connected) are listed.
//!
//! ```text
//! cargo run --example cut_vertex_tracking
//! ```

use std::collections::BTreeSet;

use gflowx::cutvertex::static_articulation_oracle;
use gflowx::graph::Graph;
use gflowx::state::{FrontierState, SubgraphView};

fn main() -> gflowx::Result<()> {
    // A triangle 0-1-2 with a tail 2-3-4 and a square 3-5-6-4 closing it.
    let edges = [
        (0, 1),
        (1, 2),
        (2, 0),
        (2, 3),
        (3, 4),
        (3, 5),
        (5, 6),
        (6, 4),
    ];
    let g = Graph::new(7, &edges, vec![Vec::new(); 7])?;
    let order = [0, 2, 3, 4, 1, 6, 5];

    let mut state = FrontierState::new(&g, order[0])?;
    for &v in &order[1..] {
        state.add(&g, v)?;
        let tracked: BTreeSet<usize> = state.cut_vertices().into_iter().collect();
        let fresh = static_articulation_oracle(&g, state.nodes())?;
        assert_eq!(tracked, fresh);

        let parents: Vec<usize> = state.valid_parents().into_iter().map(|(u, _)| u).collect();
        println!("added {v}: nodes {:?}", state.nodes());
        println!("  cut vertices {tracked:?}, removable {parents:?}");
        for row in state.tracker().matrix() {
            println!("  {row:?}");
        }
    }
    Ok(())
}
