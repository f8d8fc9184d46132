//! GFlowNet explanations for graph neural network predictions.

pub mod checkpoint;
pub mod cli;
pub mod cutvertex;
pub mod datasets;
pub mod error;
pub mod eval;
pub mod explainer;
pub mod gnn;
pub mod graph;
pub mod linalg;
pub mod mlp;
pub mod optim;
pub mod policy;
pub mod seed;
pub mod state;

pub use error::{Error, Result};
