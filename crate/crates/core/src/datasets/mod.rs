//! Benchmark datasets: seeded synthetic generators with ground-truth motif
//! masks, and a plain-text file format for loading and saving any dataset.

mod format;
mod generate;

use std::fmt;
use std::str::FromStr;

pub use format::{load_dataset, parse_dataset, save_dataset, write_dataset};
pub use generate::{gen_dataset, GenParams};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    NodeClassification,
    GraphClassification,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::NodeClassification => "node",
            Task::GraphClassification => "graph",
        }
    }
}

impl FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "node" => Ok(Task::NodeClassification),
            "graph" => Ok(Task::GraphClassification),
            other => Err(Error::InvalidParameter(format!("unknown task `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DatasetKind {
    BaShapes,
    BaCommunity,
    TreeCycles,
    TreeGrid,
    Ba2Motifs,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 5] = [
        DatasetKind::BaShapes,
        DatasetKind::BaCommunity,
        DatasetKind::TreeCycles,
        DatasetKind::TreeGrid,
        DatasetKind::Ba2Motifs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::BaShapes => "ba-shapes",
            DatasetKind::BaCommunity => "ba-community",
            DatasetKind::TreeCycles => "tree-cycles",
            DatasetKind::TreeGrid => "tree-grid",
            DatasetKind::Ba2Motifs => "ba-2motifs",
        }
    }

    pub fn task(self) -> Task {
        match self {
            DatasetKind::Ba2Motifs => Task::GraphClassification,
            _ => Task::NodeClassification,
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DatasetKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown dataset kind `{s}`")))
    }
}

/// A benchmark: one graph for node classification, many for graph
/// classification, plus the instances (node ids or graph indices) to explain.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub task: Task,
    pub num_classes: usize,
    pub graphs: Vec<Graph>,
    pub instances: Vec<usize>,
    pub split_seed: u64,
}

impl Dataset {
    /// The single graph of a node-classification dataset.
    pub fn graph(&self) -> &Graph {
        &self.graphs[0]
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_classes == 0 {
            return Err(Error::Validation("num_classes must be positive".into()));
        }
        match self.task {
            Task::NodeClassification => {
                if self.graphs.len() != 1 {
                    return Err(Error::Validation(format!(
                        "node-classification dataset needs exactly one graph, found {}",
                        self.graphs.len()
                    )));
                }
                let g = &self.graphs[0];
                if let Some(&bad) = self.instances.iter().find(|&&v| v >= g.num_nodes()) {
                    return Err(Error::Validation(format!(
                        "instance node {bad} out of range"
                    )));
                }
            }
            Task::GraphClassification => {
                if let Some(&bad) = self.instances.iter().find(|&&i| i >= self.graphs.len()) {
                    return Err(Error::Validation(format!(
                        "instance graph {bad} out of range"
                    )));
                }
            }
        }
        for (gi, g) in self.graphs.iter().enumerate() {
            if let Some(labels) = g.node_labels() {
                if let Some((v, &l)) = labels
                    .iter()
                    .enumerate()
                    .find(|(_, &l)| l >= self.num_classes)
                {
                    return Err(Error::Validation(format!(
                        "graph {gi}: node {v} has label {l} but the dataset declares {} classes",
                        self.num_classes
                    )));
                }
            }
            if let Some(l) = g.graph_label() {
                if l >= self.num_classes {
                    return Err(Error::Validation(format!(
                        "graph {gi} has label {l} but the dataset declares {} classes",
                        self.num_classes
                    )));
                }
            }
        }
        Ok(())
    }
}
