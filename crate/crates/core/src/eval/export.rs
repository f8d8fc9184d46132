//! Text exports: DOT drawings, CSV tables and a plain summary table.

use std::fmt::Write as _;
use std::path::Path;

use super::{instance_graph, Explanation, Metrics};
use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::graph::Graph;

const EXPLANATIONS_HEADER: &str = "# gflowx explanations v1";

/// Graphviz drawing of an explanation inside the instance's computation
/// graph. Explanation nodes are labelled with their insertion rank and
/// ground-truth motif nodes are filled.
pub fn explanation_dot(g: &Graph, e: &Explanation, context_hops: usize) -> String {
    let context: Vec<usize> = {
        let mut seen: Vec<usize> = e
            .nodes
            .iter()
            .flat_map(|&v| g.bfs_within(v, context_hops))
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen
    };
    let rank = |v: usize| e.nodes.iter().position(|&u| u == v);
    let motif = g.motif();
    let mut out = String::new();
    let _ = writeln!(out, "graph explanation_{} {{", e.instance);
    let _ = writeln!(out, "  node [shape=circle, fontsize=10];");
    for &v in &context {
        let mut attrs = Vec::new();
        match rank(v) {
            Some(r) => {
                attrs.push(format!("label=\"{v}\\n#{r}\""));
                attrs.push("penwidth=2.5".to_string());
            }
            None => attrs.push(format!("label=\"{v}\"")),
        }
        if motif.is_some_and(|m| m.nodes[v]) {
            attrs.push("style=filled, fillcolor=\"#f4a582\"".to_string());
        }
        if v == e.nodes[0] {
            attrs.push("shape=doublecircle".to_string());
        }
        let _ = writeln!(out, "  {v} [{}];", attrs.join(", "));
    }
    let inside: std::collections::HashSet<usize> = context.iter().copied().collect();
    for &(u, v) in g.edges() {
        if !(inside.contains(&u) && inside.contains(&v)) {
            continue;
        }
        let w = e.edge_weight(u, v);
        if w > 0.0 {
            let _ = writeln!(
                out,
                "  {u} -- {v} [penwidth={:.2}, color=\"#b2182b\"];",
                1.0 + 3.0 * w
            );
        } else {
            let _ = writeln!(out, "  {u} -- {v} [color=\"#bbbbbb\"];");
        }
    }
    out.push_str("}\n");
    out
}

/// CSV with header `node,insertion_rank`.
pub fn explanation_csv(e: &Explanation) -> String {
    let mut out = String::from("node,insertion_rank\n");
    for (r, v) in e.nodes.iter().enumerate() {
        let _ = writeln!(out, "{v},{r}");
    }
    out
}

/// A list of explanations as text: a header line, then one line per
/// explanation holding `instance max_nodes reward node...` with nodes in
/// insertion order. Rewards are written in shortest round-trip form.
pub fn write_explanations(es: &[Explanation]) -> String {
    let mut out = format!("{EXPLANATIONS_HEADER}\n");
    for e in es {
        let _ = write!(out, "{} {} {}", e.instance, e.max_nodes, e.reward);
        for v in &e.nodes {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

/// Inverse of [`write_explanations`]; weights are rebuilt from the
/// insertion order on the dataset's graphs.
pub fn parse_explanations(ds: &Dataset, text: &str) -> Result<Vec<Explanation>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == EXPLANATIONS_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{EXPLANATIONS_HEADER}`"),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(bad("expected `instance max_nodes reward node...`".into()));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("`{s}`: {e}")));
        let instance = int(fields[0])?;
        let max_nodes = int(fields[1])?;
        let reward: f64 = fields[2]
            .parse()
            .map_err(|e| bad(format!("`{}`: {e}", fields[2])))?;
        let nodes = fields[3..]
            .iter()
            .map(|s| int(s))
            .collect::<Result<Vec<_>>>()?;
        let probe = Explanation {
            instance,
            nodes: Vec::new(),
            edges: Vec::new(),
            edge_weights: Vec::new(),
            node_weights: Vec::new(),
            max_nodes,
            reward,
        };
        let g = instance_graph(ds, &probe).map_err(|e| bad(e.to_string()))?;
        out.push(
            Explanation::new(g, instance, nodes, max_nodes, reward)
                .map_err(|e| bad(e.to_string()))?,
        );
    }
    Ok(out)
}

pub fn save_explanations(es: &[Explanation], path: impl AsRef<Path>) -> Result<()> {
    write_text(path, &write_explanations(es))
}

pub fn load_explanations(ds: &Dataset, path: impl AsRef<Path>) -> Result<Vec<Explanation>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_explanations(ds, &text)
}

/// CSV with header `dataset,instances,auc,fidelity,sparsity,k,accuracy_topk`.
pub fn metrics_csv(rows: &[Metrics]) -> String {
    let mut out = String::from("dataset,instances,auc,fidelity,sparsity,k,accuracy_topk\n");
    for m in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            m.dataset, m.instances, m.auc, m.fidelity, m.sparsity, m.k, m.accuracy_topk
        );
    }
    out
}

/// Human-readable version of [`metrics_csv`].
pub fn metrics_table(rows: &[Metrics]) -> String {
    let mut out = format!(
        "{:<14} {:>9} {:>8} {:>9} {:>9} {:>10}\n",
        "dataset", "instances", "auc", "fidelity", "sparsity", "acc@k"
    );
    for m in rows {
        let _ = writeln!(
            out,
            "{:<14} {:>9} {:>8.4} {:>9.4} {:>9.4} {:>7.4}@{}",
            m.dataset, m.instances, m.auc, m.fidelity, m.sparsity, m.accuracy_topk, m.k
        );
    }
    out
}

pub fn write_text(path: impl AsRef<Path>, content: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}
