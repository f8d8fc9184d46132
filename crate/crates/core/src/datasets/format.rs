//! Line-oriented text format for datasets.
//!
//! ```text
//! gflowx-dataset 1
//! name ba-shapes
//! task node
//! num_classes 4
//! split_seed 1234
//! instances 3
//! 300 301 302
//! num_graphs 1
//! graph 0
//! num_nodes 3
//! directed false
//! graph_label none
//! feature_dim 2
//! edges 2
//! 0 1
//! 1 2
//! features
//! 1 1
//! 1 1
//! 1 1
//! node_labels 0 1 1
//! motif_nodes 0 1 1
//! motif_edges 1
//! 1 2
//! end
//! ```
//!
//! `node_labels none` and `motif none` mark absent fields. Reals use the
//! shortest representation that parses back to the same `f64`, so
//! save → load → save is byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Dataset, Task};
use crate::error::{Error, Result};
use crate::graph::Graph;

const MAGIC: &str = "gflowx-dataset 1";

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Serialize a dataset to the text format.
pub fn write_dataset(ds: &Dataset) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "{MAGIC}");
    let _ = writeln!(w, "name {}", ds.name);
    let _ = writeln!(w, "task {}", ds.task.as_str());
    let _ = writeln!(w, "num_classes {}", ds.num_classes);
    let _ = writeln!(w, "split_seed {}", ds.split_seed);
    let _ = writeln!(w, "instances {}", ds.instances.len());
    let _ = writeln!(w, "{}", join(&ds.instances));
    let _ = writeln!(w, "num_graphs {}", ds.graphs.len());
    for (gi, g) in ds.graphs.iter().enumerate() {
        let _ = writeln!(w, "graph {gi}");
        let _ = writeln!(w, "num_nodes {}", g.num_nodes());
        let _ = writeln!(w, "directed false");
        match g.graph_label() {
            Some(l) => {
                let _ = writeln!(w, "graph_label {l}");
            }
            None => {
                let _ = writeln!(w, "graph_label none");
            }
        }
        let _ = writeln!(w, "feature_dim {}", g.feature_dim());
        let _ = writeln!(w, "edges {}", g.num_edges());
        for &(u, v) in g.edges() {
            let _ = writeln!(w, "{u} {v}");
        }
        let _ = writeln!(w, "features");
        for v in 0..g.num_nodes() {
            let _ = writeln!(w, "{}", join(g.features(v)));
        }
        match g.node_labels() {
            Some(labels) => {
                let _ = writeln!(w, "node_labels {}", join(labels));
            }
            None => {
                let _ = writeln!(w, "node_labels none");
            }
        }
        match g.motif() {
            Some(m) => {
                let _ = writeln!(
                    w,
                    "motif_nodes {}",
                    join(m.nodes.iter().map(|&b| u8::from(b)))
                );
                let flagged: Vec<_> = g
                    .edges()
                    .iter()
                    .zip(&m.edges)
                    .filter(|(_, &f)| f)
                    .map(|(e, _)| *e)
                    .collect();
                let _ = writeln!(w, "motif_edges {}", flagged.len());
                for (u, v) in flagged {
                    let _ = writeln!(w, "{u} {v}");
                }
            }
            None => {
                let _ = writeln!(w, "motif none");
            }
        }
        let _ = writeln!(w, "end");
    }
    out
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_dataset(ds)).map_err(|e| Error::io(path, e))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text)
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn line_no(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line_no(),
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        match self.lines.get(self.pos) {
            Some(l) => {
                self.pos += 1;
                Ok(l)
            }
            None => Err(self.err(format!("unexpected end of file, expected {what}"))),
        }
    }

    /// Read `key value...` and return the value part.
    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next(&format!("field `{key}`"))?;
        let rest = line
            .strip_prefix(key)
            .filter(|r| r.is_empty() || r.starts_with(' '))
            .ok_or_else(|| self.prev_err(format!("expected field `{key}`, found `{line}`")))?;
        Ok(rest.trim_start())
    }

    fn prev_err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.pos,
            message: message.into(),
        }
    }

    fn num<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T> {
        s.parse()
            .map_err(|_| self.prev_err(format!("invalid {what} `{s}`")))
    }

    fn num_field<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.field(key)?;
        self.num(v, key)
    }

    fn list<T: std::str::FromStr>(&self, s: &str, expected: usize, what: &str) -> Result<Vec<T>> {
        let items: Vec<T> = s
            .split_whitespace()
            .map(|t| self.num(t, what))
            .collect::<Result<_>>()?;
        if items.len() != expected {
            return Err(self.prev_err(format!(
                "{what}: expected {expected} values, found {}",
                items.len()
            )));
        }
        Ok(items)
    }

    fn edge_lines(&mut self, count: usize, what: &str) -> Result<Vec<(usize, usize)>> {
        (0..count)
            .map(|_| {
                let l = self.next(what)?;
                let p: Vec<usize> = self.list(l, 2, what)?;
                Ok((p[0], p[1]))
            })
            .collect()
    }
}

/// Parse the text format. Errors carry the 1-based line number.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut r = Lines {
        lines: text.lines().collect(),
        pos: 0,
    };
    let magic = r.next("header")?;
    if magic != MAGIC {
        return Err(r.prev_err(format!("expected header `{MAGIC}`")));
    }
    let name = r.field("name")?.to_string();
    let task: Task = {
        let t = r.field("task")?;
        t.parse()
            .map_err(|_| r.prev_err(format!("invalid task `{t}`")))?
    };
    let num_classes: usize = r.num_field("num_classes")?;
    let split_seed: u64 = r.num_field("split_seed")?;
    let num_instances: usize = r.num_field("instances")?;
    let inst_line = r.next("instance list")?;
    let instances = r.list(inst_line, num_instances, "instances")?;
    let num_graphs: usize = r.num_field("num_graphs")?;
    let mut graphs = Vec::with_capacity(num_graphs);
    for gi in 0..num_graphs {
        let idx: usize = r.num_field("graph")?;
        if idx != gi {
            return Err(r.prev_err(format!("expected graph {gi}, found graph {idx}")));
        }
        graphs.push(parse_graph(&mut r)?);
    }
    let ds = Dataset {
        name,
        task,
        num_classes,
        graphs,
        instances,
        split_seed,
    };
    ds.validate()?;
    Ok(ds)
}

fn parse_graph(r: &mut Lines<'_>) -> Result<Graph> {
    let n: usize = r.num_field("num_nodes")?;
    if r.field("directed")? != "false" {
        return Err(r.prev_err("only undirected graphs are supported"));
    }
    let graph_label = match r.field("graph_label")? {
        "none" => None,
        s => Some(r.num::<usize>(s, "graph_label")?),
    };
    let dim: usize = r.num_field("feature_dim")?;
    let m: usize = r.num_field("edges")?;
    let edges = r.edge_lines(m, "edge")?;
    r.field("features")?;
    let mut features = Vec::with_capacity(n * dim);
    for _ in 0..n {
        let l = r.next("feature row")?;
        features.extend(r.list::<f64>(l, dim, "feature row")?);
    }
    let labels_field = r.field("node_labels")?;
    let node_labels = match labels_field {
        "none" => None,
        s => Some(r.list::<usize>(s, n, "node_labels")?),
    };
    let line = r.next("field `motif_nodes` or `motif none`")?;
    let motif = if line == "motif none" {
        None
    } else if let Some(rest) = line.strip_prefix("motif_nodes") {
        let flags: Vec<u8> = r.list(rest, n, "motif_nodes")?;
        let nodes = flags.iter().map(|&f| f != 0).collect();
        let k: usize = r.num_field("motif_edges")?;
        let medges = r.edge_lines(k, "motif edge")?;
        Some((nodes, medges))
    } else {
        return Err(r.prev_err(format!("expected field `motif_nodes`, found `{line}`")));
    };
    let end = r.next("field `end`")?;
    if end != "end" {
        return Err(r.prev_err(format!("expected `end`, found `{end}`")));
    }

    let at = r.pos;
    let wrap = |e: Error| match e {
        Error::Parse { .. } => e,
        other => Error::Parse {
            line: at,
            message: other.to_string(),
        },
    };
    let mut g = Graph::from_flat(n, &edges, dim, features).map_err(wrap)?;
    if let Some(l) = node_labels {
        g = g.with_node_labels(l).map_err(wrap)?;
    }
    if let Some(l) = graph_label {
        g = g.with_graph_label(l);
    }
    if let Some((nodes, medges)) = motif {
        g = g.with_motif(nodes, &medges).map_err(wrap)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Dataset {
        let g = Graph::new(
            3,
            &[(0, 1), (1, 2)],
            vec![vec![0.1, 1.0], vec![-2.5, 3.0], vec![1e-7, 0.0]],
        )
        .unwrap()
        .with_node_labels(vec![0, 1, 1])
        .unwrap()
        .with_motif(vec![false, true, true], &[(1, 2)])
        .unwrap();
        Dataset {
            name: "tiny".into(),
            task: Task::NodeClassification,
            num_classes: 2,
            graphs: vec![g],
            instances: vec![1, 2],
            split_seed: 7,
        }
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let ds = tiny();
        let text = write_dataset(&ds);
        let back = parse_dataset(&text).unwrap();
        assert_eq!(back, ds);
        assert_eq!(write_dataset(&back), text);
    }

    #[test]
    fn truncation_names_missing_field() {
        let text = write_dataset(&tiny());
        let cut: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        let err = parse_dataset(&cut).unwrap_err().to_string();
        assert!(err.contains("instances"), "{err}");
    }

    #[test]
    fn label_outside_class_count_fails_validation() {
        let text = write_dataset(&tiny()).replace("num_classes 2", "num_classes 1");
        assert!(matches!(parse_dataset(&text), Err(Error::Validation(_))));
    }
}
