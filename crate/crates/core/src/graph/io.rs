//! Graph file formats.
//!
//! * `json`: canonical, lossless. `{"n", "edges", "coords", "labels", "meta"}`.
//! * `dimacs`: `p edge n m` / `e u v` lines with 1-indexed vertices. Drops
//!   coordinates, labels and metadata.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Graph, GraphMeta};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    Dimacs,
}

impl GraphFormat {
    /// `.col`, `.dimacs`, `.clq` and `.txt` are DIMACS; everything else JSON.
    pub fn from_path(path: &Path) -> GraphFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("col" | "dimacs" | "clq" | "txt") => GraphFormat::Dimacs,
            _ => GraphFormat::Json,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<GraphMeta>,
}

pub fn read_graph(path: &Path, format: GraphFormat) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    match format {
        GraphFormat::Json => parse_json(&text),
        GraphFormat::Dimacs => parse_dimacs(&text),
    }
}

pub fn write_graph(path: &Path, graph: &Graph, format: GraphFormat) -> Result<()> {
    let text = match format {
        GraphFormat::Json => to_json(graph)?,
        GraphFormat::Dimacs => to_dimacs(graph),
    };
    fs::write(path, text)?;
    Ok(())
}

pub fn to_json(graph: &Graph) -> Result<String> {
    let doc = GraphDoc {
        n: graph.vertex_count(),
        edges: graph.edges().iter().map(|&(u, v)| [u, v]).collect(),
        coords: graph.coords().map(<[_]>::to_vec),
        labels: graph.labels().map(<[_]>::to_vec),
        meta: graph.meta().cloned(),
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

pub fn parse_json(text: &str) -> Result<Graph> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut graph = Graph::new(doc.n, doc.edges.into_iter().map(|[u, v]| (u, v)))?;
    if let Some(coords) = doc.coords {
        graph = graph.with_coords(coords)?;
    }
    if let Some(labels) = doc.labels {
        graph = graph.with_labels(labels)?;
    }
    if let Some(meta) = doc.meta {
        graph = graph.with_meta(meta);
    }
    Ok(graph)
}

pub fn to_dimacs(graph: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", graph.vertex_count(), graph.edge_count());
    for &(u, v) in graph.edges() {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}

/// Repeated edges (including both orientations) are merged.
pub fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut header: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let line = raw.trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            None | Some("c") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(err("duplicate problem line".into()));
                }
                let kind = tokens.next().ok_or_else(|| err("missing format".into()))?;
                if kind != "edge" && kind != "col" {
                    return Err(err(format!("unsupported format '{kind}'")));
                }
                let n = parse_count(tokens.next(), line_no)?;
                parse_count(tokens.next(), line_no)?;
                header = Some(n);
            }
            Some("e") => {
                let n = header.ok_or_else(|| err("edge before problem line".into()))?;
                let u = parse_count(tokens.next(), line_no)?;
                let v = parse_count(tokens.next(), line_no)?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(err(format!("vertex out of range 1..={n}")));
                }
                if u == v {
                    return Err(err(format!("self-loop on vertex {u}")));
                }
                edges.push(((u - 1).min(v - 1), (u - 1).max(v - 1)));
            }
            Some(other) => return Err(err(format!("unknown line type '{other}'"))),
        }
    }
    let n = header.ok_or(Error::Parse { line: 0, message: "missing problem line".into() })?;
    edges.sort_unstable();
    edges.dedup();
    Graph::new(n, edges)
}

fn parse_count(token: Option<&str>, line: usize) -> Result<usize> {
    let token = token.ok_or_else(|| Error::Parse { line, message: "missing integer".into() })?;
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected integer, found '{token}'"),
    })
}
