//! Graph serialization: GraphML, DOT and edge-CSV exports for visualization
//! tools, plus a self-describing JSON document that round-trips the graph
//! exactly.

use crate::error::{Error, Result};
use crate::graph::IsingGraph;

use serde::{Deserialize, Serialize};

/// Export encodings understood by external graph tools.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    GraphMl,
    Dot,
    EdgeCsv,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graphml" => Ok(ExportFormat::GraphMl),
            "dot" => Ok(ExportFormat::Dot),
            "edge-csv" => Ok(ExportFormat::EdgeCsv),
            other => Err(Error::InvalidConfig(format!(
                "unknown export format {other:?} (expected graphml, dot or edge-csv)"
            ))),
        }
    }
}

pub fn export_graph(graph: &IsingGraph, format: ExportFormat) -> String {
    match format {
        ExportFormat::GraphMl => to_graphml(graph),
        ExportFormat::Dot => to_dot(graph),
        ExportFormat::EdgeCsv => to_edge_csv(graph),
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn to_graphml(graph: &IsingGraph) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"d0\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"d1\" for=\"node\" attr.name=\"threshold\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"d2\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    for (j, name) in graph.names().iter().enumerate() {
        out.push_str(&format!(
            "    <node id=\"n{j}\"><data key=\"d0\">{}</data><data key=\"d1\">{}</data></node>\n",
            xml_escape(name),
            graph.threshold(j)
        ));
    }
    for (j, k, w) in graph.edges() {
        out.push_str(&format!(
            "    <edge source=\"n{j}\" target=\"n{k}\"><data key=\"d2\">{w}</data></edge>\n"
        ));
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected DOT with weight labels; positive edges green, negative red.
fn to_dot(graph: &IsingGraph) -> String {
    let mut out = String::from("graph ising {\n");
    for (j, name) in graph.names().iter().enumerate() {
        out.push_str(&format!(
            "  {} [threshold={}];\n",
            dot_quote(name),
            graph.threshold(j)
        ));
    }
    for (j, k, w) in graph.edges() {
        let color = if w > 0.0 { "green" } else { "red" };
        out.push_str(&format!(
            "  {} -- {} [label=\"{w}\", weight={w}, color={color}];\n",
            dot_quote(&graph.names()[j]),
            dot_quote(&graph.names()[k])
        ));
    }
    out.push_str("}\n");
    out
}

/// `source,target,weight` rows for each nonzero edge with j < k. LF line
/// endings, shortest round-trip float formatting.
fn to_edge_csv(graph: &IsingGraph) -> String {
    let mut out = String::from("source,target,weight\n");
    for (j, k, w) in graph.edges() {
        out.push_str(&format!("{},{},{w}\n", graph.names()[j], graph.names()[k]));
    }
    out
}

/// Reads an edge-CSV back into a full M x M weight matrix over `names`.
pub fn import_edge_csv(csv: &str, names: &[String]) -> Result<Vec<f64>> {
    let m = names.len();
    let mut weights = vec![0.0; m * m];
    let mut lines = csv.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == "source,target,weight" => {}
        _ => return Err(Error::Parse { line: 1, message: "expected edge-csv header".into() }),
    }
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let j = names
            .iter()
            .position(|n| n == fields[0])
            .ok_or_else(|| Error::UnknownAttribute(fields[0].to_string()))?;
        let k = names
            .iter()
            .position(|n| n == fields[1])
            .ok_or_else(|| Error::UnknownAttribute(fields[1].to_string()))?;
        let w: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("{:?} is not a number", fields[2]),
        })?;
        weights[j * m + k] = w;
        weights[k * m + j] = w;
    }
    Ok(weights)
}

/// On-disk JSON form of [`IsingGraph`].
#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    format: String,
    version: u32,
    gamma: f64,
    names: Vec<String>,
    thresholds: Vec<f64>,
    lambdas: Vec<f64>,
    /// Nonzero upper-triangle weights as (j, k, w) with j < k.
    edges: Vec<(usize, usize, f64)>,
}

const GRAPH_DOC_FORMAT: &str = "attrnet-graph";
const GRAPH_DOC_VERSION: u32 = 1;

pub fn write_graph_document(graph: &IsingGraph) -> String {
    let doc = GraphDoc {
        format: GRAPH_DOC_FORMAT.to_string(),
        version: GRAPH_DOC_VERSION,
        gamma: graph.gamma(),
        names: graph.names().to_vec(),
        thresholds: graph.thresholds().to_vec(),
        lambdas: graph.lambdas().to_vec(),
        edges: graph.edges(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("graph document serializes");
    text.push('\n');
    text
}

pub fn read_graph_document(text: &str) -> Result<IsingGraph> {
    let doc: GraphDoc = serde_json::from_str(text)
        .map_err(|e| Error::Format(format!("graph document: {e}")))?;
    if doc.format != GRAPH_DOC_FORMAT {
        return Err(Error::Format(format!("unexpected document format {:?}", doc.format)));
    }
    if doc.version != GRAPH_DOC_VERSION {
        return Err(Error::Format(format!("unsupported document version {}", doc.version)));
    }
    let m = doc.names.len();
    let mut weights = vec![0.0; m * m];
    for (j, k, w) in doc.edges {
        if j >= k || k >= m {
            return Err(Error::Format(format!("edge ({j}, {k}) is not upper-triangle")));
        }
        weights[j * m + k] = w;
        weights[k * m + j] = w;
    }
    IsingGraph::new(doc.names, doc.thresholds, weights, doc.gamma, doc.lambdas)
}
