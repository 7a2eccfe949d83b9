//! Deterministic CSV/JSON writers for edge lists, hypergraphs and matrices.

use crate::graph::{Edge, EdgeList, Hypergraph};
use serde_json::json;
use std::fmt::Display;
use std::io::Write;
use std::str::FromStr;
use thiserror::Error;

pub const EDGE_CSV_HEADER: [&str; 5] =
    ["source", "target", "weight_num", "weight_den", "attr_json"];

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("json failure: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format {other:?}")),
        }
    }
}

fn attr_json(edge: &Edge) -> String {
    // BTreeMap serialises in key order
    serde_json::to_string(&edge.attributes).expect("string map always serialises")
}

fn weight_parts(edge: &Edge) -> (String, String) {
    match &edge.weight {
        Some(w) => (w.numer().to_string(), w.denom().to_string()),
        None => (String::new(), String::new()),
    }
}

fn sorted_rows(graph: &EdgeList) -> Vec<(&Edge, String)> {
    let mut rows: Vec<(&Edge, String)> = graph.edges().iter().map(|e| (e, attr_json(e))).collect();
    rows.sort_by(|(a, aj), (b, bj)| {
        (&a.source, &a.target, aj, a.weight).cmp(&(&b.source, &b.target, bj, b.weight))
    });
    rows
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Writes `graph` with edges sorted by (source, target, attributes, weight).
/// Two calls over equal graphs produce identical bytes.
pub fn export_edge_list<W: Write>(
    graph: &EdgeList,
    format: ExportFormat,
    out: W,
) -> Result<(), ExportError> {
    let rows = sorted_rows(graph);
    match format {
        ExportFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(EDGE_CSV_HEADER)?;
            for (edge, attrs) in rows {
                let (num, den) = weight_parts(edge);
                w.write_record([
                    edge.source.as_str(),
                    edge.target.as_str(),
                    &num,
                    &den,
                    &attrs,
                ])?;
            }
            w.flush()?;
        }
        ExportFormat::Json => {
            let edges: Vec<_> = rows
                .into_iter()
                .map(|(e, _)| {
                    let (num, den) = weight_parts(e);
                    json!({
                        "source": e.source,
                        "target": e.target,
                        "weight_num": num,
                        "weight_den": den,
                        "attributes": e.attributes,
                    })
                })
                .collect();
            let doc = json!({ "directed": graph.directed, "multi": graph.multi, "edges": edges });
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &doc)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Writes one row per hyperedge: label, `;`-joined members, per-step attributes.
pub fn export_hypergraph<W: Write>(
    graph: &Hypergraph,
    format: ExportFormat,
    out: W,
) -> Result<(), ExportError> {
    let mut edges: Vec<_> = graph.hyperedges.iter().collect();
    edges.sort_by(|a, b| (&a.label, a.members()).cmp(&(&b.label, b.members())));
    match format {
        ExportFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["label", "members", "steps_json"])?;
            for h in edges {
                let steps = serde_json::to_string(&h.step_attributes)?;
                w.write_record([h.label.as_str(), &h.members().join(";"), &steps])?;
            }
            w.flush()?;
        }
        ExportFormat::Json => {
            let doc: Vec<_> = edges
                .into_iter()
                .map(|h| json!({ "label": h.label, "members": h.members(), "steps": h.step_attributes }))
                .collect();
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &doc)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// N rows of N comma-separated integers, LF terminated. No header.
pub fn write_matrix_csv<T: Display, W: Write>(
    rows: &[Vec<T>],
    mut out: W,
) -> Result<(), ExportError> {
    for row in rows {
        let line: Vec<String> = row.iter().map(ToString::to_string).collect();
        out.write_all(line.join(",").as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
