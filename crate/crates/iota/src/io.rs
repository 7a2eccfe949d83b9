//! Tangle export: one row per transaction, and the approval graph.

use crate::error::IotaError;
use crate::sponge::Sponge;
use crate::tangle::TangleState;
use ledgergraph_core::{Edge, EdgeList};
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangleRow {
    pub tx_hash: String,
    pub epoch: u64,
    pub value: i64,
    pub bundle: String,
    pub tag: String,
    pub address: String,
    pub branch: String,
    pub trunk: String,
}

pub fn tangle_rows<S: Sponge>(state: &TangleState<S>) -> Vec<TangleRow> {
    state
        .transactions()
        .map(|t| TangleRow {
            tx_hash: t.hash.clone(),
            epoch: t.timestamp,
            value: t.value,
            bundle: t.bundle.clone(),
            tag: t.tag.clone(),
            address: t.address.clone(),
            branch: t.branch.clone(),
            trunk: t.trunk.clone(),
        })
        .collect()
}

pub fn write_tangle_csv<S: Sponge, W: Write>(
    state: &TangleState<S>,
    out: W,
) -> Result<(), IotaError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let csv_err = |e: csv::Error| IotaError::Csv(e.to_string());
    w.write_record([
        "tx_hash", "epoch", "value", "bundle", "tag", "address", "branch", "trunk",
    ])
    .map_err(csv_err)?;
    for row in tangle_rows(state) {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| IotaError::Csv(e.to_string()))
}

pub fn read_tangle_csv(text: &str) -> Result<Vec<TangleRow>, IotaError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .map(|row| row.map_err(|e| IotaError::Csv(e.to_string())))
        .collect()
}

/// Approver -> approved, one edge for trunk and one for branch. Genesis has
/// no outgoing edges.
pub fn build_tangle_graph<S: Sponge>(state: &TangleState<S>) -> EdgeList {
    let mut g = EdgeList::new(true, true);
    for t in state.transactions() {
        g.add_node(&t.hash);
        if t.hash == state.genesis() {
            continue;
        }
        for (kind, target) in [("trunk", &t.trunk), ("branch", &t.branch)] {
            g.push(
                Edge::new(t.hash.as_str(), target.as_str())
                    .attr("kind", kind)
                    .attr("value", t.value),
            )
            .expect("multigraph");
        }
    }
    g
}
