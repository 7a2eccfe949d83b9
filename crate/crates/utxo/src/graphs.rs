//! Transaction graph, weighted address graph and the address/transaction
//! incidence graph over a block range of a finalized ledger.

use crate::ledger::Ledger;
use crate::model::{OutPoint, UtxoTransaction};
use ledgergraph_core::{Edge, EdgeList, GraphView, Rational, ToEdgeList, TxId};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Virtual source node used when coinbase transactions are drawn into the
/// address graph.
pub const COINBASE_NODE: &str = "COINBASE";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphBuildError {
    #[error("block range {from}..={to} contains no blocks")]
    EmptyRange { from: u64, to: u64 },
    #[error("{0}: amounts are hidden")]
    HiddenAmount(TxId),
    #[error("{tx}: input {outpoint} not found in ledger")]
    MissingOutput { tx: TxId, outpoint: OutPoint },
    #[error("{0}: weight arithmetic overflow")]
    Overflow(TxId),
}

impl GraphBuildError {
    pub fn code(&self) -> &'static str {
        match self {
            GraphBuildError::EmptyRange { .. } => "utxo-graph.empty-range",
            GraphBuildError::HiddenAmount(_) => "utxo-graph.hidden-amount",
            GraphBuildError::MissingOutput { .. } => "utxo-graph.missing-output",
            GraphBuildError::Overflow(_) => "utxo-graph.overflow",
        }
    }
}

fn range_txs(
    ledger: &Ledger,
    from: u64,
    to: u64,
) -> Result<Vec<&UtxoTransaction>, GraphBuildError> {
    let txs: Vec<_> = ledger
        .blocks_in(from, to)
        .flat_map(|b| b.transactions.iter())
        .collect();
    if txs.is_empty() {
        return Err(GraphBuildError::EmptyRange { from, to });
    }
    Ok(txs)
}

/// Directed graph over transactions. An edge `x -> y` means `y` spends at
/// least one output of `x`; parallel spends collapse into one edge whose
/// `spent_outputs` attribute counts them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionGraph {
    pub nodes: Vec<TxId>,
    pub edges: BTreeMap<(TxId, TxId), usize>,
}

/// Only edges with both endpoints inside the range are kept.
pub fn build_transaction_graph(
    ledger: &Ledger,
    from: u64,
    to: u64,
) -> Result<TransactionGraph, GraphBuildError> {
    let txs = range_txs(ledger, from, to)?;
    let inside: BTreeSet<&TxId> = txs.iter().map(|t| &t.id).collect();
    let mut edges = BTreeMap::new();
    for tx in &txs {
        for input in &tx.inputs {
            if inside.contains(&input.txid) {
                *edges
                    .entry((input.txid.clone(), tx.id.clone()))
                    .or_insert(0) += 1;
            }
        }
    }
    Ok(TransactionGraph {
        nodes: txs.iter().map(|t| t.id.clone()).collect(),
        edges,
    })
}

impl ToEdgeList for TransactionGraph {
    fn to_edge_list(&self) -> EdgeList {
        let mut g = EdgeList::new(true, false);
        for n in &self.nodes {
            g.add_node(n.as_str());
        }
        for ((a, b), count) in &self.edges {
            g.push(Edge::new(a.as_str(), b.as_str()).attr("spent_outputs", count))
                .expect("map keys are unique");
        }
        g
    }
}

impl GraphView for TransactionGraph {
    fn node_ids(&self) -> Vec<String> {
        self.nodes.iter().map(|n| n.0.clone()).collect()
    }

    fn edge_pairs(&self) -> Vec<(String, String)> {
        self.edges
            .keys()
            .map(|(a, b)| (a.0.clone(), b.0.clone()))
            .collect()
    }

    fn is_directed(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AddressGraphOptions {
    /// Draw coinbase outputs as edges from a virtual `COINBASE` node.
    pub coinbase_source: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddressEdge {
    pub source: String,
    pub target: String,
    /// Satoshi, exact.
    pub weight: Rational,
    pub txid: TxId,
}

/// One edge per (transaction, input, output) triple; never aggregated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AddressGraph {
    pub nodes: BTreeSet<String>,
    pub edges: Vec<AddressEdge>,
}

struct ResolvedTx<'a> {
    tx: &'a UtxoTransaction,
    inputs: Vec<(String, i128)>,
    outputs: Vec<(String, i128)>,
}

fn resolve<'a>(
    ledger: &Ledger,
    tx: &'a UtxoTransaction,
    coinbase_source: bool,
) -> Result<ResolvedTx<'a>, GraphBuildError> {
    let mut hidden = tx.outputs.iter().any(|o| !o.visible);
    let mut inputs = Vec::with_capacity(tx.inputs.len());
    for op in &tx.inputs {
        let out = ledger
            .output(op)
            .ok_or_else(|| GraphBuildError::MissingOutput {
                tx: tx.id.clone(),
                outpoint: op.clone(),
            })?;
        hidden |= !out.visible;
        inputs.push((out.address.raw().to_string(), out.value));
    }
    if hidden {
        return Err(GraphBuildError::HiddenAmount(tx.id.clone()));
    }
    if tx.coinbase && coinbase_source {
        inputs.push((COINBASE_NODE.to_string(), tx.output_total()));
    }
    let outputs = tx
        .outputs
        .iter()
        .map(|o| (o.address.raw().to_string(), o.value))
        .collect();
    Ok(ResolvedTx {
        tx,
        inputs,
        outputs,
    })
}

/// Weights follow `w(i -> j) = A(i) * A(j) / sum of output amounts`, so each
/// transaction's edge weights add up to its input total. A transaction whose
/// outputs are all zero-valued gets zero-weight edges.
pub fn build_address_graph(
    ledger: &Ledger,
    from: u64,
    to: u64,
    options: AddressGraphOptions,
) -> Result<AddressGraph, GraphBuildError> {
    let txs = range_txs(ledger, from, to)?;
    let mut graph = AddressGraph::default();
    for tx in txs {
        if tx.coinbase && !options.coinbase_source {
            continue;
        }
        let r = resolve(ledger, tx, options.coinbase_source)?;
        let out_total: i128 = r.outputs.iter().map(|(_, v)| v).sum();
        for (ia, iv) in &r.inputs {
            for (oa, ov) in &r.outputs {
                let weight = if out_total == 0 {
                    Rational::from_integer(0)
                } else {
                    let num = iv
                        .checked_mul(*ov)
                        .ok_or_else(|| GraphBuildError::Overflow(tx.id.clone()))?;
                    Rational::new(num, out_total)
                };
                graph.nodes.insert(ia.clone());
                graph.nodes.insert(oa.clone());
                graph.edges.push(AddressEdge {
                    source: ia.clone(),
                    target: oa.clone(),
                    weight,
                    txid: r.tx.id.clone(),
                });
            }
        }
    }
    Ok(graph)
}

impl ToEdgeList for AddressGraph {
    fn to_edge_list(&self) -> EdgeList {
        let mut g = EdgeList::new(true, true);
        for n in &self.nodes {
            g.add_node(n.as_str());
        }
        for e in &self.edges {
            g.push(
                Edge::new(e.source.as_str(), e.target.as_str())
                    .weighted(e.weight)
                    .attr("txid", &e.txid),
            )
            .expect("multigraph accepts every edge");
        }
        g
    }
}

impl GraphView for AddressGraph {
    fn node_ids(&self) -> Vec<String> {
        self.nodes.iter().cloned().collect()
    }

    fn edge_pairs(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|e| (e.source.clone(), e.target.clone()))
            .collect()
    }

    fn is_directed(&self) -> bool {
        true
    }
}

/// Address -> transaction and transaction -> address incidence rows, weighted
/// by the amount moved. Coinbase transactions contribute only with
/// `coinbase_source`.
pub fn build_incidence_graph(
    ledger: &Ledger,
    from: u64,
    to: u64,
    options: AddressGraphOptions,
) -> Result<EdgeList, GraphBuildError> {
    let txs = range_txs(ledger, from, to)?;
    let mut g = EdgeList::new(true, true);
    for tx in txs {
        if tx.coinbase && !options.coinbase_source {
            continue;
        }
        let r = resolve(ledger, tx, options.coinbase_source)?;
        let id = tx.id.as_str();
        for (i, (addr, v)) in r.inputs.iter().enumerate() {
            g.push(
                Edge::new(addr.as_str(), id)
                    .weighted(Rational::from_integer(*v))
                    .attr("role", "input")
                    .attr("index", i),
            )
            .expect("multigraph");
        }
        for (i, (addr, v)) in r.outputs.iter().enumerate() {
            g.push(
                Edge::new(id, addr.as_str())
                    .weighted(Rational::from_integer(*v))
                    .attr("role", "output")
                    .attr("index", i),
            )
            .expect("multigraph");
        }
    }
    Ok(g)
}
