//! The account transaction multigraph.

use crate::model::{AccountError, AccountTx};
use crate::nonce::validate_nonce_order;
use crate::trace::{CallKind, Trace};
use ledgergraph_core::{Edge, EdgeList, Rational};

/// Directed multigraph with one edge per top-level transaction, plus one edge
/// per value transfer a contract makes to a non-contract address while
/// executing a trace.
///
/// Every sender must be able to initiate and nonces must run without gaps per
/// sender; otherwise nothing is built.
pub fn build_account_graph(txs: &[AccountTx], traces: &[Trace]) -> Result<EdgeList, AccountError> {
    for tx in txs {
        tx.check()?;
    }
    validate_nonce_order(txs)?;

    let mut ordered: Vec<&AccountTx> = txs.iter().collect();
    ordered.sort_by_key(|t| (t.block_height, t.block_index));
    let mut g = EdgeList::new(true, true);
    for tx in ordered {
        g.push(
            Edge::new(tx.from.raw(), tx.to.raw())
                .weighted(Rational::from_integer(tx.amount))
                .attr("nonce", tx.nonce)
                .attr("block", tx.block_height)
                .attr("index", tx.block_index)
                .attr("timestamp", tx.timestamp)
                .attr("txid", &tx.id),
        )
        .expect("multigraph");
    }
    for trace in traces {
        for s in &trace.steps {
            if s.depth > 0
                && s.kind == CallKind::ValueTransfer
                && !s.callee_is_contract
                && s.value > 0
            {
                g.push(
                    Edge::new(s.caller.as_str(), s.callee.as_str())
                        .weighted(Rational::from_integer(s.value))
                        .attr("internal", true)
                        .attr("txid", &trace.root_tx),
                )
                .expect("multigraph");
            }
        }
    }
    Ok(g)
}

/// Balance changes implied by a set of transactions: receivers gain, senders
/// lose. Fees are not modelled.
pub fn net_flows(txs: &[AccountTx]) -> std::collections::BTreeMap<String, i128> {
    let mut net = std::collections::BTreeMap::new();
    for tx in txs {
        *net.entry(tx.from.raw().to_string()).or_insert(0) -= tx.amount;
        *net.entry(tx.to.raw().to_string()).or_insert(0) += tx.amount;
    }
    net
}
