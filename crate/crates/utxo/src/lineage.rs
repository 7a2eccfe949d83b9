//! Backward tracing of a coin to the coinbase outputs it came from.

use crate::ledger::{Ledger, UtxoError};
use crate::model::OutPoint;
use ledgergraph_core::TxId;
use std::collections::HashMap;

/// Every distinct backward path from `target` to a coinbase output.
///
/// Each path is listed oldest first: it starts at a coinbase output and ends
/// at `target`. A coinbase output yields the single path `[target]`.
pub fn trace_lineage(ledger: &Ledger, target: &OutPoint) -> Result<Vec<Vec<OutPoint>>, UtxoError> {
    if ledger.output(target).is_none() {
        return Err(missing(target));
    }
    let mut memo: HashMap<OutPoint, Vec<Vec<OutPoint>>> = HashMap::new();
    paths_to(ledger, target, &mut memo)
}

fn missing(op: &OutPoint) -> UtxoError {
    UtxoError::MissingOutput {
        tx: TxId::new("lineage"),
        outpoint: op.clone(),
    }
}

fn paths_to(
    ledger: &Ledger,
    op: &OutPoint,
    memo: &mut HashMap<OutPoint, Vec<Vec<OutPoint>>>,
) -> Result<Vec<Vec<OutPoint>>, UtxoError> {
    if let Some(done) = memo.get(op) {
        return Ok(done.clone());
    }
    let tx = ledger.transaction(&op.txid).ok_or_else(|| missing(op))?;
    let mut paths = Vec::new();
    if tx.coinbase {
        paths.push(vec![op.clone()]);
    } else {
        for input in &tx.inputs {
            for mut p in paths_to(ledger, input, memo)? {
                p.push(op.clone());
                paths.push(p);
            }
        }
    }
    memo.insert(op.clone(), paths.clone());
    Ok(paths)
}

/// Number of lineage paths without materialising them. Saturates at `u128::MAX`.
pub fn lineage_path_count(ledger: &Ledger, target: &OutPoint) -> Result<u128, UtxoError> {
    if ledger.output(target).is_none() {
        return Err(missing(target));
    }
    // iterative post-order so deep chains do not overflow the stack
    let mut counts: HashMap<TxId, u128> = HashMap::new();
    let mut stack: Vec<(TxId, bool)> = vec![(target.txid.clone(), false)];
    while let Some((id, expanded)) = stack.pop() {
        if counts.contains_key(&id) {
            continue;
        }
        let tx = ledger.transaction(&id).ok_or_else(|| missing(target))?;
        if tx.coinbase {
            counts.insert(id, 1);
            continue;
        }
        if expanded {
            let total = tx
                .inputs
                .iter()
                .map(|i| counts[&i.txid])
                .fold(0u128, |a, b| a.saturating_add(b));
            counts.insert(id, total);
        } else {
            stack.push((id.clone(), true));
            for i in &tx.inputs {
                if !counts.contains_key(&i.txid) {
                    stack.push((i.txid.clone(), false));
                }
            }
        }
    }
    Ok(counts[&target.txid])
}
