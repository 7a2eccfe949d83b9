//! Chainlet classification, k-chainlet extraction and the occurrence/amount
//! matrices with boundary folding.

use crate::graphs::GraphBuildError;
use crate::ledger::Ledger;
use crate::model::{OutPoint, UtxoTransaction};
use ledgergraph_core::TxId;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::AddAssign;
use thiserror::Error;

pub const DEFAULT_N: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainletError {
    #[error("matrix dimension must be at least 1")]
    InvalidDimension,
    #[error("fold target {target} exceeds current dimension {current}")]
    FoldTooLarge { current: usize, target: usize },
    #[error("k = {0} is not supported (only 1 and 2)")]
    UnsupportedK(usize),
    #[error("{0}: amounts are hidden")]
    HiddenAmount(TxId),
    #[error(transparent)]
    Graph(#[from] GraphBuildError),
}

impl ChainletError {
    pub fn code(&self) -> &'static str {
        match self {
            ChainletError::InvalidDimension => "chainlet.invalid-dimension",
            ChainletError::FoldTooLarge { .. } => "chainlet.fold-too-large",
            ChainletError::UnsupportedK(_) => "chainlet.unsupported-k",
            ChainletError::HiddenAmount(_) => "chainlet.hidden-amount",
            ChainletError::Graph(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChainletClass {
    Merge,
    Transition,
    Split,
    Coinbase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstOrderChainlet {
    pub txid: TxId,
    pub x: usize,
    pub y: usize,
    pub class: ChainletClass,
}

pub fn class_of(x: usize, y: usize) -> ChainletClass {
    use std::cmp::Ordering::*;
    if x == 0 {
        return ChainletClass::Coinbase;
    }
    match x.cmp(&y) {
        Greater => ChainletClass::Merge,
        Equal => ChainletClass::Transition,
        Less => ChainletClass::Split,
    }
}

pub fn classify_first_order(tx: &UtxoTransaction) -> FirstOrderChainlet {
    let (x, y) = (tx.inputs.len(), tx.outputs.len());
    FirstOrderChainlet {
        txid: tx.id.clone(),
        x,
        y,
        class: class_of(x, y),
    }
}

/// The per-transaction facts chainlet analysis needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotTx {
    pub id: TxId,
    pub inputs: Vec<OutPoint>,
    pub input_addresses: Vec<String>,
    pub output_addresses: Vec<String>,
    pub output_total: i128,
    pub coinbase: bool,
    pub hidden: bool,
    pub timestamp: u64,
}

impl SnapshotTx {
    pub fn x(&self) -> usize {
        self.inputs.len()
    }

    pub fn y(&self) -> usize {
        self.output_addresses.len()
    }

    /// A bare (x, y, amount) record for synthetic tests.
    pub fn shape(id: impl Into<String>, x: usize, y: usize, output_total: i128) -> Self {
        SnapshotTx {
            id: TxId::new(id),
            inputs: (0..x).map(|i| OutPoint::new("prev", i as u32)).collect(),
            input_addresses: vec![String::new(); x],
            output_addresses: vec![String::new(); y],
            output_total,
            coinbase: x == 0,
            hidden: false,
            timestamp: 0,
        }
    }
}

/// A window of transactions analysed together.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Snapshot {
    pub txs: Vec<SnapshotTx>,
}

impl Snapshot {
    pub fn from_txs(txs: Vec<SnapshotTx>) -> Self {
        Snapshot { txs }
    }

    pub fn from_ledger(ledger: &Ledger, from: u64, to: u64) -> Result<Self, ChainletError> {
        let mut txs = Vec::new();
        for block in ledger.blocks_in(from, to) {
            for tx in &block.transactions {
                txs.push(snapshot_tx(ledger, tx, block.timestamp)?);
            }
        }
        Ok(Snapshot { txs })
    }

    /// Consecutive windows of `window` blocks each, starting at the first block.
    pub fn windows(ledger: &Ledger, window: u64) -> Result<Vec<Snapshot>, ChainletError> {
        let window = window.max(1);
        let Some(first) = ledger.blocks().first().map(|b| b.height) else {
            return Ok(Vec::new());
        };
        let last = ledger.tip_height().unwrap_or(first);
        let mut out = Vec::new();
        let mut start = first;
        while start <= last {
            let end = start.saturating_add(window - 1).min(last);
            out.push(Snapshot::from_ledger(ledger, start, end)?);
            start = end + 1;
        }
        Ok(out)
    }

    /// The same window without coinbase transactions.
    pub fn spending_only(&self) -> Snapshot {
        Snapshot {
            txs: self.txs.iter().filter(|t| !t.coinbase).cloned().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.txs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.txs.is_empty()
    }
}

fn snapshot_tx(
    ledger: &Ledger,
    tx: &UtxoTransaction,
    timestamp: u64,
) -> Result<SnapshotTx, ChainletError> {
    let mut hidden = tx.outputs.iter().any(|o| !o.visible);
    let mut input_addresses = Vec::with_capacity(tx.inputs.len());
    for op in &tx.inputs {
        let out = ledger
            .output(op)
            .ok_or_else(|| GraphBuildError::MissingOutput {
                tx: tx.id.clone(),
                outpoint: op.clone(),
            })?;
        hidden |= !out.visible;
        input_addresses.push(out.address.raw().to_string());
    }
    Ok(SnapshotTx {
        id: tx.id.clone(),
        inputs: tx.inputs.clone(),
        input_addresses,
        output_addresses: tx
            .outputs
            .iter()
            .map(|o| o.address.raw().to_string())
            .collect(),
        output_total: tx.output_total(),
        coinbase: tx.coinbase,
        hidden,
        timestamp,
    })
}

/// A connected subgraph of the address/transaction graph with `k` transactions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KChainlet {
    pub k: usize,
    pub txs: Vec<TxId>,
    pub addresses: BTreeSet<String>,
    /// address -> tx and tx -> address incidences inside the chainlet
    pub edges: Vec<(String, String)>,
    /// For k = 2: (producer, consumer).
    pub direction: Option<(TxId, TxId)>,
}

fn incidences(tx: &SnapshotTx) -> Vec<(String, String)> {
    let id = tx.id.as_str();
    tx.input_addresses
        .iter()
        .map(|a| (a.clone(), id.to_string()))
        .chain(
            tx.output_addresses
                .iter()
                .map(|a| (id.to_string(), a.clone())),
        )
        .collect()
}

fn addresses(tx: &SnapshotTx) -> impl Iterator<Item = &String> {
    tx.input_addresses.iter().chain(tx.output_addresses.iter())
}

/// k = 1 yields one chainlet per transaction. k = 2 yields every unordered
/// pair in which one transaction spends an output of the other inside the
/// snapshot.
pub fn extract_k_chainlets(snapshot: &Snapshot, k: usize) -> Result<Vec<KChainlet>, ChainletError> {
    match k {
        1 => Ok(snapshot
            .txs
            .iter()
            .map(|tx| KChainlet {
                k: 1,
                txs: vec![tx.id.clone()],
                addresses: addresses(tx).cloned().collect(),
                edges: incidences(tx),
                direction: None,
            })
            .collect()),
        2 => {
            let by_id: HashMap<&TxId, &SnapshotTx> =
                snapshot.txs.iter().map(|t| (&t.id, t)).collect();
            let mut seen: HashSet<(&TxId, &TxId)> = HashSet::new();
            let mut out = Vec::new();
            for consumer in &snapshot.txs {
                for op in &consumer.inputs {
                    let Some(producer) = by_id.get(&op.txid) else {
                        continue;
                    };
                    if producer.id == consumer.id {
                        continue;
                    }
                    let key = if producer.id < consumer.id {
                        (&producer.id, &consumer.id)
                    } else {
                        (&consumer.id, &producer.id)
                    };
                    if !seen.insert(key) {
                        continue;
                    }
                    let mut edges = incidences(producer);
                    edges.extend(incidences(consumer));
                    out.push(KChainlet {
                        k: 2,
                        txs: vec![key.0.clone(), key.1.clone()],
                        addresses: addresses(producer)
                            .chain(addresses(consumer))
                            .cloned()
                            .collect(),
                        edges,
                        direction: Some((producer.id.clone(), consumer.id.clone())),
                    });
                }
            }
            Ok(out)
        }
        other => Err(ChainletError::UnsupportedK(other)),
    }
}

/// N x N matrix indexed 1..=N as in C(i, j), plus an optional coinbase row
/// (i = 0) kept apart from the core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainletMatrix<T> {
    n: usize,
    cells: Vec<T>,
    coinbase_row: Option<Vec<T>>,
}

impl<T: Copy + Default + AddAssign> ChainletMatrix<T> {
    pub fn zeros(n: usize, with_coinbase_row: bool) -> Result<Self, ChainletError> {
        if n == 0 {
            return Err(ChainletError::InvalidDimension);
        }
        Ok(ChainletMatrix {
            n,
            cells: vec![T::default(); n * n],
            coinbase_row: with_coinbase_row.then(|| vec![T::default(); n]),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry C(i, j), both 1-based and at most N.
    pub fn get(&self, i: usize, j: usize) -> T {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j),
            "index out of range"
        );
        self.cells[(i - 1) * self.n + (j - 1)]
    }

    pub fn coinbase_row(&self) -> Option<&[T]> {
        self.coinbase_row.as_deref()
    }

    /// Adds `v` at C(x, y) with both indices clamped to N. x = 0 goes to the
    /// coinbase row when present and is dropped otherwise.
    pub fn record(&mut self, x: usize, y: usize, v: T) {
        let j = y.clamp(1, self.n);
        if x == 0 {
            if let Some(row) = &mut self.coinbase_row {
                row[j - 1] += v;
            }
            return;
        }
        let i = x.min(self.n);
        self.cells[(i - 1) * self.n + (j - 1)] += v;
    }

    /// Re-aggregates into a smaller dimension.
    pub fn fold(&self, target: usize) -> Result<Self, ChainletError> {
        if target == 0 {
            return Err(ChainletError::InvalidDimension);
        }
        if target > self.n {
            return Err(ChainletError::FoldTooLarge {
                current: self.n,
                target,
            });
        }
        let mut out = Self::zeros(target, self.coinbase_row.is_some())?;
        for i in 1..=self.n {
            for j in 1..=self.n {
                out.record(i, j, self.get(i, j));
            }
        }
        if let Some(row) = &self.coinbase_row {
            for (j, v) in row.iter().enumerate() {
                out.record(0, j + 1, *v);
            }
        }
        Ok(out)
    }

    /// Core rows, 1..=N.
    pub fn rows(&self) -> Vec<Vec<T>> {
        self.cells.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    /// Core rows preceded by the coinbase row when present.
    pub fn rows_with_coinbase(&self) -> Vec<Vec<T>> {
        let mut rows = Vec::with_capacity(self.n + 1);
        if let Some(row) = &self.coinbase_row {
            rows.push(row.clone());
        }
        rows.extend(self.rows());
        rows
    }

    pub fn total(&self) -> T {
        let mut sum = T::default();
        for v in self.cells.iter().chain(self.coinbase_row.iter().flatten()) {
            sum += *v;
        }
        sum
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, ChainletError> {
        let mut m = Self::zeros(rows.len(), false)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != rows.len() {
                return Err(ChainletError::InvalidDimension);
            }
            for (j, v) in row.iter().enumerate() {
                m.record(i + 1, j + 1, *v);
            }
        }
        Ok(m)
    }
}

pub fn occurrence_matrix(
    snapshot: &Snapshot,
    n: usize,
    include_coinbase: bool,
) -> Result<ChainletMatrix<u64>, ChainletError> {
    let mut m = ChainletMatrix::zeros(n, include_coinbase)?;
    for tx in &snapshot.txs {
        m.record(tx.x(), tx.y(), 1);
    }
    Ok(m)
}

/// Sums of output amounts (satoshi) per chainlet shape.
pub fn amount_matrix(
    snapshot: &Snapshot,
    n: usize,
    include_coinbase: bool,
) -> Result<ChainletMatrix<i128>, ChainletError> {
    let mut m = ChainletMatrix::zeros(n, include_coinbase)?;
    for tx in &snapshot.txs {
        if tx.coinbase && !include_coinbase {
            continue;
        }
        if tx.hidden {
            return Err(ChainletError::HiddenAmount(tx.id.clone()));
        }
        m.record(tx.x(), tx.y(), tx.output_total);
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremePattern {
    /// Few inputs fan out to at least N outputs.
    Sell,
    /// At least N inputs collapse into few outputs.
    Buy,
    /// Both sides reach N.
    Large,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremeChainlet {
    pub txid: TxId,
    pub x: usize,
    pub y: usize,
    pub output_total: i128,
    pub pattern: ExtremePattern,
}

/// Non-coinbase transactions that land in the N-th row or column.
pub fn extreme_chainlet_report(
    snapshot: &Snapshot,
    n: usize,
) -> Result<Vec<ExtremeChainlet>, ChainletError> {
    if n == 0 {
        return Err(ChainletError::InvalidDimension);
    }
    Ok(snapshot
        .txs
        .iter()
        .filter(|t| !t.coinbase)
        .filter_map(|t| {
            let (x, y) = (t.x(), t.y());
            let pattern = match (x >= n, y >= n) {
                (false, false) => return None,
                (false, true) => ExtremePattern::Sell,
                (true, false) => ExtremePattern::Buy,
                (true, true) => ExtremePattern::Large,
            };
            Some(ExtremeChainlet {
                txid: t.id.clone(),
                x,
                y,
                output_total: t.output_total,
                pattern,
            })
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowShares {
    pub merge: f64,
    pub transition: f64,
    pub split: f64,
    pub counted: usize,
}

/// Percentages of merge/transition/split among non-coinbase transactions,
/// one entry per window. A window with no spending transactions reports zeros.
pub fn aggregate_timeseries(snapshots: &[Snapshot]) -> Vec<WindowShares> {
    snapshots
        .iter()
        .map(|s| {
            let (mut m, mut t, mut sp) = (0usize, 0usize, 0usize);
            for tx in s.txs.iter().filter(|t| !t.coinbase) {
                match class_of(tx.x(), tx.y()) {
                    ChainletClass::Merge => m += 1,
                    ChainletClass::Transition => t += 1,
                    ChainletClass::Split => sp += 1,
                    ChainletClass::Coinbase => {}
                }
            }
            let counted = m + t + sp;
            let pct = |c: usize| {
                if counted == 0 {
                    0.0
                } else {
                    100.0 * c as f64 / counted as f64
                }
            };
            WindowShares {
                merge: pct(m),
                transition: pct(t),
                split: pct(sp),
                counted,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trichotomy() {
        assert_eq!(class_of(2, 1), ChainletClass::Merge);
        assert_eq!(class_of(1, 1), ChainletClass::Transition);
        assert_eq!(class_of(1, 2), ChainletClass::Split);
        assert_eq!(class_of(0, 2), ChainletClass::Coinbase);
    }

    #[test]
    fn worked_fold_example() {
        let o = ChainletMatrix::<u64>::from_rows(&[vec![0, 2, 1], vec![1, 1, 1], vec![1, 0, 3]])
            .unwrap();
        assert_eq!(o.fold(2).unwrap().rows(), vec![vec![0, 3], vec![2, 5]]);
        let c = 1_000_000i128; // 0.01 coin
        let a = ChainletMatrix::<i128>::from_rows(&[
            vec![0, 358 * c, 50 * c],
            vec![190 * c, 175 * c, 300 * c],
            vec![280 * c, 0, 400 * c],
        ])
        .unwrap();
        assert_eq!(
            a.fold(2).unwrap().rows(),
            vec![vec![0, 408 * c], vec![470 * c, 875 * c]]
        );
    }

    #[test]
    fn empty_snapshot_zero_matrix() {
        let m = occurrence_matrix(&Snapshot::default(), 3, true).unwrap();
        assert_eq!(m.total(), 0);
        assert!(occurrence_matrix(&Snapshot::default(), 0, false).is_err());
    }

    #[test]
    fn single_transition_amount() {
        let s = Snapshot::from_txs(vec![SnapshotTx::shape("t", 1, 1, 5)]);
        let a = amount_matrix(&s, 3, false).unwrap();
        assert_eq!(a.get(1, 1), 5);
        assert_eq!(a.total(), 5);
    }

    #[test]
    fn coinbase_row_optional() {
        let s = Snapshot::from_txs(vec![
            SnapshotTx::shape("cb", 0, 2, 10),
            SnapshotTx::shape("t", 1, 2, 4),
        ]);
        let without = occurrence_matrix(&s, 3, false).unwrap();
        assert_eq!(without.total(), 1);
        assert!(without.coinbase_row().is_none());
        let with = occurrence_matrix(&s, 3, true).unwrap();
        assert_eq!(with.coinbase_row(), Some(&[0, 1, 0][..]));
        assert_eq!(with.total(), 2);
        assert_eq!(
            amount_matrix(&s, 3, true).unwrap().coinbase_row(),
            Some(&[0, 10, 0][..])
        );
    }

    #[test]
    fn extreme_patterns() {
        let s = Snapshot::from_txs(vec![
            SnapshotTx::shape("sell", 2, 25, 1),
            SnapshotTx::shape("buy", 25, 2, 1),
            SnapshotTx::shape("small", 5, 5, 1),
            SnapshotTx::shape("cb", 0, 30, 1),
        ]);
        let r = extreme_chainlet_report(&s, DEFAULT_N).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].pattern, ExtremePattern::Sell);
        assert_eq!(r[1].pattern, ExtremePattern::Buy);
    }

    #[test]
    fn timeseries_shares() {
        let mut txs: Vec<_> = (0..4)
            .map(|i| SnapshotTx::shape(format!("s{i}"), 1, 2, 1))
            .collect();
        txs.push(SnapshotTx::shape("m", 2, 1, 1));
        txs.push(SnapshotTx::shape("cb", 0, 1, 1));
        let all_t = Snapshot::from_txs(vec![SnapshotTx::shape("t", 3, 3, 1)]);
        let shares = aggregate_timeseries(&[Snapshot::from_txs(txs), all_t]);
        assert_eq!(
            (shares[0].merge, shares[0].transition, shares[0].split),
            (20.0, 0.0, 80.0)
        );
        assert_eq!(
            (shares[1].merge, shares[1].transition, shares[1].split),
            (0.0, 100.0, 0.0)
        );
    }

    #[test]
    fn k_out_of_range() {
        assert_eq!(
            extract_k_chainlets(&Snapshot::default(), 3),
            Err(ChainletError::UnsupportedK(3))
        );
        assert_eq!(
            extract_k_chainlets(&Snapshot::default(), 0),
            Err(ChainletError::UnsupportedK(0))
        );
        let one = Snapshot::from_txs(vec![SnapshotTx::shape("t", 1, 1, 1)]);
        assert!(extract_k_chainlets(&one, 2).unwrap().is_empty());
    }
}
