//! UTXO set maintenance and block validation.

use crate::model::{Block, OutPoint, ShieldKind, TxOut, UtxoTransaction};
use ledgergraph_core::TxId;
use std::collections::{HashMap, HashSet};
use thiserror::Error;

pub const RING_SIZE: usize = 11;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UtxoError {
    #[error("{tx}: input {outpoint} does not exist")]
    MissingOutput { tx: TxId, outpoint: OutPoint },
    #[error("{tx}: input {outpoint} was already spent by {spent_by}")]
    DoubleSpend {
        tx: TxId,
        outpoint: OutPoint,
        spent_by: TxId,
    },
    #[error("{tx}: outputs {outputs} exceed inputs {inputs}")]
    Overspend {
        tx: TxId,
        inputs: i128,
        outputs: i128,
    },
    #[error("{tx}: coinbase claims {claimed}, cap is {cap}")]
    ExcessiveReward { tx: TxId, claimed: i128, cap: i128 },
    #[error("{0}: spending transaction has no inputs")]
    NoInputs(TxId),
    #[error("{0}: transaction has no outputs")]
    NoOutputs(TxId),
    #[error("{tx}: input {outpoint} referenced twice")]
    DuplicateInput { tx: TxId, outpoint: OutPoint },
    #[error("{0}: coinbase transaction has inputs")]
    CoinbaseWithInputs(TxId),
    #[error("{0}: expected a coinbase transaction")]
    NotCoinbase(TxId),
    #[error("{0}: coinbase transaction outside block position 0")]
    MisplacedCoinbase(TxId),
    #[error("block {0} has no coinbase at position 0")]
    MissingCoinbase(u64),
    #[error("{tx}: output {index} has negative value")]
    NegativeOutput { tx: TxId, index: usize },
    #[error("transaction id {0} already used")]
    DuplicateTxId(TxId),
    #[error("block height {got}, expected {expected}")]
    HeightMismatch { expected: u64, got: u64 },
    #[error("{tx}: ring {ring} is malformed ({reason})")]
    BadRing {
        tx: TxId,
        ring: usize,
        reason: String,
    },
    #[error("{0}: shield kinds do not match input/output counts")]
    ShieldKindsMismatch(TxId),
    #[error("{0}: coinbase rewards must go to shielded outputs")]
    CoinbaseNotShielded(TxId),
    #[error("{0}: amount arithmetic overflow")]
    Overflow(TxId),
}

impl UtxoError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            UtxoError::MissingOutput { .. } => "utxo.missing-output",
            UtxoError::DoubleSpend { .. } => "utxo.double-spend",
            UtxoError::Overspend { .. } => "utxo.overspend",
            UtxoError::ExcessiveReward { .. } => "utxo.excessive-reward",
            UtxoError::NoInputs(_) => "utxo.no-inputs",
            UtxoError::NoOutputs(_) => "utxo.no-outputs",
            UtxoError::DuplicateInput { .. } => "utxo.duplicate-input",
            UtxoError::CoinbaseWithInputs(_) => "utxo.coinbase-with-inputs",
            UtxoError::NotCoinbase(_) => "utxo.not-coinbase",
            UtxoError::MisplacedCoinbase(_) => "utxo.misplaced-coinbase",
            UtxoError::MissingCoinbase(_) => "utxo.missing-coinbase",
            UtxoError::NegativeOutput { .. } => "utxo.negative-output",
            UtxoError::DuplicateTxId(_) => "utxo.duplicate-txid",
            UtxoError::HeightMismatch { .. } => "utxo.height-mismatch",
            UtxoError::BadRing { .. } => "utxo.bad-ring",
            UtxoError::ShieldKindsMismatch(_) => "utxo.shield-kinds-mismatch",
            UtxoError::CoinbaseNotShielded(_) => "utxo.coinbase-not-shielded",
            UtxoError::Overflow(_) => "utxo.overflow",
        }
    }
}

/// Block subsidy as a function of height, in satoshi.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsidySchedule {
    Constant(i128),
    Halving { initial: i128, interval: u64 },
}

impl SubsidySchedule {
    /// 50 BTC halving every 210,000 blocks.
    pub fn bitcoin() -> Self {
        SubsidySchedule::Halving {
            initial: 5_000_000_000,
            interval: 210_000,
        }
    }

    pub fn at(&self, height: u64) -> i128 {
        match *self {
            SubsidySchedule::Constant(v) => v,
            SubsidySchedule::Halving { initial, interval } => {
                let halvings = height / interval.max(1);
                if halvings >= 127 {
                    0
                } else {
                    initial >> halvings
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerConfig {
    pub subsidy: SubsidySchedule,
    /// Zcash rule that coinbase rewards go to shielded outputs. Off by default.
    pub require_shielded_coinbase: bool,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        LedgerConfig {
            subsidy: SubsidySchedule::bitcoin(),
            require_shielded_coinbase: false,
        }
    }
}

/// Read access to the spendable set, as seen by a transaction being validated.
pub trait UtxoView {
    fn unspent(&self, outpoint: &OutPoint) -> Option<&TxOut>;
    fn spent_by(&self, outpoint: &OutPoint) -> Option<&TxId>;
    /// Any output ever created, spent or not. Used for ring decoys.
    fn exists(&self, outpoint: &OutPoint) -> bool;
}

/// Checks a spending transaction and returns its fee in satoshi.
pub fn validate_transaction(tx: &UtxoTransaction, view: &impl UtxoView) -> Result<i128, UtxoError> {
    if tx.coinbase {
        return Err(UtxoError::MisplacedCoinbase(tx.id.clone()));
    }
    if tx.inputs.is_empty() {
        return Err(UtxoError::NoInputs(tx.id.clone()));
    }
    check_outputs(tx)?;
    let mut seen = HashSet::with_capacity(tx.inputs.len());
    let mut total_in: i128 = 0;
    for op in &tx.inputs {
        if !seen.insert(op) {
            return Err(UtxoError::DuplicateInput {
                tx: tx.id.clone(),
                outpoint: op.clone(),
            });
        }
        let out = match view.unspent(op) {
            Some(out) => out,
            None => {
                return Err(match view.spent_by(op) {
                    Some(by) => UtxoError::DoubleSpend {
                        tx: tx.id.clone(),
                        outpoint: op.clone(),
                        spent_by: by.clone(),
                    },
                    None => UtxoError::MissingOutput {
                        tx: tx.id.clone(),
                        outpoint: op.clone(),
                    },
                })
            }
        };
        total_in = total_in
            .checked_add(out.value)
            .ok_or_else(|| UtxoError::Overflow(tx.id.clone()))?;
    }
    let total_out = checked_output_total(tx)?;
    if total_out > total_in {
        return Err(UtxoError::Overspend {
            tx: tx.id.clone(),
            inputs: total_in,
            outputs: total_out,
        });
    }
    if let Some(rings) = &tx.ring_inputs {
        check_rings(tx, rings, view)?;
    }
    if let Some(kinds) = &tx.shield_kinds {
        if kinds.inputs.len() != tx.inputs.len() || kinds.outputs.len() != tx.outputs.len() {
            return Err(UtxoError::ShieldKindsMismatch(tx.id.clone()));
        }
    }
    Ok(total_in - total_out)
}

fn check_outputs(tx: &UtxoTransaction) -> Result<(), UtxoError> {
    if tx.outputs.is_empty() {
        return Err(UtxoError::NoOutputs(tx.id.clone()));
    }
    if let Some(index) = tx.outputs.iter().position(|o| o.value < 0) {
        return Err(UtxoError::NegativeOutput {
            tx: tx.id.clone(),
            index,
        });
    }
    Ok(())
}

fn checked_output_total(tx: &UtxoTransaction) -> Result<i128, UtxoError> {
    tx.outputs
        .iter()
        .try_fold(0i128, |acc, o| acc.checked_add(o.value))
        .ok_or_else(|| UtxoError::Overflow(tx.id.clone()))
}

fn check_rings(
    tx: &UtxoTransaction,
    rings: &[crate::model::RingInput],
    view: &impl UtxoView,
) -> Result<(), UtxoError> {
    let bad = |ring: usize, reason: &str| UtxoError::BadRing {
        tx: tx.id.clone(),
        ring,
        reason: reason.to_string(),
    };
    if rings.len() != tx.inputs.len() {
        return Err(bad(0, "ring count differs from input count"));
    }
    for (i, (ring, real)) in rings.iter().zip(&tx.inputs).enumerate() {
        if ring.members.len() != RING_SIZE {
            return Err(bad(i, "ring must have 11 members"));
        }
        let distinct: HashSet<_> = ring.members.iter().collect();
        if distinct.len() != RING_SIZE {
            return Err(bad(i, "ring members repeat"));
        }
        if !distinct.contains(real) {
            return Err(bad(i, "ring does not contain the spent output"));
        }
        if ring.members.iter().any(|m| !view.exists(m)) {
            return Err(bad(i, "ring references an unknown output"));
        }
    }
    Ok(())
}

/// Result of checking a coinbase against its cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoinbaseClaim {
    pub claimed: i128,
    /// Cap minus claim. Coins the miner could have taken but did not.
    pub destroyed: i128,
}

pub fn validate_coinbase(
    tx: &UtxoTransaction,
    fee_sum: i128,
    subsidy: i128,
) -> Result<CoinbaseClaim, UtxoError> {
    if !tx.coinbase {
        return Err(UtxoError::NotCoinbase(tx.id.clone()));
    }
    if !tx.inputs.is_empty() {
        return Err(UtxoError::CoinbaseWithInputs(tx.id.clone()));
    }
    check_outputs(tx)?;
    let claimed = checked_output_total(tx)?;
    let cap = subsidy
        .checked_add(fee_sum)
        .ok_or_else(|| UtxoError::Overflow(tx.id.clone()))?;
    if claimed > cap {
        return Err(UtxoError::ExcessiveReward {
            tx: tx.id.clone(),
            claimed,
            cap,
        });
    }
    Ok(CoinbaseClaim {
        claimed,
        destroyed: cap - claimed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockReport {
    pub height: u64,
    pub subsidy: i128,
    pub fees: i128,
    pub claim: CoinbaseClaim,
    pub tx_fees: Vec<(TxId, i128)>,
}

/// Where a transaction lives inside the ledger.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct TxLocation {
    block: usize,
    position: usize,
}

/// A canonical chain of applied blocks and its spendable set.
#[derive(Debug, Clone, Default)]
pub struct Ledger {
    config: LedgerConfig,
    blocks: Vec<Block>,
    outputs: HashMap<OutPoint, TxOut>,
    unspent: HashSet<OutPoint>,
    spent: HashMap<OutPoint, TxId>,
    index: HashMap<TxId, TxLocation>,
    reports: Vec<BlockReport>,
    supply: i128,
}

impl UtxoView for Ledger {
    fn unspent(&self, outpoint: &OutPoint) -> Option<&TxOut> {
        if self.unspent.contains(outpoint) {
            self.outputs.get(outpoint)
        } else {
            None
        }
    }

    fn spent_by(&self, outpoint: &OutPoint) -> Option<&TxId> {
        self.spent.get(outpoint)
    }

    fn exists(&self, outpoint: &OutPoint) -> bool {
        self.outputs.contains_key(outpoint)
    }
}

/// Ledger plus the uncommitted effects of the block being applied.
struct Staged<'a> {
    base: &'a Ledger,
    created: HashMap<OutPoint, TxOut>,
    consumed: HashMap<OutPoint, TxId>,
}

impl UtxoView for Staged<'_> {
    fn unspent(&self, outpoint: &OutPoint) -> Option<&TxOut> {
        if self.consumed.contains_key(outpoint) {
            return None;
        }
        self.created
            .get(outpoint)
            .or_else(|| self.base.unspent(outpoint))
    }

    fn spent_by(&self, outpoint: &OutPoint) -> Option<&TxId> {
        self.consumed
            .get(outpoint)
            .or_else(|| self.base.spent_by(outpoint))
    }

    fn exists(&self, outpoint: &OutPoint) -> bool {
        self.created.contains_key(outpoint) || self.base.exists(outpoint)
    }
}

impl Ledger {
    pub fn new(config: LedgerConfig) -> Self {
        Ledger {
            config,
            ..Default::default()
        }
    }

    pub fn config(&self) -> &LedgerConfig {
        &self.config
    }

    pub fn tip_height(&self) -> Option<u64> {
        self.blocks.last().map(|b| b.height)
    }

    /// Validates every transaction in order and commits the block only if all
    /// of them pass. Later transactions may spend outputs of earlier ones.
    pub fn apply_block(&mut self, block: Block) -> Result<&BlockReport, UtxoError> {
        if let Some(tip) = self.tip_height() {
            if block.height != tip + 1 {
                return Err(UtxoError::HeightMismatch {
                    expected: tip + 1,
                    got: block.height,
                });
            }
        }
        let coinbase = match block.transactions.first() {
            Some(tx) if tx.coinbase => tx,
            _ => return Err(UtxoError::MissingCoinbase(block.height)),
        };
        let mut staged = Staged {
            base: self,
            created: HashMap::new(),
            consumed: HashMap::new(),
        };
        let mut ids = HashSet::with_capacity(block.transactions.len());
        let mut fees: i128 = 0;
        let mut tx_fees = Vec::with_capacity(block.transactions.len().saturating_sub(1));
        for (position, tx) in block.transactions.iter().enumerate() {
            if self.index.contains_key(&tx.id) || !ids.insert(&tx.id) {
                return Err(UtxoError::DuplicateTxId(tx.id.clone()));
            }
            if position == 0 {
                // claim checked once fees are known; outputs spendable right away
                if self.config.require_shielded_coinbase {
                    let shielded = tx.shield_kinds.as_ref().is_some_and(|k| {
                        k.outputs.len() == tx.outputs.len()
                            && k.outputs.iter().all(|s| *s == ShieldKind::Z)
                    });
                    if !shielded {
                        return Err(UtxoError::CoinbaseNotShielded(tx.id.clone()));
                    }
                }
            } else {
                if tx.coinbase {
                    return Err(UtxoError::MisplacedCoinbase(tx.id.clone()));
                }
                let fee = validate_transaction(tx, &staged)?;
                fees = fees
                    .checked_add(fee)
                    .ok_or_else(|| UtxoError::Overflow(tx.id.clone()))?;
                tx_fees.push((tx.id.clone(), fee));
                for op in &tx.inputs {
                    staged.consumed.insert(op.clone(), tx.id.clone());
                }
            }
            for (i, out) in tx.outputs.iter().enumerate() {
                staged.created.insert(tx.outpoint(i as u32), out.clone());
            }
        }
        let subsidy = self.config.subsidy.at(block.height);
        let claim = validate_coinbase(coinbase, fees, subsidy)?;

        let Staged {
            created, consumed, ..
        } = staged;
        for (op, out) in created {
            self.unspent.insert(op.clone());
            self.outputs.insert(op, out);
        }
        for (op, by) in consumed {
            self.unspent.remove(&op);
            self.spent.insert(op, by);
        }
        let block_pos = self.blocks.len();
        for (position, tx) in block.transactions.iter().enumerate() {
            self.index.insert(
                tx.id.clone(),
                TxLocation {
                    block: block_pos,
                    position,
                },
            );
        }
        self.supply += claim.claimed;
        self.reports.push(BlockReport {
            height: block.height,
            subsidy,
            fees,
            claim,
            tx_fees,
        });
        self.blocks.push(block);
        Ok(self.reports.last().expect("just pushed"))
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn reports(&self) -> &[BlockReport] {
        &self.reports
    }

    /// Blocks whose height lies in `from..=to`.
    pub fn blocks_in(&self, from: u64, to: u64) -> impl Iterator<Item = &Block> {
        self.blocks
            .iter()
            .filter(move |b| b.height >= from && b.height <= to)
    }

    pub fn transactions(&self) -> impl Iterator<Item = &UtxoTransaction> {
        self.blocks.iter().flat_map(|b| b.transactions.iter())
    }

    pub fn transaction(&self, id: &TxId) -> Option<&UtxoTransaction> {
        let loc = self.index.get(id)?;
        Some(&self.blocks[loc.block].transactions[loc.position])
    }

    /// Any output ever created, spent or not.
    pub fn output(&self, outpoint: &OutPoint) -> Option<&TxOut> {
        self.outputs.get(outpoint)
    }

    pub fn is_unspent(&self, outpoint: &OutPoint) -> bool {
        self.unspent.contains(outpoint)
    }

    pub fn unspent_outpoints(&self) -> &HashSet<OutPoint> {
        &self.unspent
    }

    pub fn unspent_value(&self) -> i128 {
        self.unspent.iter().map(|op| self.outputs[op].value).sum()
    }

    /// Total coins created by accepted coinbase transactions.
    pub fn supply(&self) -> i128 {
        self.supply
    }

    /// Blocks on top of (and including) the one holding `id`.
    pub fn confirmations(&self, id: &TxId) -> Option<u64> {
        let loc = self.index.get(id)?;
        let height = self.blocks[loc.block].height;
        Some(self.tip_height()? - height + 1)
    }

    /// Reporting-only finality flag (six blocks by community convention).
    /// Validation never depends on it.
    pub fn is_deeply_confirmed(&self, id: &TxId, depth: u64) -> bool {
        self.confirmations(id).is_some_and(|c| c >= depth)
    }
}
