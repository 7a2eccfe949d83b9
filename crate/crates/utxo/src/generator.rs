//! Valid-by-construction synthetic UTXO ledgers.

use crate::ledger::{Ledger, LedgerConfig, SubsidySchedule, UtxoError};
use crate::model::{Block, OutPoint, ShieldKind, ShieldKinds, TxOut, UtxoTransaction};
use crate::overlay::build_ring_input;
use ledgergraph_core::rng::labeled_rng;
use ledgergraph_core::AddressId;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct UtxoGenConfig {
    /// Spending transactions to create (coinbase transactions come on top).
    pub transactions: usize,
    pub txs_per_block: usize,
    /// Probability that a spending transaction is a split; the remainder is
    /// shared evenly between merges and transitions.
    pub split_bias: f64,
    /// Probability that an output pays an already-used address.
    pub reuse_probability: f64,
    /// Attach 11-member rings to every input.
    pub rings: bool,
    /// Attach random transparent/shielded kinds to every transaction.
    pub shielded: bool,
    pub subsidy: SubsidySchedule,
}

impl Default for UtxoGenConfig {
    fn default() -> Self {
        UtxoGenConfig {
            transactions: 1_000,
            txs_per_block: 100,
            split_bias: 0.5,
            reuse_probability: 0.1,
            rings: false,
            shielded: false,
            subsidy: SubsidySchedule::bitcoin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator setting: {0}")]
    InvalidSpec(String),
    #[error("generated ledger failed validation: {0}")]
    Invalid(#[from] UtxoError),
}

impl UtxoGenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(GenError::InvalidSpec(format!(
                    "{name} must lie in [0, 1], got {p}"
                )))
            }
        };
        prob("split_bias", self.split_bias)?;
        prob("reuse_probability", self.reuse_probability)?;
        if self.txs_per_block == 0 {
            return Err(GenError::InvalidSpec(
                "txs_per_block must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn ledger_config(&self) -> LedgerConfig {
        LedgerConfig {
            subsidy: self.subsidy,
            require_shielded_coinbase: false,
        }
    }
}

struct State<R: Rng> {
    rng: R,
    pool: Vec<(OutPoint, i128)>,
    created: Vec<OutPoint>,
    used_addresses: Vec<String>,
    next_address: u64,
    next_tx: u64,
    reuse: f64,
}

impl<R: Rng> State<R> {
    fn address(&mut self) -> AddressId {
        let raw = if !self.used_addresses.is_empty() && self.rng.gen_bool(self.reuse) {
            let i = self.rng.gen_range(0..self.used_addresses.len());
            self.used_addresses[i].clone()
        } else {
            let a = format!("addr{}", self.next_address);
            self.next_address += 1;
            self.used_addresses.push(a.clone());
            a
        };
        AddressId::utxo(raw).expect("generated address is non-empty")
    }

    fn tx_id(&mut self) -> String {
        let id = format!("tx{}", self.next_tx);
        self.next_tx += 1;
        id
    }

    fn outputs(&mut self, total: i128, count: usize) -> Vec<TxOut> {
        split_value(&mut self.rng, total, count)
            .into_iter()
            .map(|v| TxOut::new(v, self.address()))
            .collect()
    }

    fn register(&mut self, tx: &UtxoTransaction) {
        for (i, o) in tx.outputs.iter().enumerate() {
            let op = tx.outpoint(i as u32);
            self.pool.push((op.clone(), o.value));
            self.created.push(op);
        }
    }
}

/// Splits `total` into `count` parts, each at least 1 when `total >= count`.
fn split_value<R: Rng>(rng: &mut R, total: i128, count: usize) -> Vec<i128> {
    let n = count as i128;
    if total < n {
        return (0..n).map(|i| i128::from(i < total)).collect();
    }
    let spare = total - n;
    let mut cuts: Vec<i128> = (0..count - 1).map(|_| rng.gen_range(0..=spare)).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(count);
    let mut prev = 0;
    for c in cuts {
        parts.push(c - prev + 1);
        prev = c;
    }
    parts.push(spare - prev + 1);
    parts
}

fn shape<R: Rng>(rng: &mut R, split_bias: f64) -> (usize, usize) {
    if rng.gen_bool(split_bias) {
        let x = rng.gen_range(1..=2);
        (x, rng.gen_range(x + 1..=x + 2))
    } else if rng.gen_bool(0.5) {
        let x = rng.gen_range(2..=4);
        (x, rng.gen_range(1..x))
    } else {
        let x = rng.gen_range(1..=3);
        (x, x)
    }
}

fn kinds<R: Rng>(rng: &mut R, n: usize) -> Vec<ShieldKind> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                ShieldKind::T
            } else {
                ShieldKind::Z
            }
        })
        .collect()
}

/// Produces blocks starting at height 0. Block 0 holds only a funding
/// coinbase; later blocks hold up to `txs_per_block` spending transactions.
pub fn generate_blocks(config: &UtxoGenConfig, seed: u64) -> Result<Vec<Block>, GenError> {
    config.validate()?;
    let mut st = State {
        rng: labeled_rng(seed, "utxo-generator"),
        pool: Vec::new(),
        created: Vec::new(),
        used_addresses: Vec::new(),
        next_address: 0,
        next_tx: 0,
        reuse: config.reuse_probability,
    };
    let mut ring_rng = labeled_rng(seed, "utxo-rings");
    let reserve = 4 * config.txs_per_block + 8;
    let mut blocks = Vec::new();

    let id = st.tx_id();
    let outs = st.outputs(config.subsidy.at(0), reserve);
    let cb = UtxoTransaction::coinbase(id, 0, outs);
    st.register(&cb);
    blocks.push(Block::new(0, 0, vec![cb]));

    let mut remaining = config.transactions;
    let mut height = 0u64;
    while remaining > 0 {
        height += 1;
        let count = remaining.min(config.txs_per_block);
        remaining -= count;
        let mut txs = Vec::with_capacity(count + 1);
        let mut fees = 0i128;
        for _ in 0..count {
            let (x, y) = shape(&mut st.rng, config.split_bias);
            let mut inputs = Vec::with_capacity(x);
            let mut total = 0i128;
            for _ in 0..x {
                let i = st.rng.gen_range(0..st.pool.len());
                let (op, v) = st.pool.swap_remove(i);
                inputs.push(op);
                total += v;
            }
            let max_fee = (total - y as i128).max(0).min(total / 200);
            let fee = if max_fee > 0 {
                st.rng.gen_range(0..=max_fee)
            } else {
                0
            };
            fees += fee;
            let outputs = st.outputs(total - fee, y);
            let mut tx = UtxoTransaction::new(st.tx_id(), height, inputs, outputs);
            if config.rings {
                let mut rings = Vec::with_capacity(tx.inputs.len());
                for real in &tx.inputs {
                    let decoys: Vec<OutPoint> = (0..40)
                        .map(|_| st.created[ring_rng.gen_range(0..st.created.len())].clone())
                        .collect();
                    let ring = build_ring_input(real, &decoys, &mut ring_rng)
                        .map_err(|e| GenError::InvalidSpec(e.to_string()))?;
                    rings.push(ring);
                }
                tx.ring_inputs = Some(rings);
            }
            if config.shielded {
                tx.shield_kinds = Some(ShieldKinds {
                    inputs: kinds(&mut st.rng, tx.inputs.len()),
                    outputs: kinds(&mut st.rng, tx.outputs.len()),
                });
            }
            st.register(&tx);
            txs.push(tx);
        }
        let top_up = reserve.saturating_sub(st.pool.len()).max(4);
        let cb_id = st.tx_id();
        let outs = st.outputs(config.subsidy.at(height) + fees, top_up);
        let cb = UtxoTransaction::coinbase(cb_id, height, outs);
        st.register(&cb);
        txs.insert(0, cb);
        blocks.push(Block::new(height, height * 600, txs));
    }
    Ok(blocks)
}

/// Generates and applies every block, so the result is validated.
pub fn generate_ledger(config: &UtxoGenConfig, seed: u64) -> Result<Ledger, GenError> {
    let mut ledger = Ledger::new(config.ledger_config());
    for block in generate_blocks(config, seed)? {
        ledger.apply_block(block)?;
    }
    Ok(ledger)
}
