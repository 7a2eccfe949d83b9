//! JSONL ingestion and export: one transaction per line, grouped into blocks
//! by the `block` field.

use crate::ledger::{Ledger, LedgerConfig, UtxoError};
use crate::model::{Block, OutPoint, RingInput, ShieldKind, ShieldKinds, TxOut, UtxoTransaction};
use ledgergraph_core::{AddressId, AddressKind, Amount, ChainTag, TxId, Unit};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Invalid(#[from] UtxoError),
}

impl IngestError {
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::Parse { .. } => "utxo.parse",
            IngestError::Io(_) => "io",
            IngestError::Invalid(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InputRecord {
    txid: String,
    index: u32,
}

/// Integer satoshi, or a decimal string in BTC such as `"0.9"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum AmountField {
    Sat(i64),
    Coins(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OutputRecord {
    amount: AmountField,
    address: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    hidden: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TxRecord {
    id: String,
    block: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time: Option<u64>,
    #[serde(default)]
    coinbase: bool,
    #[serde(default)]
    inputs: Vec<InputRecord>,
    outputs: Vec<OutputRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kinds: Option<ShieldKinds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rings: Option<Vec<Vec<InputRecord>>>,
}

fn to_tx(rec: TxRecord, line: usize) -> Result<(UtxoTransaction, Option<u64>), IngestError> {
    let err = |message: String| IngestError::Parse { line, message };
    let mut outputs = Vec::with_capacity(rec.outputs.len());
    for (i, o) in rec.outputs.into_iter().enumerate() {
        let value = match o.amount {
            AmountField::Sat(v) => i128::from(v),
            AmountField::Coins(text) => {
                Amount::parse_decimal(&text, &Unit::Btc)
                    .map_err(|e| err(format!("output {i}: {e}")))?
                    .value
            }
        };
        let kind = match rec.kinds.as_ref().and_then(|k| k.outputs.get(i)) {
            Some(ShieldKind::T) => AddressKind::TAddr,
            Some(ShieldKind::Z) => AddressKind::ZAddr,
            None => AddressKind::Plain,
        };
        let address = AddressId::new(ChainTag::Utxo, o.address, kind)
            .map_err(|e| err(format!("output {i}: {e}")))?;
        outputs.push(TxOut {
            value,
            address,
            visible: !o.hidden,
        });
    }
    let point = |r: InputRecord| OutPoint {
        txid: TxId(r.txid),
        index: r.index,
    };
    let tx = UtxoTransaction {
        id: TxId(rec.id),
        inputs: rec.inputs.into_iter().map(point).collect(),
        outputs,
        coinbase: rec.coinbase,
        block_height: rec.block,
        ring_inputs: rec.rings.map(|rings| {
            rings
                .into_iter()
                .map(|members| RingInput {
                    members: members.into_iter().map(point).collect(),
                    real_index: None,
                })
                .collect()
        }),
        shield_kinds: rec.kinds,
    };
    Ok((tx, rec.time))
}

/// Parses JSONL into blocks. Blank lines are skipped; block numbers must not
/// decrease.
pub fn parse_jsonl(reader: impl BufRead) -> Result<Vec<Block>, IngestError> {
    let mut blocks: Vec<Block> = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TxRecord = serde_json::from_str(&line).map_err(|e| IngestError::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let (tx, time) = to_tx(rec, lineno)?;
        match blocks.last_mut() {
            Some(b) if b.height == tx.block_height => b.transactions.push(tx),
            Some(b) if b.height > tx.block_height => {
                return Err(IngestError::Parse {
                    line: lineno,
                    message: format!("block {} after block {}", tx.block_height, b.height),
                })
            }
            _ => {
                let height = tx.block_height;
                blocks.push(Block::new(height, time.unwrap_or(height), vec![tx]));
            }
        }
    }
    Ok(blocks)
}

/// Parses and applies every block in order.
pub fn load_ledger(reader: impl BufRead, config: LedgerConfig) -> Result<Ledger, IngestError> {
    let mut ledger = Ledger::new(config);
    for block in parse_jsonl(reader)? {
        ledger.apply_block(block)?;
    }
    Ok(ledger)
}

pub fn write_jsonl(blocks: &[Block], mut out: impl Write) -> Result<(), IngestError> {
    let record = |r: &OutPoint| InputRecord {
        txid: r.txid.0.clone(),
        index: r.index,
    };
    for block in blocks {
        for tx in &block.transactions {
            let rec = TxRecord {
                id: tx.id.0.clone(),
                block: block.height,
                time: Some(block.timestamp),
                coinbase: tx.coinbase,
                inputs: tx.inputs.iter().map(record).collect(),
                outputs: tx
                    .outputs
                    .iter()
                    .map(|o| OutputRecord {
                        amount: AmountField::Sat(
                            i64::try_from(o.value).expect("satoshi values fit in i64"),
                        ),
                        address: o.address.raw().to_string(),
                        hidden: !o.visible,
                    })
                    .collect(),
                kinds: tx.shield_kinds.clone(),
                rings: tx.ring_inputs.as_ref().map(|rs| {
                    rs.iter()
                        .map(|r| r.members.iter().map(record).collect())
                        .collect()
                }),
            };
            serde_json::to_writer(&mut out, &rec).map_err(|e| IngestError::Io(e.into()))?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}
