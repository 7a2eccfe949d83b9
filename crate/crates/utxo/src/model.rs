use ledgergraph_core::{AddressId, Amount, TxId};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Reference to one output of a prior transaction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutPoint {
    pub txid: TxId,
    pub index: u32,
}

impl OutPoint {
    pub fn new(txid: impl Into<String>, index: u32) -> Self {
        OutPoint {
            txid: TxId::new(txid),
            index,
        }
    }
}

impl fmt::Display for OutPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.txid, self.index)
    }
}

/// A transaction output. `value` is in satoshi. Outputs with `visible == false`
/// model confidential amounts: the ledger still tracks the value for
/// conservation, but graph builders refuse to weight edges with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxOut {
    pub value: i128,
    pub address: AddressId,
    pub visible: bool,
}

impl TxOut {
    pub fn new(value: i128, address: AddressId) -> Self {
        TxOut {
            value,
            address,
            visible: true,
        }
    }

    pub fn hidden(value: i128, address: AddressId) -> Self {
        TxOut {
            value,
            address,
            visible: false,
        }
    }

    pub fn amount(&self) -> Amount {
        Amount::sat(self.value)
    }
}

/// Transparent or shielded side of a Zcash-style transaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShieldKind {
    T,
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShieldKinds {
    #[serde(rename = "in")]
    pub inputs: Vec<ShieldKind>,
    #[serde(rename = "out")]
    pub outputs: Vec<ShieldKind>,
}

/// A Monero-style ring: the real spend hidden among decoys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingInput {
    pub members: Vec<OutPoint>,
    /// Position of the real spend. Only the generator and test oracles look at it.
    pub real_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtxoTransaction {
    pub id: TxId,
    pub inputs: Vec<OutPoint>,
    pub outputs: Vec<TxOut>,
    pub coinbase: bool,
    pub block_height: u64,
    pub ring_inputs: Option<Vec<RingInput>>,
    pub shield_kinds: Option<ShieldKinds>,
}

impl UtxoTransaction {
    pub fn new(
        id: impl Into<String>,
        block_height: u64,
        inputs: Vec<OutPoint>,
        outputs: Vec<TxOut>,
    ) -> Self {
        UtxoTransaction {
            id: TxId::new(id),
            inputs,
            outputs,
            coinbase: false,
            block_height,
            ring_inputs: None,
            shield_kinds: None,
        }
    }

    pub fn coinbase(id: impl Into<String>, block_height: u64, outputs: Vec<TxOut>) -> Self {
        UtxoTransaction {
            coinbase: true,
            ..Self::new(id, block_height, Vec::new(), outputs)
        }
    }

    pub fn output_total(&self) -> i128 {
        self.outputs.iter().map(|o| o.value).sum()
    }

    pub fn outpoint(&self, index: u32) -> OutPoint {
        OutPoint {
            txid: self.id.clone(),
            index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub height: u64,
    pub timestamp: u64,
    /// Coinbase first.
    pub transactions: Vec<UtxoTransaction>,
}

impl Block {
    pub fn new(height: u64, timestamp: u64, transactions: Vec<UtxoTransaction>) -> Self {
        Block {
            height,
            timestamp,
            transactions,
        }
    }
}
