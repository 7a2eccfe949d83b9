use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Ledger family an address lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainTag {
    Utxo,
    Account,
    Ripple,
    Iota,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AddressKind {
    Plain,
    TAddr,
    ZAddr,
    Eoa,
    Contract,
    Null,
    Gateway,
    Market,
    Wallet,
}

impl AddressKind {
    pub fn is_legal_for(self, chain: ChainTag) -> bool {
        use AddressKind::*;
        match chain {
            ChainTag::Utxo => matches!(self, Plain | TAddr | ZAddr),
            ChainTag::Account => matches!(self, Eoa | Contract | Null),
            ChainTag::Ripple => matches!(self, Plain | Gateway | Market | Wallet),
            ChainTag::Iota => matches!(self, Plain),
        }
    }

    /// Only externally owned accounts may originate account-model transactions.
    pub fn can_initiate(self) -> bool {
        !matches!(self, AddressKind::Contract | AddressKind::Null)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddressError {
    #[error("address identifier is empty")]
    Empty,
    #[error("address kind {kind:?} is not legal on a {chain:?} ledger")]
    IllegalKind { chain: ChainTag, kind: AddressKind },
}

/// Opaque address identifier. No checksum or encoding validation is done on `raw`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AddressId {
    chain: ChainTag,
    raw: String,
    kind: AddressKind,
}

impl AddressId {
    pub fn new(
        chain: ChainTag,
        raw: impl Into<String>,
        kind: AddressKind,
    ) -> Result<Self, AddressError> {
        let raw = raw.into();
        if raw.is_empty() {
            return Err(AddressError::Empty);
        }
        if !kind.is_legal_for(chain) {
            return Err(AddressError::IllegalKind { chain, kind });
        }
        Ok(AddressId { chain, raw, kind })
    }

    pub fn utxo(raw: impl Into<String>) -> Result<Self, AddressError> {
        Self::new(ChainTag::Utxo, raw, AddressKind::Plain)
    }

    pub fn eoa(raw: impl Into<String>) -> Result<Self, AddressError> {
        Self::new(ChainTag::Account, raw, AddressKind::Eoa)
    }

    pub fn contract(raw: impl Into<String>) -> Result<Self, AddressError> {
        Self::new(ChainTag::Account, raw, AddressKind::Contract)
    }

    pub fn null_account(raw: impl Into<String>) -> Result<Self, AddressError> {
        Self::new(ChainTag::Account, raw, AddressKind::Null)
    }

    pub fn chain(&self) -> ChainTag {
        self.chain
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn kind(&self) -> AddressKind {
        self.kind
    }
}

impl std::fmt::Display for AddressId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.raw)
    }
}
