use ledgergraph_core::{AddressId, AddressKind, ChainTag, TxId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AccountError {
    #[error("{tx}: {from} is a {kind:?} address and cannot initiate a transaction")]
    CannotInitiate {
        tx: TxId,
        from: String,
        kind: AddressKind,
    },
    #[error("{0}: contract creation needs input data and a contract receiver")]
    BadCreation(TxId),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("nonce order violated: {0}")]
    Nonce(#[from] crate::nonce::NonceReport),
}

impl AccountError {
    pub fn code(&self) -> &'static str {
        match self {
            AccountError::CannotInitiate { .. } => "account.cannot-initiate",
            AccountError::BadCreation(_) => "account.bad-creation",
            AccountError::Parse { .. } => "account.parse",
            AccountError::Nonce(r) => r.code(),
        }
    }
}

/// A top-level transaction mined in a block. Amounts are in wei.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccountTx {
    pub id: TxId,
    pub from: AddressId,
    pub to: AddressId,
    pub amount: i128,
    pub nonce: u64,
    pub block_height: u64,
    pub block_index: u32,
    pub timestamp: u64,
    /// Empty for plain transfers; a function name for scripted contract calls.
    pub input_data: String,
    pub contract_creation: bool,
}

impl AccountTx {
    pub fn transfer(
        id: impl Into<String>,
        from: AddressId,
        to: AddressId,
        amount: i128,
        nonce: u64,
        block: u64,
        index: u32,
    ) -> Self {
        AccountTx {
            id: TxId::new(id),
            from,
            to,
            amount,
            nonce,
            block_height: block,
            block_index: index,
            timestamp: block,
            input_data: String::new(),
            contract_creation: false,
        }
    }

    pub fn check(&self) -> Result<(), AccountError> {
        if !self.from.kind().can_initiate() {
            return Err(AccountError::CannotInitiate {
                tx: self.id.clone(),
                from: self.from.raw().to_string(),
                kind: self.from.kind(),
            });
        }
        if self.contract_creation
            && (self.input_data.is_empty() || self.to.kind() != AddressKind::Contract)
        {
            return Err(AccountError::BadCreation(self.id.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReceiverKind {
    #[default]
    Eoa,
    Contract,
    Null,
}

/// JSONL record for account transactions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AccountTxRecord {
    #[serde(default)]
    pub id: Option<String>,
    pub from: String,
    pub to: String,
    #[serde(default)]
    pub to_kind: ReceiverKind,
    pub amount: i64,
    pub nonce: u64,
    pub block: u64,
    pub index: u32,
    #[serde(default)]
    pub time: Option<u64>,
    #[serde(default)]
    pub data: String,
    #[serde(default)]
    pub create: bool,
}

impl AccountTxRecord {
    pub fn into_tx(self, line: usize) -> Result<AccountTx, AccountError> {
        let err = |e: ledgergraph_core::AddressError| AccountError::Parse {
            line,
            message: e.to_string(),
        };
        let kind = match self.to_kind {
            ReceiverKind::Eoa => AddressKind::Eoa,
            ReceiverKind::Contract => AddressKind::Contract,
            ReceiverKind::Null => AddressKind::Null,
        };
        let tx = AccountTx {
            id: TxId::new(
                self.id
                    .unwrap_or_else(|| format!("{}#{}", self.from, self.nonce)),
            ),
            from: AddressId::eoa(self.from).map_err(err)?,
            to: AddressId::new(ChainTag::Account, self.to, kind).map_err(err)?,
            amount: i128::from(self.amount),
            nonce: self.nonce,
            block_height: self.block,
            block_index: self.index,
            timestamp: self.time.unwrap_or(self.block),
            input_data: self.data,
            contract_creation: self.create,
        };
        tx.check()?;
        Ok(tx)
    }
}

pub fn parse_account_jsonl(text: &str) -> Result<Vec<AccountTx>, AccountError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: AccountTxRecord = serde_json::from_str(line).map_err(|e| AccountError::Parse {
            line: n + 1,
            message: e.to_string(),
        })?;
        out.push(rec.into_tx(n + 1)?);
    }
    Ok(out)
}
