//! Fungible token contracts with a built-in transfer function.

use ledgergraph_core::{AddressId, AddressKind, Edge, EdgeList, Rational, TxId};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenError {
    #[error("{0} is not an externally owned account")]
    OwnerNotEoa(String),
    #[error("{holder} holds {balance} tokens, needs {needed}")]
    InsufficientBalance {
        holder: String,
        balance: u128,
        needed: u128,
    },
    #[error("unknown token contract {0}")]
    UnknownToken(String),
    #[error("contract {0} already deployed")]
    AlreadyDeployed(String),
}

impl TokenError {
    pub fn code(&self) -> &'static str {
        match self {
            TokenError::OwnerNotEoa(_) => "account.owner-not-eoa",
            TokenError::InsufficientBalance { .. } => "account.insufficient-token-balance",
            TokenError::UnknownToken(_) => "account.unknown-token",
            TokenError::AlreadyDeployed(_) => "account.already-deployed",
        }
    }
}

/// Computes a contract address from its creator and the creator's nonce.
pub trait AddressDeriver {
    fn contract_address(&self, owner: &str, nonce: u64) -> String;
}

/// `0x` + first 20 bytes of SHA-256(owner || nonce as big-endian u64).
#[derive(Debug, Clone, Copy, Default)]
pub struct Sha256Deriver;

impl AddressDeriver for Sha256Deriver {
    fn contract_address(&self, owner: &str, nonce: u64) -> String {
        let mut h = Sha256::new();
        h.update(owner.as_bytes());
        h.update(nonce.to_be_bytes());
        format!("0x{}", hex::encode(&h.finalize()[..20]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenContract {
    pub address: String,
    pub owner: String,
    pub symbol: String,
    pub decimals: u8,
    pub total_supply: u128,
    pub balances: BTreeMap<String, u128>,
}

impl TokenContract {
    pub fn balance_of(&self, holder: &str) -> u128 {
        self.balances.get(holder).copied().unwrap_or(0)
    }
}

/// A balance update inside a token contract. Never a top-level transaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalTransfer {
    pub token: String,
    pub from: String,
    pub to: String,
    pub amount: u128,
    pub triggering_tx: TxId,
}

pub fn deploy_token(
    deriver: &impl AddressDeriver,
    owner: &AddressId,
    symbol: &str,
    decimals: u8,
    supply: u128,
    nonce: u64,
) -> Result<TokenContract, TokenError> {
    if owner.kind() != AddressKind::Eoa {
        return Err(TokenError::OwnerNotEoa(owner.raw().to_string()));
    }
    let mut balances = BTreeMap::new();
    if supply > 0 {
        balances.insert(owner.raw().to_string(), supply);
    }
    Ok(TokenContract {
        address: deriver.contract_address(owner.raw(), nonce),
        owner: owner.raw().to_string(),
        symbol: symbol.to_string(),
        decimals,
        total_supply: supply,
        balances,
    })
}

/// Moves tokens from `caller` to `recipient`. Either both balances change or
/// neither does.
pub fn execute_token_transfer(
    contract: &mut TokenContract,
    caller: &str,
    recipient: &str,
    amount: u128,
    triggering_tx: &TxId,
) -> Result<InternalTransfer, TokenError> {
    let balance = contract.balance_of(caller);
    if balance < amount {
        return Err(TokenError::InsufficientBalance {
            holder: caller.to_string(),
            balance,
            needed: amount,
        });
    }
    if amount > 0 && caller != recipient {
        let left = balance - amount;
        if left == 0 {
            contract.balances.remove(caller);
        } else {
            contract.balances.insert(caller.to_string(), left);
        }
        *contract.balances.entry(recipient.to_string()).or_insert(0) += amount;
    }
    Ok(InternalTransfer {
        token: contract.address.clone(),
        from: caller.to_string(),
        to: recipient.to_string(),
        amount,
        triggering_tx: triggering_tx.clone(),
    })
}

/// Many contracts plus the transfers executed against them.
#[derive(Debug, Clone, Default)]
pub struct TokenRegistry {
    pub contracts: BTreeMap<String, TokenContract>,
    pub transfers: Vec<InternalTransfer>,
}

impl TokenRegistry {
    pub fn deploy(&mut self, contract: TokenContract) -> Result<&TokenContract, TokenError> {
        if self.contracts.contains_key(&contract.address) {
            return Err(TokenError::AlreadyDeployed(contract.address));
        }
        let addr = contract.address.clone();
        Ok(self.contracts.entry(addr).or_insert(contract))
    }

    pub fn transfer(
        &mut self,
        token: &str,
        caller: &str,
        recipient: &str,
        amount: u128,
        tx: &TxId,
    ) -> Result<&InternalTransfer, TokenError> {
        let contract = self
            .contracts
            .get_mut(token)
            .ok_or_else(|| TokenError::UnknownToken(token.to_string()))?;
        let t = execute_token_transfer(contract, caller, recipient, amount, tx)?;
        self.transfers.push(t);
        Ok(self.transfers.last().expect("just pushed"))
    }
}

/// One edge per transfer of `token`, weighted by token amount.
pub fn build_token_graph(transfers: &[InternalTransfer], token: &str) -> EdgeList {
    let mut g = EdgeList::new(true, true);
    for t in transfers.iter().filter(|t| t.token == token) {
        g.push(
            Edge::new(t.from.as_str(), t.to.as_str())
                .weighted(Rational::from_integer(t.amount as i128))
                .attr("token", &t.token)
                .attr("txid", &t.triggering_tx),
        )
        .expect("multigraph");
    }
    g
}

/// Traders that appear in the graphs of two or more tokens.
pub fn shared_traders(transfers: &[InternalTransfer]) -> BTreeMap<String, BTreeSet<String>> {
    let mut seen: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for t in transfers {
        for who in [&t.from, &t.to] {
            seen.entry(who.clone()).or_default().insert(t.token.clone());
        }
    }
    seen.retain(|_, tokens| tokens.len() >= 2);
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn owner() -> AddressId {
        AddressId::eoa("0xowner").unwrap()
    }

    #[test]
    fn derivation_is_injective_in_nonce_and_stable() {
        let d = Sha256Deriver;
        let a = deploy_token(&d, &owner(), "TOK", 18, 100, 0).unwrap();
        let b = deploy_token(&d, &owner(), "TOK", 18, 100, 1).unwrap();
        assert_ne!(a.address, b.address);
        assert_eq!(
            a.address,
            deploy_token(&d, &owner(), "OTHER", 0, 5, 0)
                .unwrap()
                .address
        );
        assert_eq!(a.address.len(), 42);
    }

    #[test]
    fn contract_cannot_own_token() {
        let c = AddressId::contract("0xc").unwrap();
        assert!(matches!(
            deploy_token(&Sha256Deriver, &c, "T", 0, 1, 0),
            Err(TokenError::OwnerNotEoa(_))
        ));
    }

    #[test]
    fn transfer_moves_balances_atomically() {
        let mut t = deploy_token(&Sha256Deriver, &owner(), "T", 0, 10, 0).unwrap();
        let tx = TxId::new("tx");
        execute_token_transfer(&mut t, "0xowner", "a2", 4, &tx).unwrap();
        assert_eq!(t.balance_of("a2"), 4);
        let before = t.clone();
        assert!(matches!(
            execute_token_transfer(&mut t, "a2", "a1", 5, &tx),
            Err(TokenError::InsufficientBalance { .. })
        ));
        assert_eq!(t, before);
        let zero = execute_token_transfer(&mut t, "a2", "a1", 0, &tx).unwrap();
        assert_eq!(zero.amount, 0);
        assert_eq!(t, before);
        assert_eq!(t.balances.values().sum::<u128>(), t.total_supply);
    }
}
