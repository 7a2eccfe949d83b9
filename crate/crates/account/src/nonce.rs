//! Per-sender nonce ordering.

use crate::model::AccountTx;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonceIssue {
    /// `found` was mined while `missing` had not been.
    Gap {
        sender: String,
        missing: u64,
        found: u64,
    },
    Duplicate {
        sender: String,
        nonce: u64,
    },
    /// A lower nonce mined after a higher one.
    OutOfOrder {
        sender: String,
        nonce: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonceReport {
    pub issues: Vec<NonceIssue>,
}

impl NonceReport {
    pub fn code(&self) -> &'static str {
        match self.issues.first() {
            Some(NonceIssue::Gap { .. }) => "account.nonce-gap",
            Some(NonceIssue::Duplicate { .. }) => "account.nonce-duplicate",
            _ => "account.nonce-order",
        }
    }
}

impl fmt::Display for NonceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            match issue {
                NonceIssue::Gap {
                    sender,
                    missing,
                    found,
                } => write!(f, "{sender}: nonce {found} mined before {missing}")?,
                NonceIssue::Duplicate { sender, nonce } => {
                    write!(f, "{sender}: nonce {nonce} used twice")?
                }
                NonceIssue::OutOfOrder { sender, nonce } => {
                    write!(f, "{sender}: nonce {nonce} mined late")?
                }
            }
        }
        Ok(())
    }
}

impl std::error::Error for NonceReport {}

/// Orders each sender's transactions by (block, index) and checks the nonces
/// run 0, 1, 2, ... without gaps or repeats.
pub fn validate_nonce_order(txs: &[AccountTx]) -> Result<(), NonceReport> {
    let mut by_sender: BTreeMap<&str, Vec<&AccountTx>> = BTreeMap::new();
    for tx in txs {
        by_sender.entry(tx.from.raw()).or_default().push(tx);
    }
    let mut issues = Vec::new();
    for (sender, mut list) in by_sender {
        list.sort_by_key(|t| (t.block_height, t.block_index));
        let mut expected = 0u64;
        let mut seen = HashSet::new();
        for tx in list {
            let n = tx.nonce;
            if !seen.insert(n) {
                issues.push(NonceIssue::Duplicate {
                    sender: sender.to_string(),
                    nonce: n,
                });
            } else if n > expected {
                issues.push(NonceIssue::Gap {
                    sender: sender.to_string(),
                    missing: expected,
                    found: n,
                });
                expected = n + 1;
            } else if n < expected {
                issues.push(NonceIssue::OutOfOrder {
                    sender: sender.to_string(),
                    nonce: n,
                });
            } else {
                expected += 1;
            }
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(NonceReport { issues })
    }
}
