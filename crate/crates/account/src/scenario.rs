//! JSONL scenarios mixing contract scripts with the transactions that call them.
//!
//! ```text
//! {"kind":"script","contract":"c","function":"f","actions":[{"op":"transfer","to":"x","value":1}]}
//! {"kind":"tx","from":"a","to":"c","to_kind":"contract","amount":0,"nonce":0,"block":1,"index":0,"data":"f"}
//! {"kind":"budget","steps":64}
//! ```

use crate::model::{AccountError, AccountTx, AccountTxRecord};
use crate::trace::{Action, Trace, TraceExecutor};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Line {
    Script {
        contract: String,
        function: String,
        actions: Vec<Action>,
    },
    Tx(AccountTxRecord),
    Budget {
        steps: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub executor: TraceExecutor,
    pub txs: Vec<AccountTx>,
}

impl Scenario {
    pub fn traces(&self) -> Vec<Trace> {
        self.txs.iter().map(|t| self.executor.execute(t)).collect()
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, AccountError> {
    let mut executor = TraceExecutor::default();
    let mut scripts = Vec::new();
    let mut txs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line: Line = serde_json::from_str(raw).map_err(|e| AccountError::Parse {
            line: n + 1,
            message: e.to_string(),
        })?;
        match line {
            Line::Script {
                contract,
                function,
                actions,
            } => scripts.push((contract, function, actions)),
            Line::Tx(rec) => txs.push(rec.into_tx(n + 1)?),
            Line::Budget { steps } => executor = TraceExecutor::new(steps),
        }
    }
    for (c, f, a) in scripts {
        executor.define(&c, &f, a);
    }
    for tx in &txs {
        if tx.to.kind() == ledgergraph_core::AddressKind::Contract {
            executor.register_contract(tx.to.raw());
        }
    }
    Ok(Scenario { executor, txs })
}
