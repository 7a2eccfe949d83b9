//! Scripted contract execution producing call traces, and the hypergraph
//! built from them.

use crate::model::AccountTx;
use ledgergraph_core::{Hyperedge, Hypergraph, TxId};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const DEFAULT_STEP_BUDGET: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CallKind {
    Call,
    Delegatecall,
    Create,
    Selfdestruct,
    ValueTransfer,
    /// Internal storage update. Kept in the trace, left out of the hypergraph.
    StateChange,
    /// Budget exhausted; the trace stops here.
    OutOfGas,
}

impl CallKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CallKind::Call => "call",
            CallKind::Delegatecall => "delegatecall",
            CallKind::Create => "create",
            CallKind::Selfdestruct => "selfdestruct",
            CallKind::ValueTransfer => "value-transfer",
            CallKind::StateChange => "state-change",
            CallKind::OutOfGas => "out-of-gas",
        }
    }

    fn touches_network(self) -> bool {
        !matches!(self, CallKind::StateChange | CallKind::OutOfGas)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub caller: String,
    pub callee: String,
    pub kind: CallKind,
    pub value: i128,
    /// 0 for the top-level transaction.
    pub depth: usize,
    pub callee_is_contract: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub root_tx: TxId,
    pub steps: Vec<TraceStep>,
    pub truncated: bool,
}

/// One thing a contract function does when invoked. Values are in wei.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Action {
    Call {
        to: String,
        #[serde(default)]
        function: String,
        #[serde(default)]
        value: i64,
    },
    Delegatecall {
        to: String,
        #[serde(default)]
        function: String,
    },
    Create {
        address: String,
        #[serde(default)]
        value: i64,
    },
    Selfdestruct {
        beneficiary: String,
    },
    Transfer {
        to: String,
        value: i64,
    },
    StateChange {
        #[serde(default)]
        note: String,
    },
}

/// Runs transactions against scripted contracts, one step at a time and
/// depth first. Every recorded step costs one unit of the step budget.
#[derive(Debug, Clone)]
pub struct TraceExecutor {
    scripts: BTreeMap<(String, String), Vec<Action>>,
    contracts: BTreeSet<String>,
    budget: usize,
}

impl Default for TraceExecutor {
    fn default() -> Self {
        Self::new(DEFAULT_STEP_BUDGET)
    }
}

struct Run<'a> {
    exec: &'a TraceExecutor,
    steps: Vec<TraceStep>,
    remaining: usize,
    truncated: bool,
}

impl Run<'_> {
    /// Records a step; false once the budget is gone.
    fn step(
        &mut self,
        caller: &str,
        callee: &str,
        kind: CallKind,
        value: i128,
        depth: usize,
    ) -> bool {
        if self.truncated {
            return false;
        }
        let callee_is_contract = self.exec.is_contract(callee);
        if self.remaining == 0 {
            self.truncated = true;
            self.steps.push(TraceStep {
                caller: caller.to_string(),
                callee: callee.to_string(),
                kind: CallKind::OutOfGas,
                value: 0,
                depth,
                callee_is_contract,
            });
            return false;
        }
        self.remaining -= 1;
        self.steps.push(TraceStep {
            caller: caller.to_string(),
            callee: callee.to_string(),
            kind,
            value,
            depth,
            callee_is_contract,
        });
        true
    }

    fn invoke(&mut self, contract: &str, function: &str, depth: usize) -> bool {
        let Some(actions) = self
            .exec
            .scripts
            .get(&(contract.to_string(), function.to_string()))
        else {
            return true;
        };
        for action in actions {
            let ok = match action {
                Action::Call {
                    to,
                    function,
                    value,
                } => {
                    self.step(contract, to, CallKind::Call, i128::from(*value), depth)
                        && self.invoke(to, function, depth + 1)
                }
                Action::Delegatecall { to, function } => {
                    self.step(contract, to, CallKind::Delegatecall, 0, depth)
                        && self.invoke(to, function, depth + 1)
                }
                Action::Create { address, value } => self.step(
                    contract,
                    address,
                    CallKind::Create,
                    i128::from(*value),
                    depth,
                ),
                Action::Selfdestruct { beneficiary } => {
                    self.step(contract, beneficiary, CallKind::Selfdestruct, 0, depth);
                    return !self.truncated;
                }
                Action::Transfer { to, value } => self.step(
                    contract,
                    to,
                    CallKind::ValueTransfer,
                    i128::from(*value),
                    depth,
                ),
                Action::StateChange { .. } => {
                    self.step(contract, contract, CallKind::StateChange, 0, depth)
                }
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

impl TraceExecutor {
    pub fn new(budget: usize) -> Self {
        TraceExecutor {
            scripts: BTreeMap::new(),
            contracts: BTreeSet::new(),
            budget,
        }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Declares what `function` of `contract` does. An empty function name is
    /// the fallback used by plain value sends.
    pub fn define(&mut self, contract: &str, function: &str, actions: Vec<Action>) {
        self.contracts.insert(contract.to_string());
        self.scripts
            .insert((contract.to_string(), function.to_string()), actions);
    }

    pub fn register_contract(&mut self, contract: &str) {
        self.contracts.insert(contract.to_string());
    }

    pub fn is_contract(&self, address: &str) -> bool {
        self.contracts.contains(address)
    }

    pub fn execute(&self, tx: &AccountTx) -> Trace {
        let mut run = Run {
            exec: self,
            steps: Vec::new(),
            remaining: self.budget,
            truncated: false,
        };
        let to = tx.to.raw();
        let kind = if tx.contract_creation {
            CallKind::Create
        } else if self.is_contract(to) {
            CallKind::Call
        } else {
            CallKind::ValueTransfer
        };
        if run.step(tx.from.raw(), to, kind, tx.amount, 0) && kind == CallKind::Call {
            run.invoke(to, &tx.input_data, 1);
        }
        Trace {
            root_tx: tx.id.clone(),
            steps: run.steps,
            truncated: run.truncated,
        }
    }
}

/// One hyperedge per trace over every address it touches, in first-touch
/// order. State-change and out-of-gas steps are left out; traces touching
/// fewer than two addresses yield nothing.
pub fn build_trace_hypergraph(traces: &[Trace]) -> Hypergraph {
    let mut h = Hypergraph::new();
    for trace in traces {
        let mut members: Vec<String> = Vec::new();
        let mut steps = Vec::new();
        for s in trace.steps.iter().filter(|s| s.kind.touches_network()) {
            for who in [&s.caller, &s.callee] {
                if !members.contains(who) {
                    members.push(who.clone());
                }
            }
            steps.push(BTreeMap::from([
                ("caller".to_string(), s.caller.clone()),
                ("callee".to_string(), s.callee.clone()),
                ("kind".to_string(), s.kind.as_str().to_string()),
                ("value".to_string(), s.value.to_string()),
            ]));
        }
        if let Ok(edge) = Hyperedge::new(members, trace.root_tx.as_str(), steps) {
            h.push(edge);
        }
    }
    h
}
