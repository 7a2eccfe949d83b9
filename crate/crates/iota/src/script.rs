//! JSONL tangle scenarios.
//!
//! Each line has a `cmd` field. Transactions are named by an `id` label and
//! later commands refer to them by label (or raw hash); `genesis` names the
//! current genesis. Omitted trunk/branch fall back to tip selection.

use crate::bundle::{build_bundle, BundleInput, BundleOutput};
use crate::derive::SecurityLevel;
use crate::error::IotaError;
use crate::sponge::Sponge;
use crate::tangle::{TangleState, TipStrategy};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct InputSpec {
    pub address: String,
    #[serde(default = "default_level")]
    pub level: u8,
    pub amount: i64,
}

fn default_level() -> u8 {
    2
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct OutputSpec {
    pub address: String,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case")]
pub enum TangleCommand {
    Init {
        coordinator: String,
        #[serde(default)]
        balances: BTreeMap<String, i64>,
        #[serde(default)]
        difficulty: Option<usize>,
    },
    Transfer {
        id: String,
        inputs: Vec<InputSpec>,
        outputs: Vec<OutputSpec>,
        #[serde(default)]
        tag: String,
        #[serde(default)]
        time: Option<u64>,
        #[serde(default)]
        trunk: Option<String>,
        #[serde(default)]
        branch: Option<String>,
    },
    Message {
        id: String,
        #[serde(default)]
        address: String,
        #[serde(default)]
        tag: String,
        #[serde(default)]
        time: Option<u64>,
        #[serde(default)]
        trunk: Option<String>,
        #[serde(default)]
        branch: Option<String>,
    },
    Milestone {
        id: String,
        #[serde(default)]
        time: Option<u64>,
        #[serde(default)]
        trunk: Option<String>,
        #[serde(default)]
        branch: Option<String>,
    },
    Promote {
        id: String,
        target: String,
        #[serde(default)]
        time: Option<u64>,
        #[serde(default)]
        branch: Option<String>,
    },
    Snapshot,
}

impl TangleCommand {
    pub fn name(&self) -> &'static str {
        match self {
            TangleCommand::Init { .. } => "init",
            TangleCommand::Transfer { .. } => "transfer",
            TangleCommand::Message { .. } => "message",
            TangleCommand::Milestone { .. } => "milestone",
            TangleCommand::Promote { .. } => "promote",
            TangleCommand::Snapshot => "snapshot",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangleEvent {
    pub line: usize,
    pub cmd: String,
    pub ok: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone)]
pub struct TangleScenario<S: Sponge> {
    proto: S,
    pub state: Option<TangleState<S>>,
    labels: BTreeMap<String, String>,
    pub strategy: TipStrategy,
    rng: ChaCha8Rng,
    clock: u64,
}

impl<S: Sponge> TangleScenario<S> {
    pub fn new(sponge: S, strategy: TipStrategy, seed: u64) -> Self {
        TangleScenario {
            proto: sponge,
            state: None,
            labels: BTreeMap::new(),
            strategy,
            rng: ledgergraph_core::rng::labeled_rng(seed, "iota.tips"),
            clock: 0,
        }
    }

    pub fn state(&self) -> Result<&TangleState<S>, IotaError> {
        self.state.as_ref().ok_or(IotaError::NotInitialized)
    }

    /// Hash behind a label, if it is still in the current tangle.
    pub fn hash_of(&self, label: &str) -> Option<&str> {
        self.labels.get(label).map(String::as_str)
    }

    pub fn label_of(&self, hash: &str) -> Option<&str> {
        self.labels
            .iter()
            .find(|(_, h)| h.as_str() == hash)
            .map(|(l, _)| l.as_str())
    }

    fn labelled(&self, hashes: &[String]) -> Vec<String> {
        hashes
            .iter()
            .filter_map(|h| self.label_of(h).map(str::to_string))
            .collect()
    }

    /// Labels whose transaction is invalid.
    pub fn invalid_labels(&self) -> Vec<String> {
        let Some(st) = &self.state else {
            return Vec::new();
        };
        self.labels
            .iter()
            .filter(|(_, h)| st.is_invalid(h))
            .map(|(l, _)| l.clone())
            .collect()
    }

    pub fn confirmed_labels(&self) -> Vec<String> {
        let Some(st) = &self.state else {
            return Vec::new();
        };
        self.labels
            .iter()
            .filter(|(_, h)| st.is_confirmed(h))
            .map(|(l, _)| l.clone())
            .collect()
    }

    fn resolve(&self, r: &str) -> String {
        if r == "genesis" {
            if let Some(st) = &self.state {
                return st.genesis().to_string();
            }
        }
        self.labels.get(r).cloned().unwrap_or_else(|| r.to_string())
    }

    fn tips(
        &mut self,
        trunk: &Option<String>,
        branch: &Option<String>,
    ) -> Result<(String, String), IotaError> {
        let st = self.state.as_ref().ok_or(IotaError::NotInitialized)?;
        let (a, b) = match (trunk, branch) {
            (Some(t), Some(b)) => return Ok((self.resolve(t), self.resolve(b))),
            _ => st.select_tips(self.strategy, &mut self.rng)?,
        };
        Ok((
            trunk.as_ref().map(|t| self.resolve(t)).unwrap_or(a),
            branch.as_ref().map(|b| self.resolve(b)).unwrap_or(b),
        ))
    }

    fn tick(&mut self, time: Option<u64>) -> u64 {
        self.clock = time.unwrap_or(self.clock + 1);
        self.clock
    }

    /// Applies one command; on error nothing changes.
    pub fn apply(&mut self, cmd: &TangleCommand) -> Result<serde_json::Value, IotaError> {
        let saved = (
            self.state.clone(),
            self.labels.clone(),
            self.rng.clone(),
            self.clock,
        );
        let out = self.apply_inner(cmd);
        if out.is_err() {
            (self.state, self.labels, self.rng, self.clock) = saved;
        }
        out
    }

    fn apply_inner(&mut self, cmd: &TangleCommand) -> Result<serde_json::Value, IotaError> {
        match cmd {
            TangleCommand::Init {
                coordinator,
                balances,
                difficulty,
            } => {
                let mut st = TangleState::new(self.proto.clone(), coordinator, balances.clone())?;
                if let Some(d) = difficulty {
                    st.difficulty = *d;
                }
                self.labels.clear();
                let out =
                    json!({"genesis": st.genesis(), "supply": st.total_balance().to_string()});
                self.state = Some(st);
                Ok(out)
            }
            TangleCommand::Transfer {
                id,
                inputs,
                outputs,
                tag,
                time,
                trunk,
                branch,
            } => {
                let ins = inputs
                    .iter()
                    .map(|i| {
                        Ok(BundleInput {
                            address: i.address.clone(),
                            level: SecurityLevel::new(i.level)?,
                            amount: i.amount,
                        })
                    })
                    .collect::<Result<Vec<_>, IotaError>>()?;
                let outs: Vec<BundleOutput> = outputs
                    .iter()
                    .map(|o| BundleOutput {
                        address: o.address.clone(),
                        value: o.value,
                    })
                    .collect();
                let t = self.tick(*time);
                let (tr, br) = self.tips(trunk, branch)?;
                let st = self.state.as_mut().ok_or(IotaError::NotInitialized)?;
                let bundle = build_bundle(st.sponge(), &ins, &outs, tag, t)?;
                let hashes = st.attach(&bundle, &tr, &br)?;
                self.labels.insert(id.clone(), hashes[0].clone());
                Ok(json!({"hash": hashes[0], "bundle": bundle.hash, "txs": hashes.len()}))
            }
            TangleCommand::Message {
                id,
                address,
                tag,
                time,
                trunk,
                branch,
            } => {
                let t = self.tick(*time);
                let (tr, br) = self.tips(trunk, branch)?;
                let st = self.state.as_mut().ok_or(IotaError::NotInitialized)?;
                let h = st.attach_message(address, tag, t, &tr, &br)?;
                self.labels.insert(id.clone(), h.clone());
                Ok(json!({"hash": h}))
            }
            TangleCommand::Milestone {
                id,
                time,
                trunk,
                branch,
            } => {
                let t = self.tick(*time);
                let (tr, br) = self.tips(trunk, branch)?;
                let st = self.state.as_mut().ok_or(IotaError::NotInitialized)?;
                let report = st.issue_milestone(&tr, &br, t)?;
                self.labels.insert(id.clone(), report.milestone.clone());
                Ok(json!({
                    "hash": report.milestone,
                    "confirmed": report.confirmed.len(),
                    "confirmed_labels": self.labelled(&report.confirmed),
                    "invalidated": report.invalidated.len(),
                    "invalidated_labels": self.labelled(&report.invalidated),
                }))
            }
            TangleCommand::Promote {
                id,
                target,
                time,
                branch,
            } => {
                let t = self.tick(*time);
                let target = self.resolve(target);
                let br = match branch {
                    Some(b) => self.resolve(b),
                    None => self.tips(&None, &None)?.0,
                };
                let st = self.state.as_mut().ok_or(IotaError::NotInitialized)?;
                let h = st.promote(&target, &br, t)?;
                self.labels.insert(id.clone(), h.clone());
                Ok(json!({"hash": h}))
            }
            TangleCommand::Snapshot => {
                let st = self.state.as_ref().ok_or(IotaError::NotInitialized)?;
                let (balances, next) = st.snapshot();
                let total: i128 = balances.values().map(|&v| i128::from(v)).sum();
                let out = json!({"genesis": next.genesis(), "addresses": balances.len(), "supply": total.to_string()});
                self.state = Some(next);
                self.labels.clear();
                Ok(out)
            }
        }
    }
}

pub fn parse_tangle_command(line: &str, n: usize) -> Result<TangleCommand, IotaError> {
    serde_json::from_str(line).map_err(|e| IotaError::Parse {
        line: n,
        message: e.to_string(),
    })
}

/// Applies every line in order. Rejected commands are logged with their
/// error code and leave the scenario unchanged; malformed lines abort.
pub fn replay_tangle<S: Sponge>(
    scenario: &mut TangleScenario<S>,
    script: &str,
) -> Result<Vec<TangleEvent>, IotaError> {
    let mut log = Vec::new();
    for (i, line) in script.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cmd = parse_tangle_command(line, i + 1)?;
        let (ok, detail) = match scenario.apply(&cmd) {
            Ok(d) => (true, d),
            Err(e) => (false, json!({"error": e.code(), "message": e.to_string()})),
        };
        log.push(TangleEvent {
            line: i + 1,
            cmd: cmd.name().to_string(),
            ok,
            detail,
        });
    }
    Ok(log)
}
