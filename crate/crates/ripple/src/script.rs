//! JSONL command scripts replayed against a ledger.
//!
//! Each line is an object with a `cmd` field; the other fields depend on the
//! command. Rejected commands are logged and leave the ledger unchanged.

use crate::ledger::{RippleError, RippleLedger};
use crate::offers::Asset;
use crate::payment::PaymentSpec;
use crate::state::RippleState;
use ledgergraph_core::Rational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssetAmount {
    pub currency: String,
    #[serde(default)]
    pub issuer: Option<String>,
    pub value: i128,
}

impl AssetAmount {
    fn asset(&self) -> Result<Asset, RippleError> {
        if self.currency == "XRP" {
            return Ok(Asset::Xrp);
        }
        crate::ledger::check_currency(&self.currency)?;
        let issuer = self.issuer.clone().ok_or_else(|| {
            RippleError::InvalidCurrency(format!("{} without issuer", self.currency))
        })?;
        Ok(Asset::issued(&self.currency, &issuer))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct AccountFlags {
    pub account: String,
    #[serde(default)]
    pub default_ripple: Option<bool>,
    #[serde(default)]
    pub deposit_auth: Option<bool>,
    #[serde(default)]
    pub require_dest: Option<bool>,
    /// As `"num/den"`.
    #[serde(default)]
    pub transfer_fee: Option<String>,
    #[serde(default)]
    pub freeze: Vec<String>,
    #[serde(default)]
    pub unfreeze: Vec<String>,
    #[serde(default)]
    pub preauthorize: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Fund {
        account: String,
        drops: i128,
    },
    Trust {
        lender: String,
        borrower: String,
        currency: String,
        limit: i128,
    },
    Line(RippleState),
    Flags(AccountFlags),
    NoRipple {
        account: String,
        peer: String,
        currency: String,
        flag: bool,
    },
    Freeze {
        a: String,
        b: String,
        currency: String,
        frozen: bool,
    },
    Pay(PaymentSpec),
    Offer {
        owner: String,
        gets: AssetAmount,
        pays: AssetAmount,
    },
    CancelOffer {
        owner: String,
        sequence: u64,
    },
    WriteCheck {
        sender: String,
        receiver: String,
        amount: AssetAmount,
        expiration: u64,
    },
    CashCheck {
        id: u64,
        by: String,
        value: i128,
        now: u64,
    },
    CancelCheck {
        id: u64,
        by: String,
        now: u64,
    },
    CreateEscrow {
        sender: String,
        receiver: String,
        drops: i128,
        release: u64,
        expiry: u64,
    },
    FinishEscrow {
        id: u64,
        now: u64,
    },
    CancelEscrow {
        id: u64,
        now: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub line: usize,
    pub cmd: String,
    pub ok: bool,
    /// Command-specific outcome, or the error code when rejected.
    pub detail: Value,
}

fn field<T: serde::de::DeserializeOwned>(v: &Value, name: &str) -> Result<T, String> {
    serde_json::from_value(v.get(name).cloned().unwrap_or(Value::Null))
        .map_err(|e| format!("{name}: {e}"))
}

fn opt_field<T: serde::de::DeserializeOwned + Default>(v: &Value, name: &str) -> Result<T, String> {
    match v.get(name) {
        None | Some(Value::Null) => Ok(T::default()),
        Some(x) => serde_json::from_value(x.clone()).map_err(|e| format!("{name}: {e}")),
    }
}

fn from<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T, String> {
    serde_json::from_value(v.clone()).map_err(|e| e.to_string())
}

pub fn parse_command(v: &Value) -> Result<Command, String> {
    let cmd: String = field(v, "cmd")?;
    Ok(match cmd.as_str() {
        "fund" => Command::Fund {
            account: field(v, "account")?,
            drops: field(v, "drops")?,
        },
        "trust" => Command::Trust {
            lender: field(v, "lender")?,
            borrower: field(v, "borrower")?,
            currency: field(v, "currency")?,
            limit: field(v, "limit")?,
        },
        "line" => {
            let row: crate::io::TrustRow = from(v)?;
            Command::Line(row.into())
        }
        "flags" => Command::Flags(from(v)?),
        "no_ripple" => Command::NoRipple {
            account: field(v, "account")?,
            peer: field(v, "peer")?,
            currency: field(v, "currency")?,
            flag: field(v, "flag")?,
        },
        "freeze" => Command::Freeze {
            a: field(v, "a")?,
            b: field(v, "b")?,
            currency: field(v, "currency")?,
            frozen: field(v, "frozen")?,
        },
        "pay" => Command::Pay(from(v)?),
        "offer" => Command::Offer {
            owner: field(v, "owner")?,
            gets: field(v, "gets")?,
            pays: field(v, "pays")?,
        },
        "cancel_offer" => Command::CancelOffer {
            owner: field(v, "owner")?,
            sequence: field(v, "sequence")?,
        },
        "write_check" => Command::WriteCheck {
            sender: field(v, "sender")?,
            receiver: field(v, "receiver")?,
            amount: field(v, "amount")?,
            expiration: field(v, "expiration")?,
        },
        "cash_check" => Command::CashCheck {
            id: field(v, "id")?,
            by: field(v, "by")?,
            value: field(v, "value")?,
            now: field(v, "now")?,
        },
        "cancel_check" => Command::CancelCheck {
            id: field(v, "id")?,
            by: field(v, "by")?,
            now: opt_field(v, "now")?,
        },
        "create_escrow" => Command::CreateEscrow {
            sender: field(v, "sender")?,
            receiver: field(v, "receiver")?,
            drops: field(v, "drops")?,
            release: field(v, "release")?,
            expiry: field(v, "expiry")?,
        },
        "finish_escrow" => Command::FinishEscrow {
            id: field(v, "id")?,
            now: field(v, "now")?,
        },
        "cancel_escrow" => Command::CancelEscrow {
            id: field(v, "id")?,
            now: field(v, "now")?,
        },
        other => return Err(format!("unknown command {other:?}")),
    })
}

fn parse_rate(text: &str) -> Result<Rational, RippleError> {
    let bad = || RippleError::InvalidCurrency(format!("transfer fee {text:?}"));
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let n: i128 = n.trim().parse().map_err(|_| bad())?;
    let d: i128 = d.trim().parse().map_err(|_| bad())?;
    if d <= 0 || n < 0 {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Fund { .. } => "fund",
        Command::Trust { .. } => "trust",
        Command::Line(_) => "line",
        Command::Flags(_) => "flags",
        Command::NoRipple { .. } => "no_ripple",
        Command::Freeze { .. } => "freeze",
        Command::Pay(_) => "pay",
        Command::Offer { .. } => "offer",
        Command::CancelOffer { .. } => "cancel_offer",
        Command::WriteCheck { .. } => "write_check",
        Command::CashCheck { .. } => "cash_check",
        Command::CancelCheck { .. } => "cancel_check",
        Command::CreateEscrow { .. } => "create_escrow",
        Command::FinishEscrow { .. } => "finish_escrow",
        Command::CancelEscrow { .. } => "cancel_escrow",
    }
}

/// Applies one command atomically.
pub fn apply_command(ledger: &mut RippleLedger, cmd: &Command) -> Result<Value, RippleError> {
    let snapshot = ledger.clone();
    let res = apply_inner(ledger, cmd);
    if res.is_err() {
        *ledger = snapshot;
    }
    res
}

fn apply_inner(ledger: &mut RippleLedger, cmd: &Command) -> Result<Value, RippleError> {
    use serde_json::json;
    Ok(match cmd {
        Command::Fund { account, drops } => {
            ledger.fund(account, *drops);
            json!({"balance": ledger.account(account).map(|a| a.xrp_balance.to_string())})
        }
        Command::Trust {
            lender,
            borrower,
            currency,
            limit,
        } => {
            let s = ledger.set_trust(lender, borrower, currency, *limit)?;
            json!({"deleted": s.is_none()})
        }
        Command::Line(state) => {
            ledger.import_state(state.clone())?;
            json!({})
        }
        Command::Flags(f) => {
            let rate = f.transfer_fee.as_deref().map(parse_rate).transpose()?;
            let a = ledger.account_mut(&f.account)?;
            if let Some(x) = f.default_ripple {
                a.default_ripple = x;
            }
            if let Some(x) = f.deposit_auth {
                a.deposit_auth = x;
            }
            if let Some(x) = f.require_dest {
                a.require_dest = x;
            }
            if let Some(r) = rate {
                a.transfer_fee_rate = r;
            }
            a.frozen_currencies.extend(f.freeze.iter().cloned());
            for c in &f.unfreeze {
                a.frozen_currencies.remove(c);
            }
            a.preauthorized.extend(f.preauthorize.iter().cloned());
            json!({})
        }
        Command::NoRipple {
            account,
            peer,
            currency,
            flag,
        } => {
            ledger.set_no_ripple(account, peer, currency, *flag)?;
            json!({})
        }
        Command::Freeze {
            a,
            b,
            currency,
            frozen,
        } => {
            ledger.set_frozen(a, b, currency, *frozen)?;
            json!({})
        }
        Command::Pay(spec) => {
            let out = ledger.pay(spec)?;
            json!({
                "path": out.path,
                "delivered": out.delivered.to_string(),
                "sent": out.sent.to_string(),
                "hops": out.hops.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
            })
        }
        Command::Offer { owner, gets, pays } => {
            let out =
                ledger.create_offer(owner, gets.asset()?, gets.value, pays.asset()?, pays.value)?;
            json!({
                "fills": out.matched.fills.iter().map(|f| json!({
                    "maker": f.maker,
                    "maker_sequence": f.maker_sequence,
                    "maker_gave": f.maker_gave.to_string(),
                    "taker_gave": f.taker_gave.to_string(),
                })).collect::<Vec<_>>(),
                "rested": out.rested,
            })
        }
        Command::CancelOffer { owner, sequence } => {
            ledger.cancel_offer(owner, *sequence)?;
            json!({})
        }
        Command::WriteCheck {
            sender,
            receiver,
            amount,
            expiration,
        } => {
            let id =
                ledger.write_check(sender, receiver, amount.asset()?, amount.value, *expiration)?;
            json!({"id": id})
        }
        Command::CashCheck { id, by, value, now } => {
            ledger.cash_check(*id, by, *value, *now)?;
            json!({"remaining": ledger.check(*id).map_or(0, |c| c.remaining).to_string()})
        }
        Command::CancelCheck { id, by, now } => {
            ledger.cancel_check(*id, by, *now)?;
            json!({})
        }
        Command::CreateEscrow {
            sender,
            receiver,
            drops,
            release,
            expiry,
        } => {
            let id = ledger.create_escrow(sender, receiver, *drops, *release, *expiry)?;
            json!({"id": id})
        }
        Command::FinishEscrow { id, now } => {
            let d = ledger.finish_escrow(*id, *now)?;
            json!({"drops": d.to_string()})
        }
        Command::CancelEscrow { id, now } => {
            let d = ledger.cancel_escrow(*id, *now)?;
            json!({"drops": d.to_string()})
        }
    })
}

/// Replays a script, logging every command whether or not it applied.
/// Malformed lines stop the replay.
pub fn replay(
    ledger: &mut RippleLedger,
    script: &str,
) -> Result<Vec<Event>, crate::io::RippleIoError> {
    let mut log = Vec::new();
    for (i, line) in script.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| crate::io::RippleIoError::Parse {
            line: i + 1,
            message,
        };
        let v: Value = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        let cmd = parse_command(&v).map_err(parse_err)?;
        let name = command_name(&cmd).to_string();
        let event = match apply_command(ledger, &cmd) {
            Ok(detail) => Event {
                line: i + 1,
                cmd: name,
                ok: true,
                detail,
            },
            Err(e) => Event {
                line: i + 1,
                cmd: name,
                ok: false,
                detail: serde_json::json!({"error": e.code(), "message": e.to_string()}),
            },
        };
        log.push(event);
    }
    Ok(log)
}
