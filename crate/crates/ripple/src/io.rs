//! Trust-graph CSV, payment JSONL, and graph views of a credit ledger.

use crate::ledger::{RippleError, RippleLedger};
use crate::payment::{PaymentOutcome, PaymentSpec};
use crate::state::RippleState;
use ledgergraph_core::{Edge, EdgeList, Hyperedge, Hypergraph, Rational};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RippleIoError {
    #[error("trust csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Ledger(#[from] RippleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RippleIoError {
    pub fn code(&self) -> &'static str {
        match self {
            RippleIoError::Csv(e) if e.is_io_error() => "ripple.io",
            RippleIoError::Csv(_) | RippleIoError::Parse { .. } => "ripple.parse",
            RippleIoError::Ledger(e) => e.code(),
            RippleIoError::Io(_) => "ripple.io",
        }
    }

    pub fn is_io(&self) -> bool {
        self.code() == "ripple.io"
    }
}

fn yes() -> bool {
    true
}

/// One row of a trust-graph CSV. The flag columns are optional on input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrustRow {
    pub low: String,
    pub high: String,
    pub currency: String,
    pub balance: i128,
    pub low_limit: i128,
    pub high_limit: i128,
    #[serde(default = "yes")]
    pub low_no_ripple: bool,
    #[serde(default = "yes")]
    pub high_no_ripple: bool,
    #[serde(default)]
    pub frozen: bool,
}

impl From<TrustRow> for RippleState {
    fn from(r: TrustRow) -> Self {
        RippleState {
            low: r.low,
            high: r.high,
            currency: r.currency,
            balance: r.balance,
            low_limit: r.low_limit,
            high_limit: r.high_limit,
            low_no_ripple: r.low_no_ripple,
            high_no_ripple: r.high_no_ripple,
            frozen: r.frozen,
            low_reserve: r.low_limit > 0,
            high_reserve: r.high_limit > 0,
        }
    }
}

pub fn read_trust_csv(reader: impl Read) -> Result<Vec<TrustRow>, RippleIoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    rdr.deserialize()
        .map(|r| r.map_err(RippleIoError::from))
        .collect()
}

/// Builds a ledger from a trust-graph CSV. Accounts start without XRP.
pub fn load_trust_csv(
    reader: impl Read,
    ledger: &mut RippleLedger,
) -> Result<usize, RippleIoError> {
    let rows = read_trust_csv(reader)?;
    let n = rows.len();
    for r in rows {
        ledger.import_state(r.into())?;
    }
    Ok(n)
}

pub fn write_trust_csv(ledger: &RippleLedger, writer: impl Write) -> Result<(), RippleIoError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record([
        "low",
        "high",
        "currency",
        "balance",
        "low_limit",
        "high_limit",
        "low_no_ripple",
        "high_no_ripple",
        "frozen",
    ])?;
    for s in ledger.states() {
        w.write_record([
            s.low.clone(),
            s.high.clone(),
            s.currency.clone(),
            s.balance.to_string(),
            s.low_limit.to_string(),
            s.high_limit.to_string(),
            s.low_no_ripple.to_string(),
            s.high_no_ripple.to_string(),
            s.frozen.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_payments(text: &str) -> Result<Vec<PaymentSpec>, RippleIoError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| RippleIoError::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Directed multigraph of trust: one lender-to-borrower edge per side of a
/// record with a positive limit, weighted by that limit. Records with no
/// limits left show up as a zero-weight low-to-high edge.
pub fn build_trust_graph(ledger: &RippleLedger) -> EdgeList {
    let mut g = EdgeList::new(true, true);
    for s in ledger.states() {
        let attrs = |e: Edge| {
            e.attr("currency", &s.currency)
                .attr("balance", s.balance)
                .attr("low_limit", s.low_limit)
                .attr("high_limit", s.high_limit)
        };
        let mut any = false;
        for (lender, borrower, limit) in [
            (&s.low, &s.high, s.low_limit),
            (&s.high, &s.low, s.high_limit),
        ] {
            if limit > 0 {
                any = true;
                g.push(attrs(
                    Edge::new(lender.as_str(), borrower.as_str())
                        .weighted(Rational::from_integer(limit)),
                ))
                .expect("multigraph");
            }
        }
        if !any {
            g.push(attrs(
                Edge::new(s.low.as_str(), s.high.as_str()).weighted(Rational::from_integer(0)),
            ))
            .expect("multigraph");
        }
    }
    for a in ledger.accounts() {
        g.add_node(a.address.as_str());
    }
    g
}

/// One edge per settled payment from sender to destination, weighted by the
/// delivered amount.
pub fn build_payment_graph(payments: &[(PaymentSpec, PaymentOutcome)]) -> EdgeList {
    let mut g = EdgeList::new(true, true);
    for (spec, out) in payments {
        g.push(
            Edge::new(spec.account.as_str(), spec.destination.as_str())
                .weighted(Rational::from_integer(out.delivered))
                .attr("currency", &spec.currency)
                .attr("sent", out.sent)
                .attr("hops", out.path.len() - 1)
                .attr("path", out.path.join(";")),
        )
        .expect("multigraph");
    }
    g
}

/// Each payment path as a hyperedge, with the amount carried by every hop.
pub fn build_path_hypergraph(payments: &[(PaymentSpec, PaymentOutcome)]) -> Hypergraph {
    let mut h = Hypergraph::new();
    for (i, (spec, out)) in payments.iter().enumerate() {
        let steps = out
            .hops
            .iter()
            .enumerate()
            .map(|(j, amt)| {
                BTreeMap::from([
                    ("from".to_string(), out.path[j].clone()),
                    ("to".to_string(), out.path[j + 1].clone()),
                    ("amount".to_string(), amt.to_string()),
                    ("currency".to_string(), spec.currency.clone()),
                ])
            })
            .collect();
        if let Ok(e) = Hyperedge::new(out.path.clone(), format!("payment{i}"), steps) {
            h.push(e);
        }
    }
    h
}
