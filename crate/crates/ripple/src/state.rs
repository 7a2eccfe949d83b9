//! Canonical trust-line records.

use serde::{Deserialize, Serialize};

/// Which side of a trust relationship holds the issued balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssuerSide {
    Low,
    High,
    /// Zero balance; limits alone say nothing reliable about the issuer.
    Indeterminate,
}

/// The single record joining two accounts in one currency.
///
/// `balance` is what `high` owes `low`. A negative balance means `low` owes
/// `high`. `low_limit` is how much `low` lets `high` owe it, and likewise for
/// `high_limit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RippleState {
    pub low: String,
    pub high: String,
    pub currency: String,
    pub balance: i128,
    pub low_limit: i128,
    pub high_limit: i128,
    pub low_no_ripple: bool,
    pub high_no_ripple: bool,
    pub frozen: bool,
    /// Sides whose owner reserve is charged for this record.
    pub low_reserve: bool,
    pub high_reserve: bool,
}

pub type StateKey = (String, String, String);

/// Orders an address pair as (low, high).
pub fn canonical_pair<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn state_key(a: &str, b: &str, currency: &str) -> StateKey {
    let (low, high) = canonical_pair(a, b);
    (low.to_string(), high.to_string(), currency.to_string())
}

impl RippleState {
    pub fn new(a: &str, b: &str, currency: &str) -> Self {
        let (low, high) = canonical_pair(a, b);
        RippleState {
            low: low.to_string(),
            high: high.to_string(),
            currency: currency.to_string(),
            balance: 0,
            low_limit: 0,
            high_limit: 0,
            low_no_ripple: true,
            high_no_ripple: true,
            frozen: false,
            low_reserve: false,
            high_reserve: false,
        }
    }

    pub fn key(&self) -> StateKey {
        (self.low.clone(), self.high.clone(), self.currency.clone())
    }

    pub fn involves(&self, who: &str) -> bool {
        self.low == who || self.high == who
    }

    pub fn other(&self, who: &str) -> &str {
        if self.low == who {
            &self.high
        } else {
            &self.low
        }
    }

    /// Net amount `debtor` owes `creditor`; negative when the debt runs the
    /// other way.
    pub fn owed(&self, debtor: &str, creditor: &str) -> i128 {
        debug_assert!(self.involves(debtor) && self.involves(creditor));
        if debtor == self.high && creditor == self.low {
            self.balance
        } else {
            -self.balance
        }
    }

    /// `debtor` now owes `creditor` `delta` more.
    pub fn shift(&mut self, debtor: &str, delta: i128) {
        if debtor == self.high {
            self.balance += delta;
        } else {
            self.balance -= delta;
        }
    }

    /// How much `lender` lets the other side owe it.
    pub fn limit_of(&self, lender: &str) -> i128 {
        if lender == self.low {
            self.low_limit
        } else {
            self.high_limit
        }
    }

    pub fn set_limit(&mut self, lender: &str, limit: i128) {
        if lender == self.low {
            self.low_limit = limit;
        } else {
            self.high_limit = limit;
        }
    }

    pub fn no_ripple(&self, who: &str) -> bool {
        if who == self.low {
            self.low_no_ripple
        } else {
            self.high_no_ripple
        }
    }

    pub fn set_no_ripple(&mut self, who: &str, flag: bool) {
        if who == self.low {
            self.low_no_ripple = flag;
        } else {
            self.high_no_ripple = flag;
        }
    }

    pub fn reserve_charged(&self, who: &str) -> bool {
        if who == self.low {
            self.low_reserve
        } else {
            self.high_reserve
        }
    }

    pub fn set_reserve_charged(&mut self, who: &str, flag: bool) {
        if who == self.low {
            self.low_reserve = flag;
        } else {
            self.high_reserve = flag;
        }
    }

    /// What `payer` can send to `receiver` over this line alone: the
    /// receiver's limit minus what the payer already owes it. Frozen lines
    /// only let the payer redeem what the receiver owes it.
    pub fn capacity(&self, payer: &str, receiver: &str) -> i128 {
        let owed = self.owed(payer, receiver);
        let raw = if self.frozen {
            -owed
        } else {
            self.limit_of(receiver) - owed
        };
        raw.max(0)
    }

    pub fn infer_issuer(&self) -> IssuerSide {
        match self.balance.signum() {
            1 => IssuerSide::High,
            -1 => IssuerSide::Low,
            _ => IssuerSide::Indeterminate,
        }
    }

    /// True when neither side has a limit or a balance left.
    pub fn is_default(&self) -> bool {
        self.balance == 0 && self.low_limit == 0 && self.high_limit == 0
    }
}

pub fn infer_issuer(state: &RippleState) -> IssuerSide {
    state.infer_issuer()
}
