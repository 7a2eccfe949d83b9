//! Price-time priority order book for currency exchange offers.
//!
//! An offer's owner gives `gets` units of `gets_asset` (what a taker gets)
//! in exchange for `pays` units of `pays_asset` (what a taker pays). Crossing
//! offers fill at the resting offer's rate; the incoming offer keeps whatever
//! it saves.

use ledgergraph_core::IssuedCurrency;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Asset {
    Xrp,
    Issued(IssuedCurrency),
}

impl Asset {
    pub fn issued(code: &str, issuer: &str) -> Self {
        Asset::Issued(IssuedCurrency::new(code, issuer).expect("valid currency code"))
    }
}

impl fmt::Display for Asset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Asset::Xrp => f.write_str("XRP"),
            Asset::Issued(c) => write!(f, "{}.{}", c.code(), c.issuer()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Offer {
    pub owner: String,
    pub sequence: u64,
    pub gets_asset: Asset,
    pub gets: i128,
    pub pays_asset: Asset,
    pub pays: i128,
}

impl Offer {
    pub fn new(
        owner: &str,
        sequence: u64,
        gets_asset: Asset,
        gets: i128,
        pays_asset: Asset,
        pays: i128,
    ) -> Self {
        Offer {
            owner: owner.to_string(),
            sequence,
            gets_asset,
            gets,
            pays_asset,
            pays,
        }
    }

    /// Whether `self` resting in the book and `taker` cross.
    pub fn crosses(&self, taker: &Offer) -> bool {
        self.gets_asset == taker.pays_asset
            && self.pays_asset == taker.gets_asset
            && self.pays * taker.pays <= taker.gets * self.gets
    }

    /// Cheaper ask first (fewer `pays` per unit of `gets`), then older.
    fn priority(&self, other: &Offer) -> Ordering {
        (self.pays * other.gets)
            .cmp(&(other.pays * self.gets))
            .then(self.sequence.cmp(&other.sequence))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fill {
    pub maker: String,
    pub maker_sequence: u64,
    pub taker: String,
    /// Units of the maker's `gets_asset` moved to the taker.
    pub maker_gave: i128,
    /// Units of the taker's `gets_asset` moved to the maker.
    pub taker_gave: i128,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchResult {
    pub fills: Vec<Fill>,
    /// Part of the incoming offer left after matching, at its original rate.
    pub residual: Option<Offer>,
    /// Resting offers removed because they were used up.
    pub consumed: Vec<u64>,
}

fn ceil_div(a: i128, b: i128) -> i128 {
    (a + b - 1) / b
}

/// Amount of the maker's asset bought and its cost when up to `want` is
/// requested with at most `budget` to spend. `None` when nothing fits.
pub fn fill_amounts(maker: &Offer, want: i128, budget: i128) -> Option<(i128, i128)> {
    let cost_of = |q: i128| {
        if q == maker.gets {
            maker.pays
        } else {
            ceil_div(q * maker.pays, maker.gets)
        }
    };
    let mut q = want.min(maker.gets);
    let mut cost = cost_of(q);
    if cost > budget {
        q = budget * maker.gets / maker.pays;
        if q == 0 {
            return None;
        }
        cost = cost_of(q);
    }
    (q > 0).then_some((q, cost))
}

/// Residual of a partly filled incoming offer, kept at the original rate.
pub fn residual_offer(original: &Offer, give_left: i128, want_left: i128) -> Option<Offer> {
    if give_left <= 0 || want_left <= 0 {
        return None;
    }
    let gets = give_left.min(want_left * original.gets / original.pays);
    (gets > 0).then(|| Offer {
        gets,
        pays: want_left,
        ..original.clone()
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderBook {
    offers: Vec<Offer>,
}

impl OrderBook {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn offers(&self) -> &[Offer] {
        &self.offers
    }

    pub fn get(&self, sequence: u64) -> Option<&Offer> {
        self.offers.iter().find(|o| o.sequence == sequence)
    }

    /// Adds an offer without matching it.
    pub fn insert(&mut self, offer: Offer) {
        self.offers.push(offer);
    }

    pub fn cancel(&mut self, sequence: u64) -> Option<Offer> {
        let i = self.offers.iter().position(|o| o.sequence == sequence)?;
        Some(self.offers.remove(i))
    }

    /// Crossing resting offers, best first.
    pub fn crossing(&self, taker: &Offer) -> Vec<&Offer> {
        let mut v: Vec<&Offer> = self.offers.iter().filter(|m| m.crosses(taker)).collect();
        v.sort_by(|a, b| a.priority(b));
        v
    }

    /// Matches `taker` against the book. The residual is reported but not
    /// stored.
    pub fn match_offer(&mut self, taker: &Offer) -> MatchResult {
        let mut result = MatchResult::default();
        let mut give_left = taker.gets;
        let mut want_left = taker.pays;
        let order: Vec<u64> = self.crossing(taker).iter().map(|o| o.sequence).collect();
        for seq in order {
            if give_left == 0 || want_left == 0 {
                break;
            }
            let i = self
                .offers
                .iter()
                .position(|o| o.sequence == seq)
                .expect("listed above");
            let Some((q, cost)) = fill_amounts(&self.offers[i], want_left, give_left) else {
                break;
            };
            let m = &mut self.offers[i];
            let (g0, p0) = (m.gets, m.pays);
            m.gets -= q;
            // the remainder keeps the pre-fill rate, rounded against the taker
            m.pays = if m.gets == 0 {
                0
            } else {
                ceil_div(m.gets * p0, g0)
            };
            want_left -= q;
            give_left -= cost;
            result.fills.push(Fill {
                maker: m.owner.clone(),
                maker_sequence: m.sequence,
                taker: taker.owner.clone(),
                maker_gave: q,
                taker_gave: cost,
            });
            if m.gets <= 0 || m.pays <= 0 {
                result.consumed.push(seq);
                self.offers.remove(i);
            }
        }
        result.residual = residual_offer(taker, give_left, want_left);
        result
    }

    /// Matches and rests whatever is left.
    pub fn place(&mut self, taker: Offer) -> MatchResult {
        let result = self.match_offer(&taker);
        if let Some(r) = &result.residual {
            self.offers.push(r.clone());
        }
        result
    }

    /// True when two resting offers would trade with each other.
    pub fn is_crossed(&self) -> bool {
        self.offers.iter().any(|a| {
            self.offers
                .iter()
                .any(|b| a.sequence != b.sequence && a.crosses(b))
        })
    }
}
