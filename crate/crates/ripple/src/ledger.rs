use crate::deferred::{Check, Escrow};
use crate::offers::{Asset, MatchResult, Offer, OrderBook};
use crate::state::{state_key, RippleState, StateKey};
use ledgergraph_core::Rational;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const DROPS_PER_XRP: i128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RippleError {
    #[error("unknown account {0}")]
    UnknownAccount(String),
    #[error("{0} cannot extend trust to itself")]
    SelfTrust(String),
    #[error("amounts and limits must not be negative")]
    Negative,
    #[error("invalid currency code {0:?}")]
    InvalidCurrency(String),
    #[error("{account} holds {has} drops, reserve would be {needed}")]
    ReserveUnmet {
        account: String,
        has: i128,
        needed: i128,
    },
    #[error("{account} would keep {left} drops, below its reserve of {reserve}")]
    BelowReserve {
        account: String,
        left: i128,
        reserve: i128,
    },
    #[error("payment of {drops} drops cannot create {account}: below base reserve")]
    ReceiverUnfunded { account: String, drops: i128 },
    #[error("partial payments cannot fund a new account")]
    PartialCannotFund,
    #[error("{receiver} requires deposit authorization; {sender} is not authorized")]
    DepositUnauthorized { sender: String, receiver: String },
    #[error("no path from {from} to {to} can carry the payment")]
    NoPath { from: String, to: String },
    #[error("the given paths have dried up")]
    DriedUp,
    #[error("nothing can be delivered")]
    ZeroDeliverable,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("{owner} does not hold what the offer sells")]
    UnfundedOffer { owner: String },
    #[error("an offer must exchange two different assets")]
    SameAsset,
    #[error("unknown {kind} {id}")]
    UnknownObject { kind: &'static str, id: u64 },
    #[error("{0} is not a party to this object")]
    NotParty(String),
    #[error("a check cannot be written to oneself")]
    SelfCheck,
    #[error("check expired")]
    Expired,
    #[error("cash amount {amount} exceeds the remaining {remaining}")]
    ExceedsFace { amount: i128, remaining: i128 },
    #[error("{0} cannot fund the check at cashing time")]
    SenderUnfunded(String),
    #[error("escrow not yet releasable")]
    NotYetReleasable,
    #[error("escrow still active until its expiry")]
    EscrowActive,
    #[error("escrows hold XRP only")]
    EscrowNotXrp,
}

impl RippleError {
    pub fn code(&self) -> &'static str {
        match self {
            RippleError::UnknownAccount(_) => "ripple.unknown-account",
            RippleError::SelfTrust(_) => "ripple.self-trust",
            RippleError::Negative => "ripple.negative-amount",
            RippleError::InvalidCurrency(_) => "ripple.invalid-currency",
            RippleError::ReserveUnmet { .. } => "ripple.reserve-unmet",
            RippleError::BelowReserve { .. } => "ripple.below-reserve",
            RippleError::ReceiverUnfunded { .. } => "ripple.receiver-below-reserve",
            RippleError::PartialCannotFund => "ripple.partial-cannot-fund",
            RippleError::DepositUnauthorized { .. } => "ripple.deposit-unauthorized",
            RippleError::NoPath { .. } => "ripple.no-path",
            RippleError::DriedUp => "ripple.dried-up-path",
            RippleError::ZeroDeliverable => "ripple.zero-deliverable",
            RippleError::InvalidPath(_) => "ripple.invalid-path",
            RippleError::UnfundedOffer { .. } => "ripple.unfunded-offer",
            RippleError::SameAsset => "ripple.same-asset",
            RippleError::UnknownObject { .. } => "ripple.unknown-object",
            RippleError::NotParty(_) => "ripple.not-party",
            RippleError::SelfCheck => "ripple.self-check",
            RippleError::Expired => "ripple.expired",
            RippleError::ExceedsFace { .. } => "ripple.exceeds-face",
            RippleError::SenderUnfunded(_) => "ripple.sender-unfunded-at-cash",
            RippleError::NotYetReleasable => "ripple.not-yet-releasable",
            RippleError::EscrowActive => "ripple.escrow-active",
            RippleError::EscrowNotXrp => "ripple.escrow-not-xrp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RippleConfig {
    pub base_reserve: i128,
    pub owner_reserve: i128,
    pub max_path_depth: usize,
}

impl Default for RippleConfig {
    fn default() -> Self {
        RippleConfig {
            base_reserve: 20 * DROPS_PER_XRP,
            owner_reserve: 5 * DROPS_PER_XRP,
            max_path_depth: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RippleAccount {
    pub address: String,
    pub xrp_balance: i128,
    pub owned_objects: u32,
    pub deposit_auth: bool,
    pub preauthorized: BTreeSet<String>,
    /// New trust lines of this account start with rippling allowed on its side.
    pub default_ripple: bool,
    /// Fee kept when the account relays a payment, as a fraction of the amount passed on.
    pub transfer_fee_rate: Rational,
    pub frozen_currencies: BTreeSet<String>,
    /// Accepted and stored, never enforced.
    pub require_dest: bool,
}

impl RippleAccount {
    pub fn new(address: &str, xrp_balance: i128) -> Self {
        RippleAccount {
            address: address.to_string(),
            xrp_balance,
            owned_objects: 0,
            deposit_auth: false,
            preauthorized: BTreeSet::new(),
            default_ripple: false,
            transfer_fee_rate: Rational::from_integer(0),
            frozen_currencies: BTreeSet::new(),
            require_dest: false,
        }
    }
}

pub(crate) fn check_currency(code: &str) -> Result<(), RippleError> {
    let n = code.chars().count();
    if (n == 3 || n == 40) && code != "XRP" {
        Ok(())
    } else {
        Err(RippleError::InvalidCurrency(code.to_string()))
    }
}

/// Whole ledger state. Cloning gives a snapshot; equality compares everything.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RippleLedger {
    pub config: RippleConfig,
    pub(crate) accounts: BTreeMap<String, RippleAccount>,
    pub(crate) states: BTreeMap<StateKey, RippleState>,
    pub(crate) book: OrderBook,
    pub(crate) checks: BTreeMap<u64, Check>,
    pub(crate) escrows: BTreeMap<u64, Escrow>,
    pub(crate) next_sequence: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfferOutcome {
    pub matched: MatchResult,
    /// Sequence of the resting remainder, if one was stored.
    pub rested: Option<u64>,
}

impl RippleLedger {
    pub fn new(config: RippleConfig) -> Self {
        RippleLedger {
            config,
            next_sequence: 1,
            ..Default::default()
        }
    }

    pub(crate) fn next_seq(&mut self) -> u64 {
        let s = self.next_sequence.max(1);
        self.next_sequence = s + 1;
        s
    }

    pub fn fund(&mut self, address: &str, drops: i128) {
        self.accounts
            .entry(address.to_string())
            .or_insert_with(|| RippleAccount::new(address, 0))
            .xrp_balance += drops;
    }

    pub fn ensure_account(&mut self, address: &str) -> &mut RippleAccount {
        self.accounts
            .entry(address.to_string())
            .or_insert_with(|| RippleAccount::new(address, 0))
    }

    pub fn account(&self, address: &str) -> Option<&RippleAccount> {
        self.accounts.get(address)
    }

    pub fn account_mut(&mut self, address: &str) -> Result<&mut RippleAccount, RippleError> {
        self.accounts
            .get_mut(address)
            .ok_or_else(|| RippleError::UnknownAccount(address.to_string()))
    }

    pub fn accounts(&self) -> impl Iterator<Item = &RippleAccount> {
        self.accounts.values()
    }

    pub fn states(&self) -> impl Iterator<Item = &RippleState> {
        self.states.values()
    }

    pub fn state(&self, a: &str, b: &str, currency: &str) -> Option<&RippleState> {
        self.states.get(&state_key(a, b, currency))
    }

    pub fn book(&self) -> &OrderBook {
        &self.book
    }

    pub fn reserve(&self, address: &str) -> i128 {
        let owned = self.accounts.get(address).map_or(0, |a| a.owned_objects);
        self.config.base_reserve + i128::from(owned) * self.config.owner_reserve
    }

    fn require(&self, address: &str) -> Result<&RippleAccount, RippleError> {
        self.accounts
            .get(address)
            .ok_or_else(|| RippleError::UnknownAccount(address.to_string()))
    }

    /// Charges one more owned object to `address`, checking it can afford the reserve.
    pub(crate) fn charge_object(&mut self, address: &str) -> Result<(), RippleError> {
        let needed = self.reserve(address) + self.config.owner_reserve;
        let acct = self.account_mut(address)?;
        if acct.xrp_balance < needed {
            return Err(RippleError::ReserveUnmet {
                account: address.to_string(),
                has: acct.xrp_balance,
                needed,
            });
        }
        acct.owned_objects += 1;
        Ok(())
    }

    pub(crate) fn release_object(&mut self, address: &str) {
        if let Some(a) = self.accounts.get_mut(address) {
            a.owned_objects = a.owned_objects.saturating_sub(1);
        }
    }

    /// Inserts a record as-is, creating missing accounts with no XRP. Used for
    /// ingesting existing trust graphs; no reserve is charged.
    pub fn import_state(&mut self, state: RippleState) -> Result<(), RippleError> {
        check_currency(&state.currency)?;
        if state.low == state.high {
            return Err(RippleError::SelfTrust(state.low));
        }
        let mut state = state;
        if state.low > state.high {
            std::mem::swap(&mut state.low, &mut state.high);
            std::mem::swap(&mut state.low_limit, &mut state.high_limit);
            std::mem::swap(&mut state.low_no_ripple, &mut state.high_no_ripple);
            std::mem::swap(&mut state.low_reserve, &mut state.high_reserve);
            state.balance = -state.balance;
        }
        self.ensure_account(&state.low.clone());
        self.ensure_account(&state.high.clone());
        self.states.insert(state.key(), state);
        Ok(())
    }

    /// `lender` lets `borrower` owe it up to `limit` in `currency`.
    pub fn set_trust(
        &mut self,
        lender: &str,
        borrower: &str,
        currency: &str,
        limit: i128,
    ) -> Result<Option<&RippleState>, RippleError> {
        if lender == borrower {
            return Err(RippleError::SelfTrust(lender.to_string()));
        }
        if limit < 0 {
            return Err(RippleError::Negative);
        }
        check_currency(currency)?;
        self.require(lender)?;
        self.require(borrower)?;
        let key = state_key(lender, borrower, currency);
        let charged = self
            .states
            .get(&key)
            .is_some_and(|s| s.reserve_charged(lender));
        if limit > 0 && !charged {
            self.charge_object(lender)?;
        }
        let default_ripple =
            |l: &Self, who: &str| l.accounts.get(who).is_some_and(|a| a.default_ripple);
        let (lr, br) = (default_ripple(self, lender), default_ripple(self, borrower));
        let state = self.states.entry(key.clone()).or_insert_with(|| {
            let mut s = RippleState::new(lender, borrower, currency);
            s.set_no_ripple(lender, !lr);
            s.set_no_ripple(borrower, !br);
            s
        });
        state.set_limit(lender, limit);
        if limit > 0 {
            state.set_reserve_charged(lender, true);
        } else if charged {
            state.set_reserve_charged(lender, false);
        }
        let remove = state.is_default();
        let release_other = remove && state.reserve_charged(borrower);
        if limit == 0 && charged {
            self.release_object(lender);
        }
        if remove {
            if release_other {
                self.release_object(borrower);
            }
            self.states.remove(&key);
            return Ok(None);
        }
        Ok(self.states.get(&key))
    }

    pub fn set_no_ripple(
        &mut self,
        who: &str,
        other: &str,
        currency: &str,
        flag: bool,
    ) -> Result<(), RippleError> {
        let s = self
            .states
            .get_mut(&state_key(who, other, currency))
            .ok_or_else(|| RippleError::NoPath {
                from: who.to_string(),
                to: other.to_string(),
            })?;
        s.set_no_ripple(who, flag);
        Ok(())
    }

    pub fn set_frozen(
        &mut self,
        a: &str,
        b: &str,
        currency: &str,
        frozen: bool,
    ) -> Result<(), RippleError> {
        let s = self
            .states
            .get_mut(&state_key(a, b, currency))
            .ok_or_else(|| RippleError::NoPath {
                from: a.to_string(),
                to: b.to_string(),
            })?;
        s.frozen = frozen;
        Ok(())
    }

    /// Net amount `debtor` owes `creditor` in `currency`.
    pub fn owed(&self, debtor: &str, creditor: &str, currency: &str) -> i128 {
        self.state(debtor, creditor, currency)
            .map_or(0, |s| s.owed(debtor, creditor))
    }

    pub(crate) fn shift_debt(&mut self, debtor: &str, creditor: &str, currency: &str, delta: i128) {
        let key = state_key(debtor, creditor, currency);
        let s = self
            .states
            .entry(key)
            .or_insert_with(|| RippleState::new(debtor, creditor, currency));
        s.shift(debtor, delta);
    }

    /// Sends XRP directly. No trust line is needed.
    pub fn pay_xrp(
        &mut self,
        sender: &str,
        receiver: &str,
        drops: i128,
        partial: bool,
    ) -> Result<i128, RippleError> {
        if drops <= 0 {
            return Err(RippleError::Negative);
        }
        let acct = self.require(sender)?;
        let reserve = self.reserve(sender);
        let left = acct.xrp_balance - drops;
        if left < reserve {
            return Err(RippleError::BelowReserve {
                account: sender.to_string(),
                left,
                reserve,
            });
        }
        match self.accounts.get(receiver) {
            None if partial => return Err(RippleError::PartialCannotFund),
            None if drops < self.config.base_reserve => {
                return Err(RippleError::ReceiverUnfunded {
                    account: receiver.to_string(),
                    drops,
                })
            }
            Some(r)
                if r.deposit_auth && !r.preauthorized.contains(sender) && sender != receiver =>
            {
                return Err(RippleError::DepositUnauthorized {
                    sender: sender.to_string(),
                    receiver: receiver.to_string(),
                })
            }
            _ => {}
        }
        self.account_mut(sender)?.xrp_balance -= drops;
        self.ensure_account(receiver).xrp_balance += drops;
        Ok(drops)
    }

    /// How much of `asset` `who` can spend right now. Issuers hold an
    /// unlimited supply of their own currency.
    pub fn holding(&self, who: &str, asset: &Asset) -> i128 {
        match asset {
            Asset::Xrp => self
                .accounts
                .get(who)
                .map_or(0, |a| (a.xrp_balance - self.reserve(who)).max(0)),
            Asset::Issued(c) if c.issuer() == who => i128::MAX / 4,
            Asset::Issued(c) => self.owed(c.issuer(), who, c.code()).max(0),
        }
    }

    /// Moves `amount` of `asset` from one holder to another through the
    /// issuer, ignoring trust limits.
    pub(crate) fn move_asset(&mut self, from: &str, to: &str, asset: &Asset, amount: i128) {
        match asset {
            Asset::Xrp => {
                self.ensure_account(from).xrp_balance -= amount;
                self.ensure_account(to).xrp_balance += amount;
            }
            Asset::Issued(c) => {
                let issuer = c.issuer().to_string();
                if from != issuer {
                    self.shift_debt(&issuer, from, c.code(), -amount);
                }
                if to != issuer {
                    let key = state_key(&issuer, to, c.code());
                    if !self.states.contains_key(&key) {
                        // holding an issued currency needs a line to its issuer
                        self.ensure_account(to).owned_objects += 1;
                        let mut s = RippleState::new(&issuer, to, c.code());
                        s.set_reserve_charged(to, true);
                        self.states.insert(key, s);
                    }
                    self.shift_debt(&issuer, to, c.code(), amount);
                }
            }
        }
    }

    /// Places an exchange offer: matches it against crossing offers, moves
    /// the traded assets, and stores any remainder.
    pub fn create_offer(
        &mut self,
        owner: &str,
        gets_asset: Asset,
        gets: i128,
        pays_asset: Asset,
        pays: i128,
    ) -> Result<OfferOutcome, RippleError> {
        if gets <= 0 || pays <= 0 {
            return Err(RippleError::Negative);
        }
        if gets_asset == pays_asset {
            return Err(RippleError::SameAsset);
        }
        self.require(owner)?;
        if self.holding(owner, &gets_asset) < gets {
            return Err(RippleError::UnfundedOffer {
                owner: owner.to_string(),
            });
        }
        let seq = self.next_seq();
        let taker = Offer::new(owner, seq, gets_asset, gets, pays_asset, pays);

        // resting offers whose owners no longer hold what they sell are dropped
        let stale: Vec<(u64, String)> = self
            .book
            .crossing(&taker)
            .into_iter()
            .filter(|m| self.holding(&m.owner, &m.gets_asset) < m.gets)
            .map(|m| (m.sequence, m.owner.clone()))
            .collect();
        for (s, o) in stale {
            self.book.cancel(s);
            self.release_object(&o);
        }

        let matched = self.book.match_offer(&taker);
        for f in &matched.fills {
            self.move_asset(&f.maker, owner, &taker.pays_asset, f.maker_gave);
            self.move_asset(owner, &f.maker, &taker.gets_asset, f.taker_gave);
        }
        for s in &matched.consumed {
            // consumed offers are gone from the book; find owners from fills
            if let Some(f) = matched.fills.iter().find(|f| f.maker_sequence == *s) {
                let m = f.maker.clone();
                self.release_object(&m);
            }
        }
        let mut rested = None;
        if let Some(r) = &matched.residual {
            // below the reserve an account can trade but cannot leave offers behind
            if self.charge_object(owner).is_ok() {
                self.book.insert(r.clone());
                rested = Some(r.sequence);
            }
        }
        Ok(OfferOutcome { matched, rested })
    }

    pub fn cancel_offer(&mut self, owner: &str, sequence: u64) -> Result<Offer, RippleError> {
        match self.book.get(sequence) {
            Some(o) if o.owner == owner => {}
            Some(_) => return Err(RippleError::NotParty(owner.to_string())),
            None => {
                return Err(RippleError::UnknownObject {
                    kind: "offer",
                    id: sequence,
                })
            }
        }
        self.release_object(owner);
        Ok(self.book.cancel(sequence).expect("checked"))
    }

    /// Per-account net position in `currency`: what others owe it minus what it owes.
    pub fn net_positions(&self, currency: &str) -> BTreeMap<String, i128> {
        let mut net = BTreeMap::new();
        for s in self.states.values().filter(|s| s.currency == currency) {
            *net.entry(s.low.clone()).or_insert(0) += s.balance;
            *net.entry(s.high.clone()).or_insert(0) -= s.balance;
        }
        net
    }

    pub fn total_xrp(&self) -> i128 {
        self.accounts.values().map(|a| a.xrp_balance).sum::<i128>()
            + self.escrows.values().map(|e| e.drops).sum::<i128>()
    }
}
