//! Path-based payments over trust lines.

use crate::ledger::{RippleError, RippleLedger};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Candidate paths explored before pathfinding gives up on a dense graph.
const PATH_SEARCH_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaymentSpec {
    pub account: String,
    pub destination: String,
    /// `XRP` (value in drops) or an issued currency code.
    pub currency: String,
    #[serde(default)]
    pub issuer: Option<String>,
    pub value: i128,
    #[serde(default)]
    pub send_max: Option<i128>,
    #[serde(default)]
    pub send_max_issuer: Option<String>,
    #[serde(default)]
    pub paths: Vec<Vec<String>>,
    #[serde(default)]
    pub no_direct_ripple: bool,
    #[serde(default)]
    pub partial: bool,
}

impl PaymentSpec {
    pub fn new(account: &str, destination: &str, currency: &str, value: i128) -> Self {
        PaymentSpec {
            account: account.to_string(),
            destination: destination.to_string(),
            currency: currency.to_string(),
            issuer: None,
            value,
            send_max: None,
            send_max_issuer: None,
            paths: Vec::new(),
            no_direct_ripple: false,
            partial: false,
        }
    }

    pub fn partial(mut self) -> Self {
        self.partial = true;
        self
    }

    pub fn via(mut self, path: &[&str]) -> Self {
        self.paths
            .push(path.iter().map(|s| s.to_string()).collect());
        self
    }

    /// The simplest route: straight to the destination, or through the
    /// named issuer of the delivered amount.
    pub fn default_path(&self) -> Vec<String> {
        match &self.issuer {
            Some(i) if *i != self.account && *i != self.destination => {
                vec![self.account.clone(), i.clone(), self.destination.clone()]
            }
            _ => vec![self.account.clone(), self.destination.clone()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaymentOutcome {
    pub path: Vec<String>,
    pub delivered: i128,
    /// What the sender paid, including relay fees.
    pub sent: i128,
    /// Amount carried by each hop, sender side first.
    pub hops: Vec<i128>,
}

impl RippleLedger {
    fn neighbours(&self, currency: &str) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for s in self.states.values().filter(|s| s.currency == currency) {
            adj.entry(&s.low).or_default().insert(&s.high);
            adj.entry(&s.high).or_default().insert(&s.low);
        }
        adj
    }

    fn frozen_by_party(&self, a: &str, b: &str, currency: &str) -> bool {
        [a, b].iter().any(|x| {
            self.accounts
                .get(*x)
                .is_some_and(|acc| acc.frozen_currencies.contains(currency))
        })
    }

    /// What `payer` can send `receiver` on their line, accounting for
    /// freezes. Rippling restrictions are applied per path.
    pub fn line_capacity(&self, payer: &str, receiver: &str, currency: &str) -> i128 {
        let Some(s) = self.state(payer, receiver, currency) else {
            return 0;
        };
        if self.frozen_by_party(payer, receiver, currency) && !s.frozen {
            let mut f = s.clone();
            f.frozen = true;
            return f.capacity(payer, receiver);
        }
        s.capacity(payer, receiver)
    }

    /// Whether `node` may relay between `prev` and `next`: both lines must be
    /// live and neither may carry `node`'s no-ripple flag.
    fn may_ripple(&self, prev: &str, node: &str, next: &str, currency: &str) -> bool {
        [prev, next].iter().all(|other| {
            self.state(node, other, currency).is_some_and(|s| {
                !s.no_ripple(node) && !s.frozen && !self.frozen_by_party(node, other, currency)
            })
        })
    }

    /// Per-hop capacities along `path`, with relays that may not ripple at 0.
    pub fn path_capacities(&self, path: &[String], currency: &str) -> Vec<i128> {
        (0..path.len().saturating_sub(1))
            .map(|i| {
                let relay_ok =
                    i == 0 || self.may_ripple(&path[i - 1], &path[i], &path[i + 1], currency);
                if relay_ok {
                    self.line_capacity(&path[i], &path[i + 1], currency)
                } else {
                    0
                }
            })
            .collect()
    }

    /// Amount each hop must carry to deliver `delivered`: every relay keeps
    /// its transfer fee, rounded down, out of what it receives.
    fn hop_amounts(&self, path: &[String], delivered: i128) -> Vec<i128> {
        let n = path.len() - 1;
        let mut hops = vec![0; n];
        let mut out = delivered;
        for j in (0..n).rev() {
            hops[j] = out;
            if j > 0 {
                let rate = self.accounts.get(&path[j]).map(|a| a.transfer_fee_rate);
                if let Some(r) = rate {
                    out += (out * r.numer()) / r.denom();
                }
            }
        }
        hops
    }

    fn fits(
        &self,
        caps: &[i128],
        path: &[String],
        delivered: i128,
        send_max: Option<i128>,
    ) -> bool {
        let hops = self.hop_amounts(path, delivered);
        hops.iter().zip(caps).all(|(h, c)| h <= c) && send_max.is_none_or(|m| hops[0] <= m)
    }

    /// Largest amount up to `requested` that `path` can deliver.
    pub fn deliverable(
        &self,
        path: &[String],
        currency: &str,
        requested: i128,
        send_max: Option<i128>,
    ) -> i128 {
        if path.len() < 2 || requested <= 0 {
            return 0;
        }
        let caps = self.path_capacities(path, currency);
        if self.fits(&caps, path, requested, send_max) {
            return requested;
        }
        let (mut lo, mut hi) = (0, requested);
        while lo < hi {
            let mid = lo + (hi - lo + 1) / 2;
            if self.fits(&caps, path, mid, send_max) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    fn satisfies_fields(spec: &PaymentSpec, path: &[String]) -> bool {
        let n = path.len();
        if n < 2 || path[0] != spec.account || path[n - 1] != spec.destination {
            return false;
        }
        let distinct: BTreeSet<&String> = path.iter().collect();
        if distinct.len() != n {
            return false;
        }
        if let Some(i) = &spec.send_max_issuer {
            if *i != spec.account && path[1] != *i {
                return false;
            }
        }
        if let Some(i) = &spec.issuer {
            if *i != spec.destination && *i != spec.account && path[n - 2] != *i {
                return false;
            }
        }
        true
    }

    /// Every simple path from sender to destination within the depth limit,
    /// each hop with some capacity, honouring the payment's field constraints.
    fn enumerate_paths(&self, spec: &PaymentSpec) -> Vec<Vec<String>> {
        let adj = self.neighbours(&spec.currency);
        let mut found = Vec::new();
        let mut stack: Vec<Vec<&str>> = vec![vec![spec.account.as_str()]];
        let mut explored = 0;
        while let Some(path) = stack.pop() {
            explored += 1;
            if explored > PATH_SEARCH_LIMIT {
                break;
            }
            let last = *path.last().expect("non-empty");
            if last == spec.destination {
                found.push(path.iter().map(|s| s.to_string()).collect());
                continue;
            }
            if path.len() > self.config.max_path_depth {
                continue;
            }
            for next in adj.get(last).into_iter().flatten().rev() {
                if path.contains(next) {
                    continue;
                }
                if self.line_capacity(last, next, &spec.currency) == 0 {
                    continue;
                }
                if path.len() >= 2
                    && !self.may_ripple(path[path.len() - 2], last, next, &spec.currency)
                {
                    continue;
                }
                let mut p = path.clone();
                p.push(next);
                stack.push(p);
            }
        }
        found
    }

    /// Candidate paths for a payment, shortest first then by node ids, each
    /// able to carry the full amount (or anything at all for partial payments).
    pub fn find_paths(&self, spec: &PaymentSpec) -> Result<Vec<Vec<String>>, RippleError> {
        let default = spec.default_path();
        let mut candidates: Vec<Vec<String>> = if spec.paths.is_empty() {
            self.enumerate_paths(spec)
        } else {
            let mut v = spec.paths.clone();
            v.push(default.clone());
            v
        };
        if spec.no_direct_ripple {
            candidates.retain(|p| *p != default);
        }
        candidates.retain(|p| Self::satisfies_fields(spec, p));
        candidates.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        candidates.dedup();
        let need = if spec.partial { 1 } else { spec.value };
        candidates.retain(|p| self.deliverable(p, &spec.currency, need, spec.send_max) >= need);
        if candidates.is_empty() {
            return Err(if spec.paths.is_empty() {
                RippleError::NoPath {
                    from: spec.account.clone(),
                    to: spec.destination.clone(),
                }
            } else {
                RippleError::DriedUp
            });
        }
        Ok(candidates)
    }

    /// Shifts debt along `path`. Either every hop moves or nothing does.
    pub fn execute_rippling(
        &mut self,
        path: &[String],
        currency: &str,
        amount: i128,
        partial: bool,
        send_max: Option<i128>,
    ) -> Result<PaymentOutcome, RippleError> {
        if path.len() < 2 {
            return Err(RippleError::InvalidPath("fewer than two nodes".into()));
        }
        let possible = self.deliverable(path, currency, amount, send_max);
        let delivered = if possible == amount {
            amount
        } else if partial && possible > 0 {
            possible
        } else if partial {
            return Err(RippleError::ZeroDeliverable);
        } else {
            return Err(RippleError::DriedUp);
        };
        let hops = self.hop_amounts(path, delivered);
        for (i, h) in hops.iter().enumerate() {
            self.shift_debt(&path[i], &path[i + 1], currency, *h);
        }
        Ok(PaymentOutcome {
            path: path.to_vec(),
            delivered,
            sent: hops[0],
            hops,
        })
    }

    /// Settles a payment. XRP moves directly; issued currencies ripple along
    /// the first candidate path that carries the whole amount. Partial
    /// payments that no path carries in full use the path delivering most.
    pub fn pay(&mut self, spec: &PaymentSpec) -> Result<PaymentOutcome, RippleError> {
        if spec.value <= 0 {
            return Err(RippleError::Negative);
        }
        if spec.currency == "XRP" {
            let d = self.pay_xrp(&spec.account, &spec.destination, spec.value, spec.partial)?;
            return Ok(PaymentOutcome {
                path: vec![spec.account.clone(), spec.destination.clone()],
                delivered: d,
                sent: d,
                hops: vec![d],
            });
        }
        crate::ledger::check_currency(&spec.currency)?;
        for who in [&spec.account, &spec.destination] {
            if self.account(who).is_none() {
                return Err(RippleError::UnknownAccount(who.clone()));
            }
        }
        let dest = self.account(&spec.destination).expect("checked");
        if dest.deposit_auth && !dest.preauthorized.contains(&spec.account) {
            return Err(RippleError::DepositUnauthorized {
                sender: spec.account.clone(),
                receiver: spec.destination.clone(),
            });
        }
        let candidates = self.find_paths(spec)?;
        let full = candidates
            .iter()
            .find(|p| self.deliverable(p, &spec.currency, spec.value, spec.send_max) == spec.value);
        let chosen = match full {
            Some(p) => p.clone(),
            None => {
                // partial: first path with the largest deliverable amount
                let mut best = &candidates[0];
                let mut best_amt = 0;
                for p in &candidates {
                    let d = self.deliverable(p, &spec.currency, spec.value, spec.send_max);
                    if d > best_amt {
                        best = p;
                        best_amt = d;
                    }
                }
                best.clone()
            }
        };
        self.execute_rippling(
            &chosen,
            &spec.currency,
            spec.value,
            spec.partial,
            spec.send_max,
        )
    }
}
