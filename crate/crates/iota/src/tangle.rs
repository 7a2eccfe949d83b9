//! Tangle growth, tip selection, milestone confirmation, promotion and
//! snapshots.
//!
//! Bundles are attached as a trunk chain: each member's trunk is the next
//! member, the last member references the chosen trunk and branch tips, and
//! the head (index 0) becomes the new tip. Only heads may be referenced.

use crate::bundle::{build_bundle, Bundle, BundleOutput, TangleTransaction};
use crate::error::IotaError;
use crate::sponge::{hash, Sponge, HASH_TRITS, HASH_TRYTES};
use crate::trytes::{decode_trytes, encode_trytes, int_to_trits, pad_trytes, Trit};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub const DEFAULT_DIFFICULTY: usize = 3;
pub const DEFAULT_POW_BUDGET: u64 = 10_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TipStrategy {
    #[default]
    Uniform,
    Oldest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MilestoneReport {
    pub milestone: String,
    /// Newly confirmed, in attach order.
    pub confirmed: Vec<String>,
    /// Newly invalidated double spends and everything approving them.
    pub invalidated: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TangleState<S: Sponge> {
    sponge: S,
    coordinator: String,
    genesis: String,
    txs: BTreeMap<String, TangleTransaction>,
    seq: BTreeMap<String, u64>,
    order: Vec<String>,
    approvers: BTreeMap<String, BTreeSet<String>>,
    confirmed: BTreeSet<String>,
    invalid: BTreeSet<String>,
    balances: BTreeMap<String, i64>,
    milestones: Vec<String>,
    spent: BTreeSet<String>,
    epoch: u64,
    /// Confirmed spends from an address that had already been spent from.
    pub reuse_warnings: u64,
    pub difficulty: usize,
    pub pow_budget: u64,
}

/// Tx hash input: every field except the nonce. 7776 trits, exactly 32
/// blocks, so the nonce always lands in a block of its own.
fn hash_prefix(tx: &TangleTransaction) -> Result<Vec<Trit>, IotaError> {
    let mut t = decode_trytes(&tx.signature_fragment)?;
    t.extend(tx.essence_trits());
    t.extend(decode_trytes(&tx.bundle)?);
    t.extend(decode_trytes(&tx.trunk)?);
    t.extend(decode_trytes(&tx.branch)?);
    Ok(t)
}

pub fn transaction_hash<S: Sponge>(
    sponge: &S,
    tx: &TangleTransaction,
) -> Result<String, IotaError> {
    let mut t = hash_prefix(tx)?;
    t.extend(decode_trytes(&tx.nonce)?);
    encode_trytes(&hash(sponge, &t))
}

/// Searches nonces 0, 1, ... until the hash ends in `difficulty` zero trits.
pub fn do_pow<S: Sponge>(
    sponge: &S,
    tx: &mut TangleTransaction,
    difficulty: usize,
    budget: u64,
) -> Result<(), IotaError> {
    let mut base = sponge.clone();
    base.reset();
    base.absorb(&hash_prefix(tx)?);
    let mut out = vec![0; HASH_TRITS];
    for n in 0..budget.max(1) {
        let nonce = int_to_trits(n as i64, HASH_TRITS);
        let mut s = base.clone();
        s.absorb(&nonce);
        s.squeeze(&mut out);
        if out[HASH_TRITS - difficulty..].iter().all(|&t| t == 0) {
            tx.nonce = encode_trytes(&nonce)?;
            tx.hash = encode_trytes(&out)?;
            return Ok(());
        }
    }
    Err(IotaError::PowBudgetExceeded(budget))
}

fn null_hash() -> String {
    "9".repeat(HASH_TRYTES)
}

fn genesis_tx<S: Sponge>(sponge: &S, epoch: u64) -> TangleTransaction {
    let mut seed = decode_trytes("GENESIS").expect("trytes");
    seed.extend(int_to_trits(epoch as i64, 27));
    TangleTransaction {
        hash: encode_trytes(&hash(sponge, &seed)).expect("trits"),
        signature_fragment: "9".repeat(crate::derive::FRAGMENT_TRYTES),
        address: null_hash(),
        value: 0,
        tag: pad_trytes("GENESIS", crate::bundle::TAG_TRYTES).expect("trytes"),
        timestamp: 0,
        current_index: 0,
        last_index: 0,
        bundle: null_hash(),
        trunk: null_hash(),
        branch: null_hash(),
        nonce: null_hash(),
    }
}

impl<S: Sponge> TangleState<S> {
    /// Addresses shorter than 81 trytes are padded with '9'. The genesis
    /// balances fix the total supply.
    pub fn new(
        sponge: S,
        coordinator: &str,
        balances: BTreeMap<String, i64>,
    ) -> Result<Self, IotaError> {
        let mut padded = BTreeMap::new();
        for (a, v) in balances {
            if v != 0 {
                *padded.entry(pad_trytes(&a, HASH_TRYTES)?).or_insert(0) += v;
            }
        }
        let mut state = TangleState {
            coordinator: pad_trytes(coordinator, HASH_TRYTES)?,
            genesis: String::new(),
            txs: BTreeMap::new(),
            seq: BTreeMap::new(),
            order: Vec::new(),
            approvers: BTreeMap::new(),
            confirmed: BTreeSet::new(),
            invalid: BTreeSet::new(),
            balances: padded,
            milestones: Vec::new(),
            spent: BTreeSet::new(),
            epoch: 0,
            reuse_warnings: 0,
            difficulty: DEFAULT_DIFFICULTY,
            pow_budget: DEFAULT_POW_BUDGET,
            sponge,
        };
        state.plant_genesis();
        Ok(state)
    }

    fn plant_genesis(&mut self) {
        let g = genesis_tx(&self.sponge, self.epoch);
        self.genesis = g.hash.clone();
        self.confirmed.insert(g.hash.clone());
        self.insert(g);
    }

    fn insert(&mut self, tx: TangleTransaction) {
        let h = tx.hash.clone();
        let n = self.order.len() as u64;
        if h != self.genesis {
            for parent in [&tx.trunk, &tx.branch] {
                self.approvers
                    .entry(parent.clone())
                    .or_default()
                    .insert(h.clone());
            }
        }
        self.seq.insert(h.clone(), n);
        self.order.push(h.clone());
        self.txs.insert(h, tx);
    }

    pub fn sponge(&self) -> &S {
        &self.sponge
    }

    pub fn coordinator(&self) -> &str {
        &self.coordinator
    }

    pub fn genesis(&self) -> &str {
        &self.genesis
    }

    pub fn get(&self, hash: &str) -> Option<&TangleTransaction> {
        self.txs.get(hash)
    }

    /// Attach order; every tx comes after both transactions it references.
    pub fn transactions(&self) -> impl Iterator<Item = &TangleTransaction> {
        self.order.iter().map(|h| &self.txs[h])
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn approvers(&self, hash: &str) -> impl Iterator<Item = &String> {
        self.approvers.get(hash).into_iter().flatten()
    }

    /// Transactions nobody references yet.
    pub fn tips(&self) -> Vec<String> {
        self.order
            .iter()
            .filter(|h| !self.approvers.contains_key(*h))
            .cloned()
            .collect()
    }

    pub fn valid_tips(&self) -> Vec<String> {
        self.order
            .iter()
            .filter(|h| !self.approvers.contains_key(*h) && !self.invalid.contains(*h))
            .cloned()
            .collect()
    }

    pub fn confirmed(&self) -> &BTreeSet<String> {
        &self.confirmed
    }

    pub fn invalid(&self) -> &BTreeSet<String> {
        &self.invalid
    }

    pub fn is_confirmed(&self, hash: &str) -> bool {
        self.confirmed.contains(hash)
    }

    pub fn is_invalid(&self, hash: &str) -> bool {
        self.invalid.contains(hash)
    }

    pub fn balances(&self) -> &BTreeMap<String, i64> {
        &self.balances
    }

    pub fn balance(&self, address: &str) -> i64 {
        pad_trytes(address, HASH_TRYTES)
            .ok()
            .and_then(|a| self.balances.get(&a).copied())
            .unwrap_or(0)
    }

    pub fn total_balance(&self) -> i128 {
        self.balances.values().map(|&v| i128::from(v)).sum()
    }

    pub fn milestones(&self) -> &[String] {
        &self.milestones
    }

    pub fn spent_addresses(&self) -> &BTreeSet<String> {
        &self.spent
    }

    pub fn select_tips(
        &self,
        strategy: TipStrategy,
        rng: &mut impl Rng,
    ) -> Result<(String, String), IotaError> {
        let tips = self.valid_tips();
        match tips.len() {
            0 => Err(IotaError::NoValidTips),
            1 => Ok((tips[0].clone(), tips[0].clone())),
            n => match strategy {
                TipStrategy::Oldest => Ok((tips[0].clone(), tips[1].clone())),
                TipStrategy::Uniform => {
                    let a = rng.gen_range(0..n);
                    let mut b = rng.gen_range(0..n - 1);
                    if b >= a {
                        b += 1;
                    }
                    Ok((tips[a].clone(), tips[b].clone()))
                }
            },
        }
    }

    fn check_reference(&self, hash: &str) -> Result<(), IotaError> {
        let tx = self
            .txs
            .get(hash)
            .ok_or_else(|| IotaError::UnknownTx(hash.to_string()))?;
        if self.invalid.contains(hash) {
            return Err(IotaError::InvalidTx(hash.to_string()));
        }
        if !tx.is_head() {
            return Err(IotaError::NotBundleHead(hash.to_string()));
        }
        Ok(())
    }

    /// Verifies the bundle, chains and mines its members, then adds them.
    /// Returns member hashes in bundle order; the first is the new tip.
    pub fn attach(
        &mut self,
        bundle: &Bundle,
        trunk: &str,
        branch: &str,
    ) -> Result<Vec<String>, IotaError> {
        bundle.verify(&self.sponge)?;
        self.check_reference(trunk)?;
        self.check_reference(branch)?;
        let mut mined: Vec<TangleTransaction> = Vec::with_capacity(bundle.len());
        let mut next: Option<String> = None;
        for tx in bundle.transactions.iter().rev() {
            let mut tx = tx.clone();
            match &next {
                None => {
                    tx.trunk = trunk.to_string();
                    tx.branch = branch.to_string();
                }
                Some(h) => {
                    tx.trunk = h.clone();
                    tx.branch = trunk.to_string();
                }
            }
            do_pow(&self.sponge, &mut tx, self.difficulty, self.pow_budget)?;
            next = Some(tx.hash.clone());
            mined.push(tx);
        }
        mined.reverse();
        let hashes = mined.iter().map(|t| t.hash.clone()).collect();
        for tx in mined.into_iter().rev() {
            self.insert(tx);
        }
        Ok(hashes)
    }

    /// One zero-value transaction.
    pub fn attach_message(
        &mut self,
        address: &str,
        tag: &str,
        timestamp: u64,
        trunk: &str,
        branch: &str,
    ) -> Result<String, IotaError> {
        let b = build_bundle(
            &self.sponge,
            &[],
            &[BundleOutput {
                address: address.to_string(),
                value: 0,
            }],
            tag,
            timestamp,
        )?;
        Ok(self.attach(&b, trunk, branch)?.remove(0))
    }

    /// New zero-value tip approving `stuck`, so later transactions that pick
    /// it up approve `stuck` indirectly.
    pub fn promote(
        &mut self,
        stuck: &str,
        branch: &str,
        timestamp: u64,
    ) -> Result<String, IotaError> {
        self.check_reference(stuck)?;
        self.attach_message("PROMOTE", "PROMOTE", timestamp, stuck, branch)
    }

    /// Bundles reached from `roots` that are not yet confirmed, grouped by
    /// head and in attach order, plus the balances after applying them.
    #[allow(clippy::type_complexity)]
    fn plan_sweep(
        &self,
        roots: &[&str],
    ) -> Result<(Vec<String>, BTreeMap<String, i64>, Vec<String>), IotaError> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<String> = roots.iter().map(|r| r.to_string()).collect();
        while let Some(h) = queue.pop_front() {
            if self.confirmed.contains(&h) || !seen.insert(h.clone()) {
                continue;
            }
            if self.invalid.contains(&h) {
                return Err(IotaError::InvalidTx(h));
            }
            let tx = self
                .txs
                .get(&h)
                .ok_or_else(|| IotaError::UnknownTx(h.clone()))?;
            queue.push_back(tx.trunk.clone());
            queue.push_back(tx.branch.clone());
        }
        let mut reached: Vec<String> = seen.into_iter().collect();
        reached.sort_by_key(|h| self.seq[h]);

        let mut balances = self.balances.clone();
        let mut spenders = Vec::new();
        // heads are attached after their members, so head order is a
        // topological order of bundles
        for h in &reached {
            let head = &self.txs[h];
            if !head.is_head() {
                continue;
            }
            let members = self.bundle_members(h);
            let mut spends: BTreeMap<&str, i64> = BTreeMap::new();
            for m in &members {
                let tx = &self.txs[m];
                *balances.entry(tx.address.clone()).or_insert(0) += tx.value;
                if tx.value < 0 {
                    *spends.entry(tx.address.as_str()).or_insert(0) -= tx.value;
                }
            }
            for a in spends.keys() {
                if balances.get(*a).copied().unwrap_or(0) < 0 {
                    return Err(IotaError::InconsistentMilestone(a.to_string()));
                }
                spenders.push(a.to_string());
            }
        }
        balances.retain(|_, v| *v != 0);
        Ok((reached, balances, spenders))
    }

    /// Head first, following trunks through the bundle.
    pub fn bundle_members(&self, head: &str) -> Vec<String> {
        let mut out = vec![head.to_string()];
        let mut cur = &self.txs[head];
        while cur.current_index < cur.last_index {
            out.push(cur.trunk.clone());
            cur = &self.txs[&cur.trunk];
        }
        out
    }

    /// Mines and attaches a coordinator transaction, then confirms its
    /// ancestry. Nothing changes if the ancestry is inconsistent.
    pub fn issue_milestone(
        &mut self,
        trunk: &str,
        branch: &str,
        timestamp: u64,
    ) -> Result<MilestoneReport, IotaError> {
        self.check_reference(trunk)?;
        self.check_reference(branch)?;
        self.plan_sweep(&[trunk, branch])?;
        let coordinator = self.coordinator.clone();
        let h = self.attach_message(&coordinator, "MILESTONE", timestamp, trunk, branch)?;
        self.apply_milestone(&h)
    }

    /// Confirms everything the milestone approves directly or indirectly.
    /// Afterwards any pending bundle spending from an address a confirmed
    /// bundle already drained is invalidated together with all its approvers.
    pub fn apply_milestone(&mut self, milestone: &str) -> Result<MilestoneReport, IotaError> {
        let tx = self
            .txs
            .get(milestone)
            .ok_or_else(|| IotaError::UnknownTx(milestone.to_string()))?;
        if tx.address != self.coordinator {
            return Err(IotaError::NotCoordinator(tx.address.clone()));
        }
        let (reached, balances, spenders) = self.plan_sweep(&[milestone])?;
        for a in spenders {
            if !self.spent.insert(a) {
                self.reuse_warnings += 1;
            }
        }
        self.balances = balances;
        self.confirmed.extend(reached.iter().cloned());
        if !self.milestones.iter().any(|m| m == milestone) {
            self.milestones.push(milestone.to_string());
        }
        let invalidated = self.invalidate_conflicts();
        Ok(MilestoneReport {
            milestone: milestone.to_string(),
            confirmed: reached,
            invalidated,
        })
    }

    fn invalidate_conflicts(&mut self) -> Vec<String> {
        let mut roots = Vec::new();
        for h in &self.order {
            let tx = &self.txs[h];
            if !tx.is_head() || self.confirmed.contains(h) || self.invalid.contains(h) {
                continue;
            }
            let members = self.bundle_members(h);
            let mut spends: BTreeMap<&str, i64> = BTreeMap::new();
            for m in &members {
                let t = &self.txs[m];
                if t.value < 0 {
                    *spends.entry(t.address.as_str()).or_insert(0) -= t.value;
                }
            }
            let conflict = spends.iter().any(|(a, need)| {
                self.spent.contains(*a) && self.balances.get(*a).copied().unwrap_or(0) < *need
            });
            if conflict {
                roots.extend(members);
            }
        }
        let mut out = BTreeSet::new();
        let mut queue: VecDeque<String> = roots.into();
        while let Some(h) = queue.pop_front() {
            if self.invalid.contains(&h) || !out.insert(h.clone()) {
                continue;
            }
            queue.extend(self.approvers(&h).cloned());
        }
        debug_assert!(out.iter().all(|h| !self.confirmed.contains(h)));
        self.invalid.extend(out.iter().cloned());
        let mut out: Vec<String> = out.into_iter().collect();
        out.sort_by_key(|h| self.seq[h]);
        out
    }

    /// Keeps the address balances and spent-address list, drops all history
    /// and pending transactions and starts again from a fresh genesis.
    pub fn snapshot(&self) -> (BTreeMap<String, i64>, TangleState<S>) {
        let mut next = TangleState {
            sponge: self.sponge.clone(),
            coordinator: self.coordinator.clone(),
            genesis: String::new(),
            txs: BTreeMap::new(),
            seq: BTreeMap::new(),
            order: Vec::new(),
            approvers: BTreeMap::new(),
            confirmed: BTreeSet::new(),
            invalid: BTreeSet::new(),
            balances: self.balances.clone(),
            milestones: Vec::new(),
            spent: self.spent.clone(),
            epoch: self.epoch + 1,
            reuse_warnings: self.reuse_warnings,
            difficulty: self.difficulty,
            pow_budget: self.pow_budget,
        };
        next.plant_genesis();
        (self.balances.clone(), next)
    }
}
