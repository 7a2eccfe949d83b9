//! Random growth / milestone / snapshot driver that checks balance
//! conservation, confirmation monotonicity and DAG order after every step.

use ledgergraph_iota::{
    build_bundle, BundleInput, BundleOutput, IotaError, MixSponge, SecurityLevel, TangleState,
    TipStrategy,
};
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Default, Clone)]
pub struct CycleStats {
    pub bundles: usize,
    pub milestones: usize,
    pub snapshots: usize,
    pub confirmed: usize,
    pub invalidated: usize,
}

const ADDRS: [&str; 6] = ["AA", "AB", "AC", "AD", "AE", "AF"];

fn check(
    st: &TangleState<MixSponge>,
    supply: i128,
    before: &BTreeSet<String>,
) -> Result<(), String> {
    if st.total_balance() != supply {
        return Err(format!("supply {} != {}", st.total_balance(), supply));
    }
    if let Some((a, v)) = st.balances().iter().find(|(_, v)| **v < 0) {
        return Err(format!("{a} negative {v}"));
    }
    if let Some(h) = st.confirmed().intersection(st.invalid()).next() {
        return Err(format!("{h} confirmed and invalid"));
    }
    if let Some(h) = before.iter().find(|h| !st.is_confirmed(h)) {
        return Err(format!("{h} lost confirmation"));
    }
    let mut pos = BTreeMap::new();
    for (i, t) in st.transactions().enumerate() {
        if t.hash != st.genesis() {
            for p in [&t.trunk, &t.branch] {
                match pos.get(p) {
                    Some(&j) if j < i => {}
                    _ => return Err(format!("{} references later or unknown {p}", t.hash)),
                }
            }
        }
        pos.insert(t.hash.clone(), i);
    }
    Ok(())
}

pub fn run_cycles(seed: u64, cycles: usize) -> Result<CycleStats, String> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let funds: BTreeMap<String, i64> = ADDRS.iter().map(|a| (a.to_string(), 1_000)).collect();
    let mut st = TangleState::new(MixSponge::default(), "COO", funds).map_err(|e| e.to_string())?;
    st.difficulty = 1;
    let supply = st.total_balance();
    let mut stats = CycleStats::default();
    let mut seen_confirmed = st.confirmed().clone();
    let mut clock = 0u64;
    let err = |e: IotaError| e.to_string();
    for _ in 0..cycles {
        for _ in 0..rng.gen_range(1..=3) {
            clock += 1;
            let (trunk, branch) = st
                .select_tips(TipStrategy::Uniform, &mut rng)
                .map_err(err)?;
            if rng.gen_bool(0.25) {
                st.attach_message("MSG", "", clock, &trunk, &branch)
                    .map_err(err)?;
                continue;
            }
            let from = ADDRS[rng.gen_range(0..ADDRS.len())];
            let to = ADDRS[rng.gen_range(0..ADDRS.len())];
            let bal = st.balance(from);
            if bal == 0 {
                continue;
            }
            // often spends the whole balance, so competing spends conflict
            let amount = if rng.gen_bool(0.5) {
                bal
            } else {
                rng.gen_range(1..=bal)
            };
            let b = build_bundle(
                st.sponge(),
                &[BundleInput {
                    address: from.into(),
                    level: SecurityLevel::new(rng.gen_range(1..=2)).unwrap(),
                    amount,
                }],
                &[BundleOutput {
                    address: to.into(),
                    value: amount,
                }],
                "",
                clock,
            )
            .map_err(err)?;
            if b.value_sum() != 0 {
                return Err("bundle not zero-sum".into());
            }
            st.attach(&b, &trunk, &branch).map_err(err)?;
            stats.bundles += 1;
        }
        check(&st, supply, &seen_confirmed)?;

        clock += 1;
        let tips = st.valid_tips();
        let a = tips[rng.gen_range(0..tips.len())].clone();
        let b = tips[rng.gen_range(0..tips.len())].clone();
        let mut candidates = vec![(a.clone(), b.clone()), (a.clone(), a), (b.clone(), b)];
        if let Some(m) = st.milestones().last() {
            candidates.push((m.clone(), m.clone()));
        }
        candidates.push((st.genesis().to_string(), st.genesis().to_string()));
        let mut issued = false;
        for (t, br) in candidates {
            match st.issue_milestone(&t, &br, clock) {
                Ok(report) => {
                    stats.confirmed += report.confirmed.len();
                    stats.invalidated += report.invalidated.len();
                    issued = true;
                    break;
                }
                Err(IotaError::InconsistentMilestone(_)) | Err(IotaError::InvalidTx(_)) => continue,
                Err(e) => return Err(e.to_string()),
            }
        }
        if !issued {
            return Err("no consistent milestone".into());
        }
        stats.milestones += 1;
        check(&st, supply, &seen_confirmed)?;
        seen_confirmed = st.confirmed().clone();

        if rng.gen_bool(0.1) {
            let (bal, next) = st.snapshot();
            if bal != *next.balances() {
                return Err("snapshot changed balances".into());
            }
            st = next;
            stats.snapshots += 1;
            seen_confirmed = st.confirmed().clone();
            check(&st, supply, &seen_confirmed)?;
        }
    }
    Ok(stats)
}
