//! End-to-end acceptance checks. Runs without the libtest harness so every
//! check prints its own PASS/FAIL line with its runtime and limit.

#[path = "../../ripple/tests/support/offer_oracle.rs"]
mod offer_oracle;

#[path = "../../iota/tests/support/cycles.rs"]
mod cycles;

use ledgergraph_core::rng::labeled_rng;
use ledgergraph_core::{Rational, TxId};
use ledgergraph_iota::{
    address_from_seed, decode_trytes, derive_private_key, derive_subseed, encode_trytes,
    replay_tangle, MixSponge, SecurityLevel, Seed, TangleScenario, TipStrategy,
};
use ledgergraph_ripple::{
    load_trust_csv, replay, Asset, Offer, OrderBook, PaymentSpec, RippleConfig, RippleLedger,
};
use ledgergraph_utxo::*;
use rand::Rng;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

const BTC: i128 = 100_000_000;

type Check = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Check);

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn utxo_fixture(name: &str) -> Ledger {
    load_ledger(
        BufReader::new(File::open(fixture(name)).unwrap()),
        LedgerConfig::default(),
    )
    .unwrap()
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

macro_rules! ensure_eq {
    ($a:expr, $b:expr) => {{
        let (a, b) = (&$a, &$b);
        if a != b {
            return Err(format!("{} = {:?}, expected {:?}", stringify!($a), a, b));
        }
    }};
}

fn address_weights() -> Check {
    let l = utxo_fixture("utxo_weight_example.jsonl");
    let g =
        build_address_graph(&l, 1, 1, AddressGraphOptions::default()).map_err(|e| e.to_string())?;
    let tx = l.transactions().find(|t| !t.coinbase).unwrap();
    let inputs: Vec<i128> = tx
        .inputs
        .iter()
        .map(|i| l.output(i).unwrap().value)
        .collect();
    let out_total: i128 = tx.outputs.iter().map(|o| o.value).sum();
    // sender's input times the receiver's share of the outputs
    let oracle = |s: usize, t: &str| {
        let paid: i128 = tx
            .outputs
            .iter()
            .filter(|o| o.address.raw() == t)
            .map(|o| o.value)
            .sum();
        Rational::new(inputs[s] * paid, out_total)
    };
    let w = |s: &str, t: &str| {
        g.edges
            .iter()
            .find(|e| e.source == s && e.target == t)
            .map(|e| e.weight)
    };
    ensure_eq!(w("a2", "a3"), Some(Rational::new(27, 29) * BTC));
    ensure_eq!(w("a2", "a4"), Some(Rational::new(60, 29) * BTC));
    let a2 = tx
        .inputs
        .iter()
        .position(|i| l.output(i).unwrap().address.raw() == "a2")
        .unwrap();
    ensure_eq!(w("a2", "a3"), Some(oracle(a2, "a3")));
    ensure_eq!(w("a2", "a4"), Some(oracle(a2, "a4")));
    Ok("w(a2->a3) = 27/29 BTC, w(a2->a4) = 60/29 BTC".into())
}

fn chainlet_matrices() -> Check {
    let l = utxo_fixture("utxo_chainlets.jsonl");
    let snap = Snapshot::from_ledger(&l, 1, 1).map_err(|e| e.to_string())?;
    let c = BTC / 100;
    let o = occurrence_matrix(&snap, 3, false).map_err(|e| e.to_string())?;
    let a = amount_matrix(&snap, 3, false).map_err(|e| e.to_string())?;
    ensure_eq!(
        o.rows(),
        vec![vec![0u64, 2, 0], vec![1, 1, 1], vec![1, 0, 0]]
    );
    ensure_eq!(
        a.rows(),
        vec![
            vec![0, 358 * c, 0],
            vec![190 * c, 175 * c, 300 * c],
            vec![280 * c, 0, 0]
        ]
    );
    // the folding walkthrough starts from its own 3x3 matrices
    let o = ChainletMatrix::<u64>::from_rows(&[vec![0, 2, 1], vec![1, 1, 1], vec![1, 0, 3]])
        .map_err(|e| e.to_string())?;
    let a = ChainletMatrix::<i128>::from_rows(&[
        vec![0, 358 * c, 50 * c],
        vec![190 * c, 175 * c, 300 * c],
        vec![280 * c, 0, 400 * c],
    ])
    .map_err(|e| e.to_string())?;
    ensure_eq!(
        o.fold(2).map_err(|e| e.to_string())?.rows(),
        vec![vec![0u64, 3], vec![2, 5]]
    );
    ensure_eq!(
        a.fold(2).map_err(|e| e.to_string())?.rows(),
        vec![vec![0, 408 * c], vec![470 * c, 875 * c]]
    );
    Ok("N=3 matrices and N=2 fold exact".into())
}

fn fold_consistency() -> Check {
    let mut rng = labeled_rng(3, "acceptance.fold");
    let mut comparisons = 0usize;
    for s in 0..200 {
        let n_txs = rng.gen_range(0..80);
        let txs: Vec<SnapshotTx> = (0..n_txs)
            .map(|i| {
                let x = rng.gen_range(0..=30);
                let y = rng.gen_range(1..=30);
                SnapshotTx::shape(format!("s{s}t{i}"), x, y, rng.gen_range(0..10_000_000))
            })
            .collect();
        let snap = Snapshot::from_txs(txs);
        let coinbase = s % 2 == 0;
        let direct: Vec<_> = (1..=25)
            .map(|n| {
                (
                    occurrence_matrix(&snap, n, coinbase).unwrap(),
                    amount_matrix(&snap, n, coinbase).unwrap(),
                )
            })
            .collect();
        for n in 2..=25 {
            let (o, a) = &direct[n - 1];
            for smaller in 1..n {
                let (wo, wa) = &direct[smaller - 1];
                ensure!(
                    &o.fold(smaller).unwrap() == wo,
                    "occurrence fold {n}->{smaller} differs on snapshot {s}"
                );
                ensure!(
                    &a.fold(smaller).unwrap() == wa,
                    "amount fold {n}->{smaller} differs on snapshot {s}"
                );
                comparisons += 1;
            }
        }
    }
    Ok(format!("{comparisons} matrix pairs equal"))
}

fn utxo_conservation() -> Check {
    let cfg = UtxoGenConfig {
        transactions: 100_000,
        txs_per_block: 500,
        ..UtxoGenConfig::default()
    };
    let blocks = generate_blocks(&cfg, 4).map_err(|e| e.to_string())?;
    let mut ledger = Ledger::new(cfg.ledger_config());
    for b in blocks.clone() {
        ledger.apply_block(b).map_err(|e| e.to_string())?;
    }

    // brute-force replay: a plain map of live outputs
    let mut live: HashMap<OutPoint, i128> = HashMap::new();
    let mut spending = 0usize;
    for (b, report) in blocks.iter().zip(ledger.reports()) {
        let fees: HashMap<&TxId, i128> = report.tx_fees.iter().map(|(id, f)| (id, *f)).collect();
        for tx in &b.transactions {
            let out: i128 = tx.outputs.iter().map(|o| o.value).sum();
            if !tx.coinbase {
                let mut inp = 0;
                for i in &tx.inputs {
                    inp += live
                        .remove(i)
                        .ok_or_else(|| format!("{} spends missing {i:?}", tx.id.as_str()))?;
                }
                let fee = *fees.get(&tx.id).ok_or("fee not reported")?;
                ensure!(
                    fee >= 0 && inp == out + fee,
                    "{}: in {inp} != out {out} + fee {fee}",
                    tx.id.as_str()
                );
                spending += 1;
            }
            for (k, o) in tx.outputs.iter().enumerate() {
                live.insert(tx.outpoint(k as u32), o.value);
            }
        }
    }
    ensure_eq!(spending, 100_000);
    let keys: HashSet<OutPoint> = live.keys().cloned().collect();
    ensure!(&keys == ledger.unspent_outpoints(), "UTXO sets differ");
    ensure_eq!(live.values().sum::<i128>(), ledger.unspent_value());
    Ok(format!("{spending} spends, {} unspent outputs", keys.len()))
}

fn ripple_payments() -> Check {
    let mut l = RippleLedger::new(RippleConfig::default());
    load_trust_csv(
        File::open(fixture("ripple_payment_trust.csv")).unwrap(),
        &mut l,
    )
    .map_err(|e| e.to_string())?;
    let spec = PaymentSpec::new("Sarah", "Bob", "USD", 50);
    let out = l.pay(&spec).map_err(|e| e.to_string())?;
    ensure_eq!(out.delivered, 50);
    ensure_eq!(
        (
            l.owed("Sarah", "Tim", "USD"),
            l.owed("Tim", "John", "USD"),
            l.owed("John", "Bob", "USD")
        ),
        (50, 75, 65)
    );
    ensure_eq!(l.line_capacity("Tim", "John", "USD"), 25);
    let snapshot = l.clone();
    ensure!(l.pay(&spec).is_err(), "repeat payment of 50 accepted");
    ensure!(l == snapshot, "failed payment changed the ledger");
    let out = l.pay(&spec.partial()).map_err(|e| e.to_string())?;
    ensure_eq!(out.delivered, 25);

    // the same story as a script
    let mut s = RippleLedger::new(RippleConfig::default());
    let log = replay(&mut s, &read("ripple_payment_script.jsonl")).map_err(|e| e.to_string())?;
    let pays: Vec<bool> = log
        .iter()
        .filter(|e| e.cmd == "pay")
        .map(|e| e.ok)
        .collect();
    ensure_eq!(pays, vec![true, false, true]);
    Ok("50/75/65 after first payment, repeat rejected, partial delivers 25".into())
}

fn asset(i: u8) -> Asset {
    match i {
        0 => Asset::Xrp,
        1 => Asset::issued("USD", "gw"),
        _ => Asset::issued("EUR", "gw"),
    }
}

fn offer_matching() -> Check {
    let (usd, eur) = (asset(1), asset(2));
    let mut book = OrderBook::new();
    book.place(Offer::new("o1", 1, eur.clone(), 7, usd.clone(), 10));
    let r = book.place(Offer::new("o2", 2, usd.clone(), 10, eur.clone(), 7));
    ensure_eq!(
        r.fills
            .iter()
            .map(|f| (f.maker_gave, f.taker_gave))
            .collect::<Vec<_>>(),
        vec![(7, 10)]
    );
    ensure!(
        book.offers().is_empty() && r.residual.is_none(),
        "full cross left offers behind"
    );

    let mut l = RippleLedger::new(RippleConfig::default());
    let log = replay(&mut l, &read("ripple_offers.jsonl")).map_err(|e| e.to_string())?;
    ensure!(log.iter().all(|e| e.ok), "offer script rejected a command");
    ensure_eq!((l.holding("taker", &eur), l.holding("taker", &usd)), (7, 1));
    ensure_eq!(l.holding("maker", &usd), 9);

    let mut rng = labeled_rng(6, "acceptance.offers");
    for stream in 0..1000 {
        let mut book = OrderBook::new();
        let mut oracle: Vec<Offer> = Vec::new();
        for seq in 0..rng.gen_range(1..40u64) {
            let (x, y) = [(0, 1), (1, 2), (0, 2)][rng.gen_range(0..3)];
            let (ga, pa) = if rng.gen_bool(0.5) {
                (asset(x), asset(y))
            } else {
                (asset(y), asset(x))
            };
            let o = Offer::new(
                &format!("o{seq}"),
                seq + 1,
                ga,
                rng.gen_range(1..60),
                pa,
                rng.gen_range(1..60),
            );
            let got = book.place(o.clone());
            let want = offer_oracle::oracle_place(&mut oracle, &o);
            let got: Vec<_> = got
                .fills
                .iter()
                .map(|f| (f.maker_sequence, f.maker_gave, f.taker_gave))
                .collect();
            let want: Vec<_> = want
                .iter()
                .map(|f| (f.maker_sequence, f.maker_gave, f.taker_gave))
                .collect();
            ensure!(
                got == want,
                "stream {stream} offer {seq}: fills {got:?} vs {want:?}"
            );
            let mut a = book.offers().to_vec();
            a.sort_by_key(|o| o.sequence);
            oracle.sort_by_key(|o| o.sequence);
            ensure!(
                a == oracle,
                "stream {stream} offer {seq}: residual books differ"
            );
            ensure!(!book.is_crossed(), "stream {stream}: book crossed");
        }
    }
    Ok("both examples exact, 1000 streams match the brute-force matcher".into())
}

fn iota_pipeline() -> Check {
    let mut chars = BTreeSet::new();
    for a in -1..=1i8 {
        for b in -1..=1i8 {
            for c in -1..=1i8 {
                let s = encode_trytes(&[a, b, c]).map_err(|e| e.to_string())?;
                ensure_eq!(decode_trytes(&s).map_err(|e| e.to_string())?, vec![a, b, c]);
                chars.insert(s);
            }
        }
    }
    ensure_eq!(chars.len(), 27);
    let alphabet: Vec<char> = "9ABCDEFGHIJKLMNOPQRSTUVWXYZ".chars().collect();
    let mut rng = labeled_rng(7, "acceptance.trytes");
    for _ in 0..10_000 {
        let len = rng.gen_range(0..100);
        let s: String = (0..len).map(|_| alphabet[rng.gen_range(0..27)]).collect();
        let back = encode_trytes(&decode_trytes(&s).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure!(back == s, "round trip changed {s}");
    }

    let sponge = MixSponge::default();
    let seed = Seed::random(&mut rng);
    let level = SecurityLevel::new(2).map_err(|e| e.to_string())?;
    let sub = derive_subseed(&sponge, &seed, 0).map_err(|e| e.to_string())?;
    ensure_eq!(
        derive_private_key(&sponge, &sub, level)
            .map_err(|e| e.to_string())?
            .len(),
        4374
    );
    ensure_eq!(
        address_from_seed(&sponge, &seed, 0, level, false)
            .map_err(|e| e.to_string())?
            .len(),
        81
    );
    ensure_eq!(
        address_from_seed(&sponge, &seed, 0, level, true)
            .map_err(|e| e.to_string())?
            .len(),
        90
    );

    let mut sc = TangleScenario::new(MixSponge::default(), TipStrategy::Oldest, 0);
    let log = replay_tangle(&mut sc, &read("iota_bundle_shapes.jsonl")).map_err(|e| e.to_string())?;
    ensure!(log.iter().all(|e| e.ok), "bundle script rejected a command");
    let st = sc.state().map_err(|e| e.to_string())?;
    let size = |label: &str| st.bundle_members(sc.hash_of(label).unwrap()).len();
    ensure_eq!((size("left"), size("right")), (5, 4));

    let mut sc = TangleScenario::new(MixSponge::default(), TipStrategy::Oldest, 0);
    let log = replay_tangle(&mut sc, &read("iota_exchange_bundle.jsonl")).map_err(|e| e.to_string())?;
    ensure!(
        log.iter().all(|e| e.ok),
        "exchange script rejected a command"
    );
    let st = sc.state().map_err(|e| e.to_string())?;
    let sum: i64 = st
        .bundle_members(sc.hash_of("exchange").unwrap())
        .iter()
        .map(|h| st.get(h).unwrap().value)
        .sum();
    ensure_eq!(sum, 0);
    Ok("codec, 4374-tryte key, 81/90-tryte addresses, bundles of 5 and 4, zero-sum bundle".into())
}

fn tangle_consensus() -> Check {
    let mut sc = TangleScenario::new(MixSponge::default(), TipStrategy::Oldest, 0);
    replay_tangle(&mut sc, &read("iota_double_spend.jsonl")).map_err(|e| e.to_string())?;
    let st = sc.state().map_err(|e| e.to_string())?;
    ensure!(
        st.is_confirmed(sc.hash_of("t1").unwrap()),
        "t1 not confirmed"
    );
    ensure_eq!(sc.invalid_labels(), vec!["t2", "x1", "x2", "x3"]);
    // independent closure: t2's bundle plus everything approving it
    let mut tainted: HashSet<String> = st
        .bundle_members(sc.hash_of("t2").unwrap())
        .into_iter()
        .collect();
    for t in st.transactions() {
        if tainted.contains(&t.trunk) || tainted.contains(&t.branch) {
            tainted.insert(t.hash.clone());
        }
    }
    let invalid: HashSet<String> = st.invalid().iter().cloned().collect();
    ensure!(
        invalid == tainted,
        "invalid set {invalid:?} vs approvers of t2 {tainted:?}"
    );

    let stats = cycles::run_cycles(8, 100)?;
    ensure_eq!(stats.milestones, 100);
    Ok(format!(
        "t1 confirmed, {} invalid; 100 cycles ({} bundles, {} snapshots) conserve supply",
        invalid.len(),
        stats.bundles,
        stats.snapshots
    ))
}

fn privacy_overlays() -> Check {
    use ShieldKind::{T, Z};
    let mut sides: Vec<Vec<ShieldKind>> = Vec::new();
    for len in 1..=4 {
        for mask in 0..1u32 << len {
            sides.push(
                (0..len)
                    .map(|b| if mask >> b & 1 == 1 { Z } else { T })
                    .collect(),
            );
        }
    }
    let mut seen = HashSet::new();
    for i in &sides {
        for o in &sides {
            let kind = |s: &[ShieldKind]| {
                let set: BTreeSet<bool> = s.iter().map(|k| *k == Z).collect();
                match set.len() {
                    2 => None,
                    _ => set.into_iter().next(),
                }
            };
            let want = match (kind(i), kind(o)) {
                (Some(false), Some(false)) => ZcashClass::Public,
                (Some(false), Some(true)) => ZcashClass::Shielding,
                (Some(true), Some(false)) => ZcashClass::Deshielding,
                (Some(true), Some(true)) => ZcashClass::Private,
                _ => ZcashClass::Mixed,
            };
            ensure_eq!(classify_zcash_tx(i, o), Ok(want));
            seen.insert(want);
        }
    }
    ensure_eq!(seen.len(), 5);

    let cfg = UtxoGenConfig {
        transactions: 400,
        txs_per_block: 50,
        rings: true,
        ..UtxoGenConfig::default()
    };
    let ledger = generate_ledger(&cfg, 9).map_err(|e| e.to_string())?;
    let mut rings = 0;
    for tx in ledger.transactions().filter(|t| !t.coinbase) {
        let r = tx.ring_inputs.as_ref().ok_or("spend without rings")?;
        ensure_eq!(r.len(), tx.inputs.len());
        for (ring, real) in r.iter().zip(&tx.inputs) {
            let distinct: HashSet<&OutPoint> = ring.members.iter().collect();
            ensure!(
                ring.members.len() == 11 && distinct.len() == 11,
                "ring of {} distinct",
                distinct.len()
            );
            ensure!(ring.members.contains(real), "ring misses its real spend");
            rings += 1;
        }
    }
    Ok(format!(
        "{} kind pairs classified, {rings} rings of 11",
        sides.len() * sides.len()
    ))
}

fn split_bias() -> Check {
    let cfg = UtxoGenConfig {
        transactions: 10_000,
        split_bias: 0.75,
        ..UtxoGenConfig::default()
    };
    let ledger = generate_ledger(&cfg, 10).map_err(|e| e.to_string())?;
    let (mut splits, mut total) = (0, 0);
    for tx in ledger.transactions().filter(|t| !t.coinbase) {
        total += 1;
        if tx.inputs.len() < tx.outputs.len() {
            splits += 1;
        }
    }
    let share = splits as f64 / total as f64;
    let within = (share - 0.75).abs() <= 0.02;
    ensure!(within, "split share {share:.4} over {total} txs");
    Ok(format!(
        "split share {:.2}% over {total} txs; full-chain statistics not reproducible offline",
        share * 100.0
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            1,
            "address edge weights",
            Duration::from_secs(1),
            address_weights,
        ),
        (
            2,
            "chainlet matrices",
            Duration::from_secs(1),
            chainlet_matrices,
        ),
        (
            3,
            "fold consistency",
            Duration::from_secs(60),
            fold_consistency,
        ),
        (
            4,
            "UTXO conservation",
            Duration::from_secs(30),
            utxo_conservation,
        ),
        (
            5,
            "credit payments",
            Duration::from_secs(1),
            ripple_payments,
        ),
        (6, "offer matching", Duration::from_secs(10), offer_matching),
        (7, "ternary pipeline", Duration::from_secs(5), iota_pipeline),
        (
            8,
            "tangle consensus",
            Duration::from_secs(30),
            tangle_consensus,
        ),
        (
            9,
            "privacy overlays",
            Duration::from_secs(1),
            privacy_overlays,
        ),
        (
            10,
            "synthetic split bias",
            Duration::from_secs(5),
            split_bias,
        ),
    ];
    let mut failed = 0;
    for (n, name, limit, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        let verdict = match result {
            Ok(detail) if took <= limit => format!("PASS {name}: {detail}"),
            Ok(_) => format!("FAIL {name}: over the time limit"),
            Err(e) => format!("FAIL {name}: {e}"),
        };
        if verdict.starts_with("FAIL") {
            failed += 1;
        }
        println!(
            "criterion {n}: {verdict} ({:.3}s, limit {}s)",
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
