use ledgergraph_core::{graph_stats, Rational};
use ledgergraph_utxo::*;
use proptest::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

fn cfg(transactions: usize, split_bias: f64, reuse: f64) -> UtxoGenConfig {
    UtxoGenConfig {
        transactions,
        txs_per_block: 17,
        split_bias,
        reuse_probability: reuse,
        ..UtxoGenConfig::default()
    }
}

fn naive_paths(blocks: &[Block], op: &OutPoint) -> u64 {
    let tx = blocks
        .iter()
        .flat_map(|b| &b.transactions)
        .find(|t| t.id == op.txid)
        .unwrap();
    if tx.coinbase {
        1
    } else {
        tx.inputs.iter().map(|i| naive_paths(blocks, i)).sum()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conservation_and_replay(seed in any::<u64>(), bias in 0.0f64..=1.0, reuse in 0.0f64..=0.5) {
        let blocks = generate_blocks(&cfg(150, bias, reuse), seed).unwrap();
        let mut ledger = Ledger::new(LedgerConfig::default());
        for b in blocks.clone() {
            ledger.apply_block(b).unwrap();
        }

        let mut values: HashMap<OutPoint, i128> = HashMap::new();
        let mut live: HashSet<OutPoint> = HashSet::new();
        for (b, report) in blocks.iter().zip(ledger.reports()) {
            let mut fee_sum = 0;
            for tx in &b.transactions {
                let out: i128 = tx.outputs.iter().map(|o| o.value).sum();
                if !tx.coinbase {
                    let inp: i128 = tx.inputs.iter().map(|i| values[i]).sum();
                    let fee = report.tx_fees.iter().find(|(id, _)| *id == tx.id).unwrap().1;
                    prop_assert_eq!(inp, out + fee);
                    prop_assert!(fee >= 0);
                    fee_sum += fee;
                    for i in &tx.inputs {
                        prop_assert!(live.remove(i));
                    }
                }
                for (k, o) in tx.outputs.iter().enumerate() {
                    let op = tx.outpoint(k as u32);
                    values.insert(op.clone(), o.value);
                    live.insert(op);
                }
            }
            let cb_total: i128 = b.transactions[0].outputs.iter().map(|o| o.value).sum();
            prop_assert!(cb_total <= report.subsidy + fee_sum);
        }
        prop_assert_eq!(&live, ledger.unspent_outpoints());
        let created: i128 = blocks.iter().map(|b| b.transactions[0].output_total()).sum();
        prop_assert_eq!(ledger.supply(), created);
        prop_assert!(ledger.unspent_value() <= ledger.supply());
    }

    #[test]
    fn lineage_matches_naive_count(seed in any::<u64>()) {
        let blocks = generate_blocks(&cfg(60, 0.5, 0.1), seed).unwrap();
        let mut ledger = Ledger::new(LedgerConfig::default());
        for b in blocks.clone() {
            ledger.apply_block(b).unwrap();
        }
        for tx in blocks.iter().flat_map(|b| &b.transactions).step_by(7) {
            let op = tx.outpoint(0);
            let paths = trace_lineage(&ledger, &op).unwrap();
            prop_assert_eq!(paths.len() as u64, naive_paths(&blocks, &op));
            prop_assert_eq!(lineage_path_count(&ledger, &op).unwrap(), paths.len() as u128);
            for p in &paths {
                prop_assert!(ledger.transaction(&p[0].txid).unwrap().coinbase);
                prop_assert_eq!(p.last().unwrap(), &op);
            }
        }
    }

    #[test]
    fn graph_identities(seed in any::<u64>(), reuse in 0.0f64..=0.5) {
        let ledger = generate_ledger(&cfg(120, 0.5, reuse), seed).unwrap();
        let tip = ledger.tip_height().unwrap();
        let ag = build_address_graph(&ledger, 0, tip, AddressGraphOptions::default()).unwrap();

        let mut per_tx: BTreeMap<String, Rational> = BTreeMap::new();
        for e in &ag.edges {
            *per_tx.entry(e.txid.0.clone()).or_insert(Rational::from_integer(0)) += e.weight;
        }
        let mut expected_edges = 0;
        let mut producer_consumer = BTreeSet::new();
        for tx in ledger.transactions().filter(|t| !t.coinbase) {
            expected_edges += tx.inputs.len() * tx.outputs.len();
            let inp: i128 = tx.inputs.iter().map(|i| ledger.output(i).unwrap().value).sum();
            prop_assert_eq!(per_tx[tx.id.as_str()], Rational::from_integer(inp));
            for i in &tx.inputs {
                producer_consumer.insert((i.txid.clone(), tx.id.clone()));
            }
        }
        prop_assert_eq!(ag.edges.len(), expected_edges);

        let tg = build_transaction_graph(&ledger, 0, tip).unwrap();
        prop_assert_eq!(tg.edges.len(), producer_consumer.len());
        // Kahn's algorithm visits every node iff the graph is acyclic
        let mut indeg: HashMap<&str, usize> = tg.nodes.iter().map(|n| (n.as_str(), 0)).collect();
        let mut out: HashMap<&str, Vec<&str>> = HashMap::new();
        for (a, b) in tg.edges.keys() {
            *indeg.get_mut(b.as_str()).unwrap() += 1;
            out.entry(a.as_str()).or_default().push(b.as_str());
        }
        let mut queue: Vec<&str> = indeg.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
        let mut visited = 0;
        while let Some(n) = queue.pop() {
            visited += 1;
            for m in out.get(n).into_iter().flatten() {
                let d = indeg.get_mut(m).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push(m);
                }
            }
        }
        prop_assert_eq!(visited, tg.nodes.len());
    }

    #[test]
    fn no_reuse_no_triangles(seed in any::<u64>()) {
        let ledger = generate_ledger(&cfg(80, 0.5, 0.0), seed).unwrap();
        let tip = ledger.tip_height().unwrap();
        let ag = build_address_graph(&ledger, 0, tip, AddressGraphOptions::default()).unwrap();
        let mut adj: HashMap<&str, HashSet<&str>> = HashMap::new();
        for e in ag.edges.iter().filter(|e| e.source != e.target) {
            adj.entry(&e.source).or_default().insert(&e.target);
            adj.entry(&e.target).or_default().insert(&e.source);
        }
        let nodes: Vec<&str> = adj.keys().copied().collect();
        let mut brute = 0;
        for (i, a) in nodes.iter().enumerate() {
            for (j, b) in nodes.iter().enumerate().skip(i + 1) {
                if !adj[a].contains(b) { continue; }
                for c in nodes.iter().skip(j + 1) {
                    if adj[a].contains(c) && adj[b].contains(c) { brute += 1; }
                }
            }
        }
        prop_assert_eq!(brute, 0);
        prop_assert_eq!(graph_stats(&ag).triangles, 0);
    }

    #[test]
    fn fold_consistency_and_mass(shapes in prop::collection::vec((0usize..30, 1usize..30, 0i128..1_000_000), 0..60), n in 2usize..=25) {
        let txs: Vec<_> = shapes.iter().enumerate().map(|(i, (x, y, v))| SnapshotTx::shape(format!("t{i}"), *x, *y, *v)).collect();
        let snap = Snapshot::from_txs(txs);
        let o = occurrence_matrix(&snap, n, true).unwrap();
        let a = amount_matrix(&snap, n, true).unwrap();
        prop_assert_eq!(o.total(), shapes.len() as u64);
        prop_assert_eq!(a.total(), shapes.iter().map(|s| s.2).sum::<i128>());
        for smaller in 1..n {
            prop_assert_eq!(o.fold(smaller).unwrap(), occurrence_matrix(&snap, smaller, true).unwrap());
            prop_assert_eq!(a.fold(smaller).unwrap(), amount_matrix(&snap, smaller, true).unwrap());
        }
        let k1 = extract_k_chainlets(&snap, 1).unwrap();
        let ids: HashSet<_> = k1.iter().flat_map(|c| c.txs.clone()).collect();
        prop_assert_eq!(k1.len(), snap.len());
        prop_assert_eq!(ids.len(), snap.len());
    }
}

#[test]
fn block_report_flags_destroyed_supply() {
    let ledger = generate_ledger(&cfg(30, 0.5, 0.0), 5).unwrap();
    assert!(ledger.reports().iter().all(|r| r.claim.destroyed == 0));
}
