use ledgergraph_account::*;
use ledgergraph_core::{AddressId, TxId};
use proptest::prelude::*;
use std::collections::BTreeMap;

const HOLDERS: [&str; 5] = ["h0", "h1", "h2", "h3", "h4"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn token_supply_conserved_and_replay_matches(
        supply in 1u128..10_000,
        moves in prop::collection::vec((0usize..5, 0usize..5, 0u128..3_000), 0..80),
    ) {
        let owner = AddressId::eoa("h0").unwrap();
        let mut reg = TokenRegistry::default();
        let token = reg.deploy(deploy_token(&Sha256Deriver, &owner, "T", 0, supply, 0).unwrap()).unwrap().address.clone();
        for (i, (a, b, amt)) in moves.iter().enumerate() {
            let before = reg.contracts[&token].clone();
            let res = reg.transfer(&token, HOLDERS[*a], HOLDERS[*b], *amt, &TxId::new(format!("t{i}")));
            if res.is_err() {
                prop_assert_eq!(&reg.contracts[&token], &before);
            }
            prop_assert_eq!(reg.contracts[&token].balances.values().sum::<u128>(), supply);
        }
        // replaying the recorded internal transfers from genesis gives the same balances
        let mut oracle: BTreeMap<&str, i128> = BTreeMap::from([("h0", supply as i128)]);
        for t in &reg.transfers {
            *oracle.entry(t.from.as_str()).or_insert(0) -= t.amount as i128;
            *oracle.entry(t.to.as_str()).or_insert(0) += t.amount as i128;
        }
        oracle.retain(|_, v| *v != 0);
        let actual: BTreeMap<&str, i128> = reg.contracts[&token].balances.iter().map(|(k, v)| (k.as_str(), *v as i128)).collect();
        prop_assert_eq!(actual, oracle);
    }

    #[test]
    fn sender_edges_totally_ordered(
        counts in prop::collection::vec(1usize..6, 1..5),
        order_seed in any::<u64>(),
    ) {
        let mut txs = Vec::new();
        for (s, n) in counts.iter().enumerate() {
            for nonce in 0..*n {
                txs.push(AccountTx::transfer(
                    format!("s{s}n{nonce}"),
                    AddressId::eoa(format!("s{s}")).unwrap(),
                    AddressId::eoa(HOLDERS[nonce % 5]).unwrap(),
                    1,
                    nonce as u64,
                    // interleave senders across blocks while keeping each sender ascending
                    (nonce * counts.len() + s) as u64 / 2,
                    (nonce * counts.len() + s) as u32,
                ));
            }
        }
        // input order must not matter
        let k = (order_seed as usize) % txs.len();
        txs.rotate_left(k);
        let g = build_account_graph(&txs, &[]).unwrap();
        prop_assert_eq!(g.len(), txs.len());
        for s in 0..counts.len() {
            let keys: Vec<(u64, u32)> = g.edges().iter()
                .filter(|e| e.source == format!("s{s}"))
                .map(|e| (e.attributes["block"].parse().unwrap(), e.attributes["index"].parse().unwrap()))
                .collect();
            prop_assert!(keys.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(keys.len(), counts[s]);
        }
    }

    #[test]
    fn traces_are_sequential(depth in 1usize..8, budget in 1usize..40) {
        let mut ex = TraceExecutor::new(budget);
        for d in 0..depth {
            let next = format!("c{}", d + 1);
            ex.define(&format!("c{d}"), "f", vec![
                Action::StateChange { note: String::new() },
                Action::Call { to: next, function: "f".into(), value: 0 },
                Action::Transfer { to: "payee".into(), value: 1 },
            ]);
        }
        let mut tx = AccountTx::transfer("r", AddressId::eoa("u").unwrap(), AddressId::contract("c0").unwrap(), 0, 0, 1, 0);
        tx.input_data = "f".into();
        let trace = ex.execute(&tx);
        let real = trace.steps.iter().filter(|s| s.kind != CallKind::OutOfGas).count();
        prop_assert!(real <= budget);
        prop_assert_eq!(trace.truncated, trace.steps.last().unwrap().kind == CallKind::OutOfGas);
        prop_assert_eq!(trace.steps[0].caller.as_str(), "u");
        for w in trace.steps.windows(2) {
            prop_assert!(w[1].depth <= w[0].depth + 1);
            // a deeper step must be entered by a call from the contract it runs in
            if w[1].depth == w[0].depth + 1 {
                prop_assert_eq!(&w[1].caller, &w[0].callee);
            }
        }
    }
}
