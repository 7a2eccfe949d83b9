#[path = "support/cycles.rs"]
mod cycles;

use ledgergraph_iota::*;
use proptest::prelude::*;

proptest! {
    #[test]
    fn tryte_strings_round_trip(s in "[9A-Z]{0,120}") {
        let trits = decode_trytes(&s).unwrap();
        prop_assert_eq!(trits.len(), 3 * s.len());
        prop_assert_eq!(encode_trytes(&trits).unwrap(), s);
    }

    #[test]
    fn trits_round_trip(t in proptest::collection::vec(-1i8..=1, 0..40).prop_map(|mut v| { v.truncate(v.len() / 3 * 3); v })) {
        prop_assert_eq!(decode_trytes(&encode_trytes(&t).unwrap()).unwrap(), t);
    }

    #[test]
    fn accepted_bundles_sum_to_zero(
        ins in proptest::collection::vec((1i64..1_000_000, 1u8..=3), 0..3),
        split in proptest::collection::vec(1u32..100, 1..4),
    ) {
        let total: i64 = ins.iter().map(|(a, _)| a).sum();
        let weights: u32 = split.iter().sum();
        let mut outs: Vec<BundleOutput> = split.iter().enumerate().map(|(i, w)| BundleOutput {
            address: format!("OUT{}", (b'A' + i as u8) as char),
            value: total * i64::from(*w) / i64::from(weights),
        }).collect();
        let rest = total - outs.iter().map(|o| o.value).sum::<i64>();
        outs[0].value += rest;
        let inputs: Vec<BundleInput> = ins.iter().enumerate().map(|(i, (a, l))| BundleInput {
            address: format!("IN{}", (b'A' + i as u8) as char),
            level: SecurityLevel::new(*l).unwrap(),
            amount: *a,
        }).collect();
        let b = build_bundle(&MixSponge::default(), &inputs, &outs, "", 1).unwrap();
        prop_assert_eq!(b.value_sum(), 0);
        let expected: usize = ins.iter().map(|(_, l)| usize::from(*l)).sum::<usize>() + outs.len();
        prop_assert_eq!(b.len(), expected);
        b.verify(&MixSponge::default()).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn growth_milestones_and_snapshots_conserve_balance(seed in any::<u64>()) {
        let stats = cycles::run_cycles(seed, 25).map_err(TestCaseError::fail)?;
        prop_assert!(stats.milestones == 25);
    }
}
