//! Privacy-coin overlays: Zcash shielding classes and Monero-style rings.

use crate::ledger::RING_SIZE;
use crate::model::{OutPoint, RingInput, ShieldKind};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZcashClass {
    Public,
    Shielding,
    Deshielding,
    Private,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OverlayError {
    #[error("input or output kind list is empty")]
    EmptySide,
    #[error("need at least {needed} decoys distinct from the real spend, have {available}")]
    InsufficientDecoys { needed: usize, available: usize },
}

pub fn classify_zcash_tx(
    inputs: &[ShieldKind],
    outputs: &[ShieldKind],
) -> Result<ZcashClass, OverlayError> {
    if inputs.is_empty() || outputs.is_empty() {
        return Err(OverlayError::EmptySide);
    }
    let all = |side: &[ShieldKind], k: ShieldKind| side.iter().all(|s| *s == k);
    use ShieldKind::{T, Z};
    Ok(
        match (
            all(inputs, T),
            all(inputs, Z),
            all(outputs, T),
            all(outputs, Z),
        ) {
            (true, _, true, _) => ZcashClass::Public,
            (true, _, _, true) => ZcashClass::Shielding,
            (_, true, true, _) => ZcashClass::Deshielding,
            (_, true, _, true) => ZcashClass::Private,
            _ => ZcashClass::Mixed,
        },
    )
}

/// Hides `real` among ten decoys drawn from `pool`. The real spend lands at a
/// uniformly random position.
pub fn build_ring_input<R: Rng + ?Sized>(
    real: &OutPoint,
    pool: &[OutPoint],
    rng: &mut R,
) -> Result<RingInput, OverlayError> {
    let mut candidates: Vec<&OutPoint> = {
        let mut seen = HashSet::new();
        pool.iter()
            .filter(|o| *o != real && seen.insert(*o))
            .collect()
    };
    let needed = RING_SIZE - 1;
    if candidates.len() < needed {
        return Err(OverlayError::InsufficientDecoys {
            needed,
            available: candidates.len(),
        });
    }
    candidates.sort();
    let decoys: Vec<OutPoint> = candidates
        .choose_multiple(rng, needed)
        .map(|o| (*o).clone())
        .collect();
    let real_index = rng.gen_range(0..RING_SIZE);
    let mut members = decoys;
    members.insert(real_index, real.clone());
    Ok(RingInput {
        members,
        real_index: Some(real_index),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ledgergraph_core::rng::labeled_rng;
    use ShieldKind::{T, Z};

    #[test]
    fn zcash_examples() {
        assert_eq!(classify_zcash_tx(&[T], &[T, T]), Ok(ZcashClass::Public));
        assert_eq!(classify_zcash_tx(&[Z], &[Z]), Ok(ZcashClass::Private));
        assert_eq!(classify_zcash_tx(&[T, Z], &[T]), Ok(ZcashClass::Mixed));
        assert_eq!(classify_zcash_tx(&[T], &[Z]), Ok(ZcashClass::Shielding));
        assert_eq!(
            classify_zcash_tx(&[Z, Z], &[T]),
            Ok(ZcashClass::Deshielding)
        );
        assert_eq!(classify_zcash_tx(&[], &[T]), Err(OverlayError::EmptySide));
    }

    fn pool(n: usize) -> Vec<OutPoint> {
        (0..n).map(|i| OutPoint::new(format!("d{i}"), 0)).collect()
    }

    #[test]
    fn ring_of_eleven_from_exact_pool() {
        let real = OutPoint::new("real", 0);
        let ring = build_ring_input(&real, &pool(10), &mut labeled_rng(1, "ring")).unwrap();
        assert_eq!(ring.members.len(), 11);
        assert_eq!(ring.members[ring.real_index.unwrap()], real);
    }

    #[test]
    fn nine_decoys_are_not_enough() {
        let real = OutPoint::new("real", 0);
        let mut p = pool(9);
        p.push(real.clone());
        assert_eq!(
            build_ring_input(&real, &p, &mut labeled_rng(1, "ring")),
            Err(OverlayError::InsufficientDecoys {
                needed: 10,
                available: 9
            })
        );
    }

    #[test]
    fn same_seed_same_ring() {
        let real = OutPoint::new("real", 0);
        let p = pool(50);
        let a = build_ring_input(&real, &p, &mut labeled_rng(9, "ring")).unwrap();
        let b = build_ring_input(&real, &p, &mut labeled_rng(9, "ring")).unwrap();
        assert_eq!(a, b);
    }
}
