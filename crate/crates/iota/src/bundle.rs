//! Bundles: the atomic group of input, output and signature-fragment
//! transactions making up one transfer.

use crate::derive::{SecurityLevel, FRAGMENT_TRYTES};
use crate::error::IotaError;
use crate::sponge::{hash, Sponge, HASH_TRYTES};
use crate::trytes::{decode_trytes, encode_trytes, int_to_trits, pad_trytes, Trit};
use std::collections::BTreeMap;

pub const TAG_TRYTES: usize = 27;
pub const VALUE_TRITS: usize = 81;
pub const SMALL_TRITS: usize = 27;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxKind {
    Input,
    Output,
    ZeroValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangleTransaction {
    /// Empty until attached.
    pub hash: String,
    pub signature_fragment: String,
    pub address: String,
    pub value: i64,
    pub tag: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub current_index: usize,
    pub last_index: usize,
    pub bundle: String,
    pub trunk: String,
    pub branch: String,
    pub nonce: String,
}

impl TangleTransaction {
    pub fn kind(&self) -> TxKind {
        match self.value {
            v if v < 0 => TxKind::Input,
            v if v > 0 => TxKind::Output,
            _ => TxKind::ZeroValue,
        }
    }

    pub fn is_head(&self) -> bool {
        self.current_index == 0
    }

    /// The part covered by the bundle hash.
    pub fn essence_trits(&self) -> Vec<Trit> {
        let mut t = decode_trytes(&self.address).expect("validated address");
        t.extend(int_to_trits(self.value, VALUE_TRITS));
        t.extend(decode_trytes(&self.tag).expect("validated tag"));
        t.extend(int_to_trits(self.timestamp as i64, SMALL_TRITS));
        t.extend(int_to_trits(self.current_index as i64, SMALL_TRITS));
        t.extend(int_to_trits(self.last_index as i64, SMALL_TRITS));
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleInput {
    pub address: String,
    pub level: SecurityLevel,
    /// Amount taken from the address, positive.
    pub amount: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleOutput {
    pub address: String,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub hash: String,
    pub transactions: Vec<TangleTransaction>,
}

fn bundle_hash<S: Sponge>(sponge: &S, txs: &[TangleTransaction]) -> Result<String, IotaError> {
    let essence: Vec<Trit> = txs.iter().flat_map(|t| t.essence_trits()).collect();
    encode_trytes(&hash(sponge, &essence))
}

fn fragment<S: Sponge>(
    sponge: &S,
    address: &str,
    bundle: &str,
    k: usize,
) -> Result<String, IotaError> {
    let mut seed = decode_trytes(address)?;
    seed.extend(decode_trytes(bundle)?);
    seed.extend(int_to_trits(k as i64, SMALL_TRITS));
    let mut s = sponge.clone();
    s.reset();
    s.absorb(&seed);
    let mut out = vec![0; FRAGMENT_TRYTES * 3];
    s.squeeze(&mut out);
    encode_trytes(&out)
}

/// Lays out inputs (each followed by level-1 zero-value fragment carriers)
/// then outputs, assigns indices and computes the bundle hash. Signatures are
/// opaque fragments of the right size derived from address and bundle hash.
pub fn build_bundle<S: Sponge>(
    sponge: &S,
    inputs: &[BundleInput],
    outputs: &[BundleOutput],
    tag: &str,
    timestamp: u64,
) -> Result<Bundle, IotaError> {
    let total_in: i128 = inputs.iter().map(|i| i128::from(i.amount)).sum();
    let total_out: i128 = outputs.iter().map(|o| i128::from(o.value)).sum();
    if total_in != total_out {
        return Err(IotaError::UnbalancedBundle {
            inputs: total_in,
            outputs: total_out,
        });
    }
    if inputs.is_empty() && outputs.is_empty() {
        return Err(IotaError::EmptyBundle);
    }
    if let Some(i) = inputs.iter().find(|i| i.amount <= 0) {
        return Err(IotaError::BadBundle(
            String::new(),
            format!("input {} takes {}", i.address, i.amount),
        ));
    }
    if let Some(o) = outputs.iter().find(|o| o.value < 0) {
        return Err(IotaError::BadBundle(
            String::new(),
            format!("output {} gets {}", o.address, o.value),
        ));
    }
    let tag = pad_trytes(tag, TAG_TRYTES)?;
    let blank = |address: String, value: i64| TangleTransaction {
        hash: String::new(),
        signature_fragment: "9".repeat(FRAGMENT_TRYTES),
        address,
        value,
        tag: tag.clone(),
        timestamp,
        current_index: 0,
        last_index: 0,
        bundle: String::new(),
        trunk: String::new(),
        branch: String::new(),
        nonce: String::new(),
    };
    let mut txs = Vec::new();
    // (tx position, fragment number) for every signature-carrying tx
    let mut signed = Vec::new();
    for input in inputs {
        let address = pad_trytes(&input.address, HASH_TRYTES)?;
        for k in 0..usize::from(input.level.get()) {
            signed.push((txs.len(), k));
            txs.push(blank(
                address.clone(),
                if k == 0 { -input.amount } else { 0 },
            ));
        }
    }
    for output in outputs {
        txs.push(blank(
            pad_trytes(&output.address, HASH_TRYTES)?,
            output.value,
        ));
    }
    let last = txs.len() - 1;
    for (i, tx) in txs.iter_mut().enumerate() {
        tx.current_index = i;
        tx.last_index = last;
    }
    let bh = bundle_hash(sponge, &txs)?;
    for (pos, k) in signed {
        txs[pos].signature_fragment = fragment(sponge, &txs[pos].address, &bh, k)?;
    }
    for tx in &mut txs {
        tx.bundle = bh.clone();
    }
    Ok(Bundle {
        hash: bh,
        transactions: txs,
    })
}

impl Bundle {
    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn value_sum(&self) -> i128 {
        self.transactions.iter().map(|t| i128::from(t.value)).sum()
    }

    /// Net amount taken from each input address.
    pub fn spends(&self) -> BTreeMap<String, i64> {
        let mut out = BTreeMap::new();
        for t in self.transactions.iter().filter(|t| t.value < 0) {
            *out.entry(t.address.clone()).or_insert(0) -= t.value;
        }
        out
    }

    /// Indices, bundle field, zero sum, field sizes and the recomputed hash.
    pub fn verify<S: Sponge>(&self, sponge: &S) -> Result<(), IotaError> {
        let fail = |why: &str| Err(IotaError::BadBundle(self.hash.clone(), why.to_string()));
        if self.transactions.is_empty() {
            return Err(IotaError::EmptyBundle);
        }
        let last = self.transactions.len() - 1;
        for (i, t) in self.transactions.iter().enumerate() {
            if t.current_index != i || t.last_index != last {
                return fail("indices");
            }
            if t.bundle != self.hash {
                return fail("bundle field");
            }
            if t.address.len() != HASH_TRYTES
                || t.tag.len() != TAG_TRYTES
                || t.signature_fragment.len() != FRAGMENT_TRYTES
            {
                return fail("field size");
            }
            decode_trytes(&t.address)?;
            decode_trytes(&t.tag)?;
        }
        if self.value_sum() != 0 {
            return fail("values do not sum to zero");
        }
        if bundle_hash(sponge, &self.transactions)? != self.hash {
            return fail("hash mismatch");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sponge::MixSponge;

    fn lvl(n: u8) -> SecurityLevel {
        SecurityLevel::new(n).unwrap()
    }

    #[test]
    fn shapes() {
        let s = MixSponge::default();
        let b = build_bundle(
            &s,
            &[BundleInput {
                address: "A".into(),
                level: lvl(3),
                amount: 10,
            }],
            &[BundleOutput {
                address: "B".into(),
                value: 10,
            }],
            "",
            1,
        )
        .unwrap();
        assert_eq!(b.len(), 4);
        let values: Vec<i64> = b.transactions.iter().map(|t| t.value).collect();
        assert_eq!(values, vec![-10, 0, 0, 10]);
        assert!(b.transactions[1..3]
            .iter()
            .all(|t| t.address == b.transactions[0].address));
        assert_ne!(
            b.transactions[1].signature_fragment,
            b.transactions[2].signature_fragment
        );
        b.verify(&s).unwrap();
    }

    #[test]
    fn tamper_detected() {
        let s = MixSponge::default();
        let mut b = build_bundle(
            &s,
            &[],
            &[BundleOutput {
                address: "MSG".into(),
                value: 0,
            }],
            "HELLO",
            7,
        )
        .unwrap();
        b.verify(&s).unwrap();
        b.transactions[0].timestamp = 8;
        assert!(matches!(b.verify(&s), Err(IotaError::BadBundle(..))));
    }

    #[test]
    fn unbalanced() {
        let s = MixSponge::default();
        let err = build_bundle(
            &s,
            &[BundleInput {
                address: "A".into(),
                level: lvl(1),
                amount: 5,
            }],
            &[BundleOutput {
                address: "B".into(),
                value: 4,
            }],
            "",
            0,
        )
        .unwrap_err();
        assert_eq!(err.code(), "iota.unbalanced-bundle");
    }
}
