//! Seed -> subseed -> private key -> address.

use crate::error::IotaError;
use crate::sponge::{hash, Sponge, HASH_TRITS, HASH_TRYTES};
use crate::trytes::{decode_trytes, encode_trytes, int_to_trits, Trit};

pub const MAX_INDEX: u64 = 9_007_199_254_740_991;
pub const FRAGMENT_TRYTES: usize = 2187;
pub const SEGMENT_HASH_ROUNDS: usize = 26;
pub const CHECKSUM_TRYTES: usize = 9;
/// Trailing seed trits that hold the index counter. 3^34 > 2·MAX_INDEX, so
/// distinct indices never collide.
const INDEX_TRITS: usize = 34;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed(String);

impl Seed {
    pub fn parse(s: &str) -> Result<Self, IotaError> {
        let trits = decode_trytes(s)?;
        if trits.len() != HASH_TRITS {
            return Err(IotaError::BadSeedLength(s.chars().count()));
        }
        Ok(Seed(s.to_string()))
    }

    pub fn random(rng: &mut impl rand::Rng) -> Self {
        let trits: Vec<Trit> = (0..HASH_TRITS).map(|_| rng.gen_range(-1..=1)).collect();
        Seed(encode_trytes(&trits).expect("valid trits"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SecurityLevel(u8);

impl SecurityLevel {
    pub fn new(level: u8) -> Result<Self, IotaError> {
        if (1..=3).contains(&level) {
            Ok(SecurityLevel(level))
        } else {
            Err(IotaError::BadSecurityLevel(level))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn key_trytes(self) -> usize {
        usize::from(self.0) * FRAGMENT_TRYTES
    }
}

/// Adds `index` into the trailing trits of the seed, then hashes.
pub fn derive_subseed<S: Sponge>(sponge: &S, seed: &Seed, index: u64) -> Result<String, IotaError> {
    if index > MAX_INDEX {
        return Err(IotaError::IndexOutOfRange(index));
    }
    let mut trits = decode_trytes(seed.as_str())?;
    let add = int_to_trits(index as i64, INDEX_TRITS);
    let base = HASH_TRITS - INDEX_TRITS;
    let mut carry = 0i8;
    for (i, a) in add.iter().enumerate() {
        let mut s = trits[base + i] + a + carry;
        carry = 0;
        if s > 1 {
            s -= 3;
            carry = 1;
        } else if s < -1 {
            s += 3;
            carry = -1;
        }
        trits[base + i] = s;
    }
    encode_trytes(&hash(sponge, &trits))
}

/// 27·level blocks of 81 trytes squeezed from the subseed.
pub fn derive_private_key<S: Sponge>(
    sponge: &S,
    subseed: &str,
    level: SecurityLevel,
) -> Result<String, IotaError> {
    let trits = decode_trytes(subseed)?;
    let mut s = sponge.clone();
    s.reset();
    s.absorb(&trits);
    let mut key = vec![0; level.key_trytes() * 3];
    s.squeeze(&mut key);
    encode_trytes(&key)
}

/// Each 81-tryte key segment is hashed 26 times; the results are hashed
/// together into the address.
pub fn derive_address<S: Sponge>(
    sponge: &S,
    private_key: &str,
    with_checksum: bool,
) -> Result<String, IotaError> {
    let key = decode_trytes(private_key)?;
    if key.is_empty() || key.len() % HASH_TRITS != 0 {
        return Err(IotaError::BadKeyLength(private_key.len()));
    }
    let mut digests = Vec::with_capacity(key.len());
    for segment in key.chunks(HASH_TRITS) {
        let mut h = segment.to_vec();
        for _ in 0..SEGMENT_HASH_ROUNDS {
            h = hash(sponge, &h);
        }
        digests.extend(h);
    }
    let address = encode_trytes(&hash(sponge, &digests))?;
    if with_checksum {
        add_checksum(sponge, &address)
    } else {
        Ok(address)
    }
}

pub fn checksum<S: Sponge>(sponge: &S, address: &str) -> Result<String, IotaError> {
    let h = hash(sponge, &decode_trytes(address)?);
    encode_trytes(&h[HASH_TRITS - CHECKSUM_TRYTES * 3..])
}

pub fn add_checksum<S: Sponge>(sponge: &S, address: &str) -> Result<String, IotaError> {
    Ok(format!("{address}{}", checksum(sponge, address)?))
}

/// Strips and checks a 9-tryte checksum.
pub fn verify_checksum<S: Sponge>(sponge: &S, address90: &str) -> Result<String, IotaError> {
    if address90.len() != HASH_TRYTES + CHECKSUM_TRYTES {
        return Err(IotaError::BadChecksum);
    }
    let (addr, sum) = address90.split_at(HASH_TRYTES);
    if checksum(sponge, addr)? == sum {
        Ok(addr.to_string())
    } else {
        Err(IotaError::BadChecksum)
    }
}

pub fn address_from_seed<S: Sponge>(
    sponge: &S,
    seed: &Seed,
    index: u64,
    level: SecurityLevel,
    with_checksum: bool,
) -> Result<String, IotaError> {
    let subseed = derive_subseed(sponge, seed, index)?;
    let key = derive_private_key(sponge, &subseed, level)?;
    derive_address(sponge, &key, with_checksum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sponge::MixSponge;

    fn seed() -> Seed {
        Seed::parse(&"ABC".repeat(27)).unwrap()
    }

    #[test]
    fn subseed_bounds() {
        let s = MixSponge::default();
        let a = derive_subseed(&s, &seed(), 0).unwrap();
        assert_eq!(a, derive_subseed(&s, &seed(), 0).unwrap());
        assert_ne!(a, derive_subseed(&s, &seed(), 1).unwrap());
        assert!(derive_subseed(&s, &seed(), MAX_INDEX).is_ok());
        assert_eq!(
            derive_subseed(&s, &seed(), MAX_INDEX + 1),
            Err(IotaError::IndexOutOfRange(MAX_INDEX + 1))
        );
    }

    #[test]
    fn seed_length_checked() {
        assert_eq!(Seed::parse("ABC"), Err(IotaError::BadSeedLength(3)));
        assert!(Seed::parse(&"9".repeat(81)).is_ok());
    }

    #[test]
    fn key_lengths() {
        let s = MixSponge::default();
        let sub = derive_subseed(&s, &seed(), 3).unwrap();
        for (l, n) in [(1, 2187), (2, 4374), (3, 6561)] {
            assert_eq!(
                derive_private_key(&s, &sub, SecurityLevel::new(l).unwrap())
                    .unwrap()
                    .len(),
                n
            );
        }
        assert!(SecurityLevel::new(0).is_err());
        assert!(SecurityLevel::new(4).is_err());
    }

    #[test]
    fn checksum_roundtrip() {
        let s = MixSponge::default();
        let a = address_from_seed(&s, &seed(), 0, SecurityLevel::new(1).unwrap(), true).unwrap();
        assert_eq!(a.len(), 90);
        let bare = verify_checksum(&s, &a).unwrap();
        assert_eq!(bare.len(), 81);
        let mut bad = a.clone();
        bad.replace_range(89.., if a.ends_with('A') { "B" } else { "A" });
        assert_eq!(verify_checksum(&s, &bad), Err(IotaError::BadChecksum));
    }
}
