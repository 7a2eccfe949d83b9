//! Absorb/squeeze hashing over 243-trit blocks.
//!
//! Every derivation and hashing routine in this crate takes a sponge by
//! reference and clones it to get a fresh instance, so any implementation
//! with the same block size can be plugged in.

use crate::trytes::Trit;

pub const HASH_TRITS: usize = 243;
pub const HASH_TRYTES: usize = 81;

pub trait Sponge: Clone {
    /// Absorbs trits, zero-padding the last partial block.
    fn absorb(&mut self, trits: &[Trit]);
    /// Fills `out` (any length, block by block).
    fn squeeze(&mut self, out: &mut [Trit]);
    fn reset(&mut self);
}

const STATE: usize = 3 * HASH_TRITS;
const ROUNDS: usize = 27;
const TRUTH: [Trit; 11] = [1, 0, -1, 2, 1, -1, 0, 2, -1, 1, 0];

/// Fast deterministic mixer. Not a cryptographic hash.
#[derive(Clone)]
pub struct MixSponge {
    state: [Trit; STATE],
    squeezed: bool,
}

impl Default for MixSponge {
    fn default() -> Self {
        MixSponge {
            state: [0; STATE],
            squeezed: false,
        }
    }
}

impl std::fmt::Debug for MixSponge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("MixSponge")
    }
}

impl MixSponge {
    fn transform(&mut self) {
        let mut scratch = [0 as Trit; STATE];
        for _ in 0..ROUNDS {
            scratch.copy_from_slice(&self.state);
            let mut idx = 0usize;
            for i in 0..STATE {
                let prev = idx;
                idx = if idx < 365 { idx + 364 } else { idx - 365 };
                let k = (scratch[prev] + (scratch[idx] << 2) + 5) as usize;
                self.state[i] = TRUTH[k];
            }
        }
    }
}

impl Sponge for MixSponge {
    fn absorb(&mut self, trits: &[Trit]) {
        self.squeezed = false;
        for chunk in trits.chunks(HASH_TRITS) {
            self.state[..chunk.len()].copy_from_slice(chunk);
            self.state[chunk.len()..HASH_TRITS].fill(0);
            self.transform();
        }
    }

    fn squeeze(&mut self, out: &mut [Trit]) {
        for chunk in out.chunks_mut(HASH_TRITS) {
            if self.squeezed {
                self.transform();
            }
            chunk.copy_from_slice(&self.state[..chunk.len()]);
            self.squeezed = true;
        }
    }

    fn reset(&mut self) {
        *self = MixSponge::default();
    }
}

/// Fresh sponge, absorb `trits`, squeeze one 243-trit block.
pub fn hash<S: Sponge>(proto: &S, trits: &[Trit]) -> Vec<Trit> {
    let mut s = proto.clone();
    s.reset();
    s.absorb(trits);
    let mut out = vec![0; HASH_TRITS];
    s.squeeze(&mut out);
    out
}
