//! Straight-line seed -> address pipeline written without the crate's
//! codec or sponge, for cross-checking.

const ALPHA: &str = "9ABCDEFGHIJKLMNOPQRSTUVWXYZ";

fn to_trits(s: &str) -> Vec<i32> {
    let mut out = Vec::new();
    for c in s.chars() {
        let idx = ALPHA.find(c).expect("tryte") as i32;
        let mut v = if idx > 13 { idx - 27 } else { idx };
        for _ in 0..3 {
            let r = ((v % 3) + 3) % 3;
            let t = if r == 2 { -1 } else { r };
            out.push(t);
            v = (v - t) / 3;
        }
    }
    out
}

fn to_trytes(t: &[i32]) -> String {
    t.chunks(3)
        .map(|c| {
            let v = c[0] + 3 * c[1] + 9 * c[2];
            ALPHA.as_bytes()[(((v % 27) + 27) % 27) as usize] as char
        })
        .collect()
}

fn permute(state: &mut [i32]) {
    let table = [1, 0, -1, 2, 1, -1, 0, 2, -1, 1, 0];
    for _ in 0..27 {
        let old = state.to_vec();
        let mut j = 0usize;
        for slot in state.iter_mut() {
            let k = if j < 365 { j + 364 } else { j - 365 };
            *slot = table[(old[j] + 4 * old[k] + 5) as usize];
            j = k;
        }
    }
}

/// Absorb `input` in 243-trit blocks, squeeze `out_len` trits.
fn sponge(input: &[i32], out_len: usize) -> Vec<i32> {
    let mut state = vec![0i32; 729];
    for block in input.chunks(243) {
        for i in 0..243 {
            state[i] = block.get(i).copied().unwrap_or(0);
        }
        permute(&mut state);
    }
    let mut out = Vec::new();
    while out.len() < out_len {
        if !out.is_empty() {
            permute(&mut state);
        }
        out.extend_from_slice(&state[..243]);
    }
    out.truncate(out_len);
    out
}

pub fn oracle_address(seed: &str, index: u64, level: usize, checksum: bool) -> String {
    let mut s = to_trits(seed);
    // index counter: trits 209..243, little endian, with carry
    let mut idx = index as i128;
    let mut carry = 0;
    for pos in 209..243 {
        let r = ((idx % 3) + 3) % 3;
        let d = if r == 2 { -1 } else { r as i32 };
        idx = (idx - d as i128) / 3;
        let mut v = s[pos] + d + carry;
        carry = 0;
        if v > 1 {
            v -= 3;
            carry = 1;
        } else if v < -1 {
            v += 3;
            carry = -1;
        }
        s[pos] = v;
    }
    let subseed = sponge(&s, 243);
    let key = sponge(&subseed, level * 27 * 243);
    let mut digests = Vec::new();
    for seg in key.chunks(243) {
        let mut h = seg.to_vec();
        for _ in 0..26 {
            h = sponge(&h, 243);
        }
        digests.extend(h);
    }
    let addr = sponge(&digests, 243);
    let mut out = to_trytes(&addr);
    if checksum {
        let c = sponge(&addr, 243);
        out.push_str(&to_trytes(&c[243 - 27..]));
    }
    out
}
