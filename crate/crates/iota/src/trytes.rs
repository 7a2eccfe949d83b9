//! Balanced ternary: trits in {-1, 0, 1}, three per tryte, one character per
//! tryte.

use crate::error::IotaError;

pub type Trit = i8;

pub const ALPHABET: &[u8; 27] = b"9ABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// t0 + 3·t1 + 9·t2, in [-13, 13].
pub fn tryte_value(t: [Trit; 3]) -> i8 {
    t[0] + 3 * t[1] + 9 * t[2]
}

pub fn value_to_tryte(v: i8) -> [Trit; 3] {
    debug_assert!((-13..=13).contains(&v));
    let mut out = [0; 3];
    let mut rest = i32::from(v);
    for slot in &mut out {
        let mut r = rest.rem_euclid(3);
        if r == 2 {
            r = -1;
        }
        *slot = r as Trit;
        rest = (rest - r) / 3;
    }
    out
}

pub fn tryte_char(t: [Trit; 3]) -> char {
    let idx = (i32::from(tryte_value(t)).rem_euclid(27)) as usize;
    ALPHABET[idx] as char
}

pub fn char_value(c: char) -> Option<i8> {
    let idx = ALPHABET.iter().position(|&a| a as char == c)? as i8;
    Some(if idx > 13 { idx - 27 } else { idx })
}

pub fn encode_trytes(trits: &[Trit]) -> Result<String, IotaError> {
    if !trits.len().is_multiple_of(3) {
        return Err(IotaError::LengthNotMultipleOf3(trits.len()));
    }
    if let Some(&bad) = trits.iter().find(|t| !(-1..=1).contains(*t)) {
        return Err(IotaError::InvalidTrit(bad));
    }
    Ok(trits
        .chunks(3)
        .map(|c| tryte_char([c[0], c[1], c[2]]))
        .collect())
}

pub fn decode_trytes(s: &str) -> Result<Vec<Trit>, IotaError> {
    let mut out = Vec::with_capacity(s.len() * 3);
    for (pos, c) in s.chars().enumerate() {
        let v = char_value(c).ok_or(IotaError::InvalidChar { ch: c, pos })?;
        out.extend_from_slice(&value_to_tryte(v));
    }
    Ok(out)
}

pub fn is_trytes(s: &str) -> bool {
    s.chars().all(|c| char_value(c).is_some())
}

/// Little-endian balanced ternary, `len` trits. Bits above `len` are dropped.
pub fn int_to_trits(value: i64, len: usize) -> Vec<Trit> {
    let mut out = vec![0; len];
    let mut rest = i128::from(value);
    for slot in out.iter_mut() {
        let mut r = rest.rem_euclid(3);
        if r == 2 {
            r = -1;
        }
        *slot = r as Trit;
        rest = (rest - r) / 3;
    }
    out
}

pub fn trits_to_int(trits: &[Trit]) -> i128 {
    trits
        .iter()
        .rev()
        .fold(0i128, |acc, &t| acc * 3 + i128::from(t))
}

/// Right-pads with '9' (zero trytes) to `len` characters.
pub fn pad_trytes(s: &str, len: usize) -> Result<String, IotaError> {
    if !is_trytes(s) {
        let (pos, ch) = s
            .char_indices()
            .find(|(_, c)| char_value(*c).is_none())
            .expect("not trytes");
        return Err(IotaError::InvalidChar { ch, pos });
    }
    let n = s.chars().count();
    if n > len {
        return Err(IotaError::TooLong { len: n, max: len });
    }
    Ok(format!("{s}{}", "9".repeat(len - n)))
}
