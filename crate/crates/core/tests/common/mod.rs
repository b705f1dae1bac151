//! Reference implementations used as test oracles. Written independently of
//! the library's codec and scanner: plain bit lists and nested loops.
#![allow(dead_code)]

use rand::{Rng, RngCore};

/// Flattens bytes into bits, least significant first.
pub fn to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes
        .iter()
        .flat_map(|&b| (0..8).map(move |k| (b >> k) & 1))
        .collect()
}

pub fn from_bits(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| {
            c.iter()
                .enumerate()
                .fold(0u8, |acc, (k, &bit)| acc | (bit << k))
        })
        .collect()
}

/// Places the message bit stream into consecutive slots, `bits` per slot.
/// Returns `None` when a slot would fall outside the payload.
pub fn oracle_embed(
    payload: &[u8],
    message: &[u8],
    start: usize,
    stride: usize,
    bits: usize,
) -> Option<Vec<u8>> {
    let stream = to_bits(message);
    let mut out = payload.to_vec();
    for (k, group) in stream.chunks(bits).enumerate() {
        let pos = start + k * stride;
        if pos >= out.len() {
            return None;
        }
        for (b, &bit) in group.iter().enumerate() {
            out[pos] = (out[pos] & !(1 << b)) | (bit << b);
        }
    }
    Some(out)
}

pub fn oracle_extract(
    payload: &[u8],
    start: usize,
    stride: usize,
    bits: usize,
    length: usize,
) -> Option<Vec<u8>> {
    let slots = length * 8 / bits;
    let mut stream = Vec::with_capacity(length * 8);
    for k in 0..slots {
        let byte = *payload.get(start + k * stride)?;
        for b in 0..bits {
            stream.push((byte >> b) & 1);
        }
    }
    Some(from_bits(&stream))
}

pub fn default_accepts(b: u8) -> bool {
    (32..127).contains(&b) || b == 9 || b == 10 || b == 13
}

/// One `(start, length, text)` hit.
pub type Hit = (usize, usize, Vec<u8>);

/// Double loop over starts and lengths, re-extracting each length from
/// scratch, with bounds checks.
pub fn naive_scan(
    payload: &[u8],
    size_down: usize,
    size_upper: usize,
    bits: usize,
    stride: usize,
    accepts: impl Fn(u8) -> bool,
) -> Vec<Hit> {
    let n = payload.len();
    let mut hits = Vec::new();
    for i in 0..n {
        for j in size_down..=size_upper {
            if i + (8 * j / bits - 1) * stride >= n {
                break;
            }
            let mut text = Vec::with_capacity(j);
            for m in 0..j {
                let mut byte = 0u8;
                for s in 0..8 / bits {
                    let carrier = payload[i + (m * 8 / bits + s) * stride];
                    let low = carrier & ((1 << bits) - 1);
                    byte |= low << (s * bits);
                }
                text.push(byte);
            }
            if text.iter().all(|&b| accepts(b)) {
                hits.push((i, j, text));
            }
        }
    }
    hits
}

pub fn hits_of(candidates: &[stegscan::Candidate]) -> Vec<Hit> {
    candidates
        .iter()
        .map(|c| (c.start_position, c.length, c.text.clone()))
        .collect()
}

pub fn random_bytes(rng: &mut impl RngCore, n: usize) -> Vec<u8> {
    let mut buf = vec![0u8; n];
    rng.fill_bytes(&mut buf);
    buf
}

pub fn random_printable(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0x20u8..=0x7E)).collect()
}

/// 24bpp BMP with random pixels and a hand-built header.
pub fn random_bmp(rng: &mut impl Rng, width: u32, height: u32) -> Vec<u8> {
    let row = (width as usize * 3).div_ceil(4) * 4;
    let data = row * height as usize;
    let mut out = Vec::new();
    out.extend_from_slice(b"BM");
    out.extend_from_slice(&((54 + data) as u32).to_le_bytes());
    out.extend_from_slice(&[0, 0, 0, 0]);
    out.extend_from_slice(&54u32.to_le_bytes());
    out.extend_from_slice(&40u32.to_le_bytes());
    out.extend_from_slice(&(width as i32).to_le_bytes());
    out.extend_from_slice(&(height as i32).to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&24u16.to_le_bytes());
    out.extend_from_slice(&[0; 24]);
    for _ in 0..height {
        for _ in 0..width * 3 {
            out.push(rng.gen());
        }
        // padding may hold anything; the carrier must keep it verbatim
        for _ in width as usize * 3..row {
            out.push(rng.gen());
        }
    }
    out
}
