//! LSB substitution over a payload byte region.
//!
//! Stego format: message bits are consumed least-significant first within
//! each message byte. Slot `k` is the carrier byte at
//! `start_position + k * stride`. In 1-bit mode slot `k` carries message bit
//! `k` in its bit 0. In 2-bit mode slot `k` carries message bit `2k` in its
//! bit 0 and bit `2k + 1` in its bit 1. All other carrier bits are untouched.

use std::fmt;
use std::str::FromStr;

use crate::bitops::{get_bit, write_bit, BitPosition};
use crate::error::{Error, Result};

/// Number of least-significant carrier bits used per slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BitsPerByte {
    One,
    Two,
}

impl BitsPerByte {
    pub fn get(self) -> usize {
        match self {
            BitsPerByte::One => 1,
            BitsPerByte::Two => 2,
        }
    }

    /// Carrier slots consumed by one message byte.
    pub fn slots_per_byte(self) -> usize {
        8 / self.get()
    }
}

impl TryFrom<usize> for BitsPerByte {
    type Error = Error;

    fn try_from(bits: usize) -> Result<Self> {
        match bits {
            1 => Ok(BitsPerByte::One),
            2 => Ok(BitsPerByte::Two),
            other => Err(Error::InvalidParameter(format!(
                "bits per byte must be 1 or 2, got {other}"
            ))),
        }
    }
}

impl FromStr for BitsPerByte {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: usize = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bits per byte: {s:?}")))?;
        BitsPerByte::try_from(bits)
    }
}

impl fmt::Display for BitsPerByte {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

/// Where and how densely a message is laid into the payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EmbedSpec {
    start_position: usize,
    stride: usize,
    bits: BitsPerByte,
}

impl EmbedSpec {
    pub fn new(start_position: usize, stride: usize, bits: BitsPerByte) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        Ok(EmbedSpec {
            start_position,
            stride,
            bits,
        })
    }

    pub fn start_position(&self) -> usize {
        self.start_position
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn bits(&self) -> BitsPerByte {
        self.bits
    }

    /// Same layout at a different start.
    pub fn at(self, start_position: usize) -> Self {
        EmbedSpec {
            start_position,
            ..self
        }
    }

    #[inline]
    fn slot(&self, k: usize) -> usize {
        self.start_position + k * self.stride
    }
}

/// Usable carrier slots from `start_position` to the end of the payload.
pub fn slot_count(payload_length: usize, spec: &EmbedSpec) -> usize {
    if spec.start_position >= payload_length {
        0
    } else {
        (payload_length - 1 - spec.start_position) / spec.stride + 1
    }
}

/// Largest message, in bytes, that fits under `spec`.
pub fn capacity(payload_length: usize, spec: &EmbedSpec) -> usize {
    slot_count(payload_length, spec) * spec.bits.get() / 8
}

/// Whether a message of `length` bytes fits in `payload_length` under `spec`.
#[inline]
pub fn fits(payload_length: usize, spec: &EmbedSpec, length: usize) -> bool {
    if length == 0 {
        return true;
    }
    let last_slot = length * spec.bits.slots_per_byte() - 1;
    last_slot
        .checked_mul(spec.stride)
        .and_then(|d| d.checked_add(spec.start_position))
        .is_some_and(|pos| pos < payload_length)
}

fn check_capacity(payload_length: usize, spec: &EmbedSpec, length: usize) -> Result<()> {
    if fits(payload_length, spec, length) {
        Ok(())
    } else {
        Err(Error::CapacityExceeded {
            requested: length,
            capacity: capacity(payload_length, spec),
        })
    }
}

/// Writes `message` into the low bits of `payload` in place.
pub fn embed(payload: &mut [u8], message: &[u8], spec: &EmbedSpec) -> Result<()> {
    check_capacity(payload.len(), spec, message.len())?;
    let lsb = BitPosition::LSB;
    match spec.bits {
        BitsPerByte::One => {
            for (i, &byte) in message.iter().enumerate() {
                for bit in BitPosition::all() {
                    let slot = spec.slot(i * 8 + bit.index() as usize);
                    payload[slot] = write_bit(payload[slot], lsb, get_bit(byte, bit) == 1);
                }
            }
        }
        BitsPerByte::Two => {
            for (i, &byte) in message.iter().enumerate() {
                for group in 0..4u8 {
                    let slot = spec.slot(i * 4 + group as usize);
                    payload[slot] = (payload[slot] & !0b11) | ((byte >> (2 * group)) & 0b11);
                }
            }
        }
    }
    Ok(())
}

/// Reads back `length` message bytes laid out by [`embed`].
pub fn extract(payload: &[u8], spec: &EmbedSpec, length: usize) -> Result<Vec<u8>> {
    check_capacity(payload.len(), spec, length)?;
    let per = spec.bits.slots_per_byte();
    Ok((0..length)
        .map(|i| decode_byte_unchecked(payload, spec, i * per))
        .collect())
}

/// Decodes one message byte whose first slot index is `first_slot`.
/// The caller guarantees every slot lies inside `payload`.
#[inline]
pub(crate) fn decode_byte_unchecked(payload: &[u8], spec: &EmbedSpec, first_slot: usize) -> u8 {
    let mut pos = spec.slot(first_slot);
    let mut out = 0u8;
    match spec.bits {
        BitsPerByte::One => {
            for k in 0..8 {
                out |= (payload[pos] & 1) << k;
                pos += spec.stride;
            }
        }
        BitsPerByte::Two => {
            for k in 0..4 {
                out |= (payload[pos] & 0b11) << (2 * k);
                pos += spec.stride;
            }
        }
    }
    out
}
