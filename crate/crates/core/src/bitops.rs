//! Single-bit primitives over octets. Bit 0 is the least significant bit.

use std::fmt;

use crate::error::{Error, Result};

/// Index of a bit inside a byte, always in `0..=7`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitPosition(u8);

impl BitPosition {
    pub const LSB: BitPosition = BitPosition(0);
    pub const MSB: BitPosition = BitPosition(7);

    pub fn new(index: u8) -> Result<Self> {
        if index > 7 {
            return Err(Error::InvalidParameter(format!(
                "bit position {index} outside 0..=7"
            )));
        }
        Ok(BitPosition(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Iterates all eight positions from least to most significant.
    pub fn all() -> impl Iterator<Item = BitPosition> {
        (0..8).map(BitPosition)
    }

    #[inline]
    fn mask(self) -> u8 {
        1 << self.0
    }
}

impl TryFrom<u8> for BitPosition {
    type Error = Error;

    fn try_from(index: u8) -> Result<Self> {
        BitPosition::new(index)
    }
}

impl fmt::Display for BitPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bit {}", self.0)
    }
}

/// Returns bit `pos` of `byte` as 0 or 1.
#[inline]
pub fn get_bit(byte: u8, pos: BitPosition) -> u8 {
    (byte >> pos.0) & 1
}

#[inline]
pub fn set_bit(byte: u8, pos: BitPosition) -> u8 {
    byte | pos.mask()
}

#[inline]
pub fn clear_bit(byte: u8, pos: BitPosition) -> u8 {
    byte & !pos.mask()
}

/// Forces bit `pos` to `value`, leaving every other bit untouched.
#[inline]
pub fn write_bit(byte: u8, pos: BitPosition, value: bool) -> u8 {
    if value {
        set_bit(byte, pos)
    } else {
        clear_bit(byte, pos)
    }
}
