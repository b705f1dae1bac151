//! Decides whether decoded bytes look like hidden text.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Set of octets accepted as text characters.
#[derive(Clone, PartialEq, Eq)]
pub struct AcceptSet {
    table: [bool; 256],
    cardinality: usize,
}

impl AcceptSet {
    pub fn from_predicate(mut accept: impl FnMut(u8) -> bool) -> Self {
        let mut table = [false; 256];
        for b in 0..=255u8 {
            table[b as usize] = accept(b);
        }
        let cardinality = table.iter().filter(|&&t| t).count();
        AcceptSet { table, cardinality }
    }

    /// Printable ASCII, 0x20 through 0x7E.
    pub fn printable() -> Self {
        Self::from_predicate(|b| (0x20..=0x7E).contains(&b))
    }

    /// Printable ASCII plus tab, LF and CR. 98 octets.
    pub fn printable_with_whitespace() -> Self {
        Self::from_predicate(|b| (0x20..=0x7E).contains(&b) || matches!(b, 0x09 | 0x0A | 0x0D))
    }

    /// Parses a comma-separated list of hex bytes or inclusive ranges,
    /// e.g. `20-7e,09,0a`.
    pub fn from_hex_ranges(spec: &str) -> Result<Self> {
        let bad = |part: &str| Error::InvalidParameter(format!("accept range {part:?}"));
        let hex = |s: &str| u8::from_str_radix(s.trim(), 16).map_err(|_| bad(s));
        let mut table = [false; 256];
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (lo, hi) = match part.split_once('-') {
                Some((lo, hi)) => (hex(lo)?, hex(hi)?),
                None => {
                    let b = hex(part)?;
                    (b, b)
                }
            };
            if lo > hi {
                return Err(bad(part));
            }
            for b in lo..=hi {
                table[b as usize] = true;
            }
        }
        Ok(Self::from_predicate(|b| table[b as usize]))
    }

    #[inline]
    pub fn contains(&self, byte: u8) -> bool {
        self.table[byte as usize]
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    /// Probability that a uniformly random octet is accepted.
    pub fn density(&self) -> f64 {
        self.cardinality as f64 / 256.0
    }
}

impl Default for AcceptSet {
    fn default() -> Self {
        Self::printable_with_whitespace()
    }
}

impl fmt::Debug for AcceptSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AcceptSet")
            .field("cardinality", &self.cardinality)
            .finish()
    }
}

/// `printable`, `printable+ws` or `custom:<hex-ranges>`.
impl FromStr for AcceptSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printable" => Ok(Self::printable()),
            "printable+ws" => Ok(Self::printable_with_whitespace()),
            _ => match s.strip_prefix("custom:") {
                Some(ranges) => Self::from_hex_ranges(ranges),
                None => Err(Error::InvalidParameter(format!("unknown accept set {s:?}"))),
            },
        }
    }
}

/// True iff every byte is in `accept`. Empty input is accepted.
pub fn ascii_verify(bytes: &[u8], accept: &AcceptSet) -> bool {
    bytes.iter().all(|&b| accept.contains(b))
}

/// Fraction of bytes that are ASCII letters, digits or space.
pub fn score(bytes: &[u8]) -> Result<f64> {
    if bytes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let good = bytes
        .iter()
        .filter(|b| b.is_ascii_alphanumeric() || **b == b' ')
        .count();
    Ok(good as f64 / bytes.len() as f64)
}
