//! LSB steganography: embed messages into carrier bytes and blindly recover
//! hidden ASCII text with an exhaustive, data-parallel scan.

pub mod bench;
pub mod bitops;
pub mod carrier;
pub mod cli;
pub mod codec;
pub mod error;
pub mod plausibility;
pub mod scanner;

pub use carrier::{load_carrier, save_carrier, CarrierFormat, CarrierImage};
pub use codec::{capacity, embed, extract, BitsPerByte, EmbedSpec};
pub use error::{Error, Result};
pub use plausibility::{ascii_verify, score, AcceptSet};
pub use scanner::{
    collapse_maximal, scan, scan_limited, scan_sequential, Candidate, ScanOutcome, ScanSpec,
};
