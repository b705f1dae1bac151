//! Carrier files: an opaque header that is preserved verbatim, followed by a
//! payload region that embedding and scanning operate on.
//!
//! Uncompressed 24-bit BMP is parsed natively. The payload starts at the
//! pixel-data offset and runs to the end of the file, row padding included.
//! Anything else has to be loaded as [`CarrierFormat::Raw`], where the whole
//! input is payload.

use crate::error::{Error, Result};

const BMP_MAGIC: &[u8; 2] = b"BM";
const OFFSET_FIELD: usize = 10;
const WIDTH_FIELD: usize = 18;
const HEIGHT_FIELD: usize = 22;
const BPP_FIELD: usize = 28;
const COMPRESSION_FIELD: usize = 30;
/// Every field we read must sit inside the preserved header.
const MIN_BMP_HEADER: usize = COMPRESSION_FIELD + 4;

const FILE_HEADER_LEN: usize = 14;
const INFO_HEADER_LEN: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CarrierFormat {
    Bmp24,
    Raw,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarrierImage {
    pub format: CarrierFormat,
    pub header: Vec<u8>,
    pub payload: Vec<u8>,
    /// Pixel dimensions, BMP only.
    pub width: Option<i32>,
    pub height: Option<i32>,
}

impl CarrierImage {
    pub fn raw(payload: Vec<u8>) -> Self {
        CarrierImage {
            format: CarrierFormat::Raw,
            header: Vec::new(),
            payload,
            width: None,
            height: None,
        }
    }

    pub fn len(&self) -> usize {
        self.header.len() + self.payload.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn read_u16(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn read_i32(bytes: &[u8], at: usize) -> i32 {
    i32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

/// Parses `bytes` as a carrier.
///
/// With no hint the input must be a BMP; callers opt into raw mode
/// explicitly so structured formats are never silently treated as flat bytes.
pub fn load_carrier(bytes: &[u8], format_hint: Option<CarrierFormat>) -> Result<CarrierImage> {
    match format_hint {
        Some(CarrierFormat::Raw) => Ok(CarrierImage::raw(bytes.to_vec())),
        Some(CarrierFormat::Bmp24) => parse_bmp24(bytes),
        None => {
            if bytes.starts_with(BMP_MAGIC) {
                parse_bmp24(bytes)
            } else {
                Err(Error::UnsupportedFormat(
                    "input is not a BMP file".to_string(),
                ))
            }
        }
    }
}

fn parse_bmp24(bytes: &[u8]) -> Result<CarrierImage> {
    if !bytes.starts_with(BMP_MAGIC) {
        return Err(Error::MalformedHeader("missing 'BM' magic".to_string()));
    }
    if bytes.len() < MIN_BMP_HEADER {
        return Err(Error::MalformedHeader(format!(
            "file of {} bytes is too short for a BMP header",
            bytes.len()
        )));
    }
    let offset = read_u32(bytes, OFFSET_FIELD) as usize;
    if offset > bytes.len() {
        return Err(Error::MalformedHeader(format!(
            "pixel-data offset {offset} beyond file length {}",
            bytes.len()
        )));
    }
    if offset < MIN_BMP_HEADER {
        return Err(Error::MalformedHeader(format!(
            "pixel-data offset {offset} overlaps the header fields"
        )));
    }
    let bpp = read_u16(bytes, BPP_FIELD);
    if bpp != 24 {
        return Err(Error::UnsupportedFormat(format!("{bpp} bits per pixel")));
    }
    let compression = read_u32(bytes, COMPRESSION_FIELD);
    if compression != 0 {
        return Err(Error::UnsupportedFormat(format!(
            "compression method {compression}"
        )));
    }

    Ok(CarrierImage {
        format: CarrierFormat::Bmp24,
        header: bytes[..offset].to_vec(),
        payload: bytes[offset..].to_vec(),
        width: Some(read_i32(bytes, WIDTH_FIELD)),
        height: Some(read_i32(bytes, HEIGHT_FIELD)),
    })
}

/// Serializes header followed by payload.
pub fn save_carrier(carrier: &CarrierImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(carrier.len());
    out.extend_from_slice(&carrier.header);
    out.extend_from_slice(&carrier.payload);
    out
}

/// Writes a bottom-up 24bpp BITMAPINFOHEADER file. `pixel` is called with
/// `(x, y)` in top-down image coordinates and returns `[b, g, r]`.
pub fn encode_bmp24(
    width: u32,
    height: u32,
    mut pixel: impl FnMut(u32, u32) -> [u8; 3],
) -> Vec<u8> {
    let row_len = (width as usize * 3).div_ceil(4) * 4;
    let pixel_bytes = row_len * height as usize;
    let offset = FILE_HEADER_LEN + INFO_HEADER_LEN;
    let file_len = offset + pixel_bytes;

    let mut out = Vec::with_capacity(file_len);
    out.extend_from_slice(BMP_MAGIC);
    out.extend_from_slice(&(file_len as u32).to_le_bytes());
    out.extend_from_slice(&[0; 4]);
    out.extend_from_slice(&(offset as u32).to_le_bytes());

    out.extend_from_slice(&(INFO_HEADER_LEN as u32).to_le_bytes());
    out.extend_from_slice(&(width as i32).to_le_bytes());
    out.extend_from_slice(&(height as i32).to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&24u16.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&(pixel_bytes as u32).to_le_bytes());
    // 96 dpi
    out.extend_from_slice(&3780u32.to_le_bytes());
    out.extend_from_slice(&3780u32.to_le_bytes());
    out.extend_from_slice(&[0; 8]);

    for row in (0..height).rev() {
        let start = out.len();
        for x in 0..width {
            out.extend_from_slice(&pixel(x, row));
        }
        out.resize(start + row_len, 0);
    }
    out
}
