//! Modified UTF-8 as stored in `string_data_item`s.
//!
//! NUL is encoded as `C0 80`, supplementary characters as two three-byte
//! surrogates, and the data is terminated by a single `00` byte.

use super::DexError;

/// Decodes NUL-terminated MUTF-8 starting at `offset` in `bytes`.
///
/// Returns the string and its length in UTF-16 code units.
pub fn decode_mutf8(bytes: &[u8], offset: usize) -> Result<(String, usize), DexError> {
    let err = || DexError::MutfDecodeError { offset };
    let mut units: Vec<u16> = Vec::new();
    let mut pos = offset;
    loop {
        let b0 = *bytes.get(pos).ok_or_else(err)?;
        match b0 {
            0x00 => break,
            0x01..=0x7F => {
                units.push(u16::from(b0));
                pos += 1;
            }
            0xC0..=0xDF => {
                let b1 = continuation(bytes, pos + 1).ok_or_else(err)?;
                units.push((u16::from(b0 & 0x1F) << 6) | u16::from(b1));
                pos += 2;
            }
            0xE0..=0xEF => {
                let b1 = continuation(bytes, pos + 1).ok_or_else(err)?;
                let b2 = continuation(bytes, pos + 2).ok_or_else(err)?;
                units.push((u16::from(b0 & 0x0F) << 12) | (u16::from(b1) << 6) | u16::from(b2));
                pos += 3;
            }
            _ => return Err(err()),
        }
    }
    let len = units.len();
    let s = String::from_utf16(&units).map_err(|_| err())?;
    Ok((s, len))
}

fn continuation(bytes: &[u8], pos: usize) -> Option<u8> {
    bytes.get(pos).filter(|&&b| b & 0xC0 == 0x80).map(|&b| b & 0x3F)
}

/// Encodes `s` as MUTF-8 without the terminating NUL.
pub fn encode_mutf8(s: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(s.len());
    for unit in s.encode_utf16() {
        match unit {
            0x0001..=0x007F => out.push(unit as u8),
            0x0000 | 0x0080..=0x07FF => {
                out.push(0xC0 | (unit >> 6) as u8);
                out.push(0x80 | (unit & 0x3F) as u8);
            }
            _ => {
                out.push(0xE0 | (unit >> 12) as u8);
                out.push(0x80 | ((unit >> 6) & 0x3F) as u8);
                out.push(0x80 | (unit & 0x3F) as u8);
            }
        }
    }
    out
}
