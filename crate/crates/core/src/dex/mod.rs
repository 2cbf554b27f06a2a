//! Dalvik executable parsing.
//!
//! Only the header and the identifier tables are decoded. API calls are read
//! from the `method_ids` table joined to the type and string tables, so no
//! bytecode is ever touched.

mod builder;
mod mutf8;

use std::collections::BTreeSet;
use std::fmt;

use sha1::{Digest, Sha1};
use thiserror::Error;

use crate::apk::RawPayload;
use crate::checksum::adler32;

pub use builder::DexBuilder;
pub use mutf8::{decode_mutf8, encode_mutf8};

pub const HEADER_SIZE: usize = 0x70;
pub const ENDIAN_CONSTANT: u32 = 0x1234_5678;
pub const REVERSE_ENDIAN_CONSTANT: u32 = 0x7856_3412;
pub const MIN_VERSION: u16 = 35;
pub const MAX_VERSION: u16 = 39;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DexError {
    #[error("file too short for a dex header ({0} bytes)")]
    TooShort(usize),
    #[error("bad dex magic")]
    BadMagic,
    #[error("unsupported dex version {0:?}")]
    UnsupportedVersion(String),
    #[error("bad endian tag {0:#010x}")]
    BadEndianTag(u32),
    #[error("{what} out of bounds (offset {offset}, length {len}, file size {file_size})")]
    OffsetOutOfBounds { what: &'static str, offset: u64, len: u64, file_size: u64 },
    #[error("bad uleb128 at offset {offset}")]
    BadUleb128 { offset: usize },
    #[error("malformed MUTF-8 string data at offset {offset}")]
    MutfDecodeError { offset: usize },
    #[error("{what} index {index} out of range (table size {len})")]
    IndexOutOfRange { what: &'static str, index: u32, len: u32 },
    #[error("checksum mismatch: header {expected:#010x}, computed {actual:#010x}")]
    ChecksumMismatch { expected: u32, actual: u32 },
    #[error("SHA-1 signature mismatch")]
    SignatureMismatch,
}

/// `(count, offset)` of one identifier table or section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Section {
    pub size: u32,
    pub off: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DexHeader {
    pub magic: [u8; 8],
    pub version: u16,
    pub checksum: u32,
    pub signature: [u8; 20],
    pub file_size: u32,
    pub header_size: u32,
    pub endian_tag: u32,
    pub link: Section,
    pub map_off: u32,
    pub string_ids: Section,
    pub type_ids: Section,
    pub proto_ids: Section,
    pub field_ids: Section,
    pub method_ids: Section,
    pub class_defs: Section,
    pub data: Section,
}

/// One `method_id_item`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MethodRef {
    pub class_idx: u16,
    pub proto_idx: u16,
    pub name_idx: u32,
}

/// Parsed identifier tables of one Dalvik executable.
///
/// Strings that fail MUTF-8 decoding are kept as `None` so that a single
/// garbage name only drops the features that use it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DexFile {
    pub header: DexHeader,
    pub strings: Vec<Option<String>>,
    pub type_descriptors: Vec<Option<String>>,
    pub method_refs: Vec<MethodRef>,
}

/// A referenced method, identified by `class_descriptor->method_name`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ApiCall {
    canonical: String,
    split: usize,
}

impl ApiCall {
    pub fn new(class_descriptor: &str, method_name: &str) -> Self {
        Self {
            canonical: format!("{class_descriptor}->{method_name}"),
            split: class_descriptor.len(),
        }
    }

    /// Parses the canonical `Lpkg/Class;->name` form.
    pub fn parse(canonical: &str) -> Option<Self> {
        let split = canonical.find(";->")? + 1;
        let class = &canonical[..split];
        let name = &canonical[split + 2..];
        if !class.starts_with('L') || class.len() < 3 || name.is_empty() {
            return None;
        }
        if canonical.chars().any(|c| c.is_whitespace()) {
            return None;
        }
        Some(Self { canonical: canonical.to_owned(), split })
    }

    pub fn class_descriptor(&self) -> &str {
        &self.canonical[..self.split]
    }

    pub fn method_name(&self) -> &str {
        &self.canonical[self.split + 2..]
    }

    pub fn canonical(&self) -> &str {
        &self.canonical
    }
}

impl fmt::Display for ApiCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical)
    }
}

/// Integrity checks applied while parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DexOptions {
    pub verify_checksum: bool,
    pub verify_signature: bool,
}

impl Default for DexOptions {
    fn default() -> Self {
        Self { verify_checksum: true, verify_signature: false }
    }
}

fn u16_at(b: &[u8], off: usize) -> u16 {
    u16::from_le_bytes([b[off], b[off + 1]])
}

fn u32_at(b: &[u8], off: usize) -> u32 {
    u32::from_le_bytes(b[off..off + 4].try_into().unwrap())
}

fn section_at(b: &[u8], off: usize) -> Section {
    Section { size: u32_at(b, off), off: u32_at(b, off + 4) }
}

pub fn parse_header(bytes: &[u8]) -> Result<DexHeader, DexError> {
    if bytes.len() < HEADER_SIZE {
        if bytes.len() >= 4 && &bytes[..4] != b"dex\n" {
            return Err(DexError::BadMagic);
        }
        return Err(DexError::TooShort(bytes.len()));
    }
    let magic: [u8; 8] = bytes[..8].try_into().unwrap();
    if &magic[..4] != b"dex\n" || magic[7] != 0 {
        return Err(DexError::BadMagic);
    }
    let digits = &magic[4..7];
    if !digits.iter().all(u8::is_ascii_digit) {
        return Err(DexError::BadMagic);
    }
    let version = digits.iter().fold(0u16, |acc, d| acc * 10 + u16::from(d - b'0'));
    if !(MIN_VERSION..=MAX_VERSION).contains(&version) {
        return Err(DexError::UnsupportedVersion(String::from_utf8_lossy(digits).into_owned()));
    }
    let endian_tag = u32_at(bytes, 40);
    if endian_tag != ENDIAN_CONSTANT {
        return Err(DexError::BadEndianTag(endian_tag));
    }

    let header = DexHeader {
        magic,
        version,
        checksum: u32_at(bytes, 8),
        signature: bytes[12..32].try_into().unwrap(),
        file_size: u32_at(bytes, 32),
        header_size: u32_at(bytes, 36),
        endian_tag,
        link: section_at(bytes, 44),
        map_off: u32_at(bytes, 52),
        string_ids: section_at(bytes, 56),
        type_ids: section_at(bytes, 64),
        proto_ids: section_at(bytes, 72),
        field_ids: section_at(bytes, 80),
        method_ids: section_at(bytes, 88),
        class_defs: section_at(bytes, 96),
        data: Section { size: u32_at(bytes, 104), off: u32_at(bytes, 108) },
    };

    let file_size = u64::from(header.file_size);
    if file_size > bytes.len() as u64 || file_size < HEADER_SIZE as u64 {
        return Err(DexError::OffsetOutOfBounds {
            what: "file_size",
            offset: 0,
            len: file_size,
            file_size: bytes.len() as u64,
        });
    }
    if header.header_size as usize != HEADER_SIZE {
        return Err(DexError::OffsetOutOfBounds {
            what: "header_size",
            offset: 0,
            len: u64::from(header.header_size),
            file_size,
        });
    }
    let tables: [(&'static str, Section, u64); 8] = [
        ("string_ids", header.string_ids, 4),
        ("type_ids", header.type_ids, 4),
        ("proto_ids", header.proto_ids, 12),
        ("field_ids", header.field_ids, 8),
        ("method_ids", header.method_ids, 8),
        ("class_defs", header.class_defs, 32),
        ("data", header.data, 1),
        ("link", header.link, 1),
    ];
    for (what, section, width) in tables {
        let len = u64::from(section.size) * width;
        if section.size != 0 && u64::from(section.off) + len > file_size {
            return Err(DexError::OffsetOutOfBounds {
                what,
                offset: u64::from(section.off),
                len,
                file_size,
            });
        }
    }
    if header.map_off != 0 && u64::from(header.map_off) + 4 > file_size {
        return Err(DexError::OffsetOutOfBounds {
            what: "map_off",
            offset: u64::from(header.map_off),
            len: 4,
            file_size,
        });
    }
    Ok(header)
}

/// True iff the Adler-32 of `bytes[12..file_size)` equals the header checksum.
pub fn verify_checksum(bytes: &[u8], header: &DexHeader) -> bool {
    match bytes.get(12..header.file_size as usize) {
        Some(body) => adler32(body) == header.checksum,
        None => false,
    }
}

/// True iff the SHA-1 of `bytes[32..file_size)` equals the header signature.
pub fn verify_signature(bytes: &[u8], header: &DexHeader) -> bool {
    match bytes.get(32..header.file_size as usize) {
        Some(body) => Sha1::digest(body).as_slice() == header.signature,
        None => false,
    }
}

/// Reads a uleb128 of at most five bytes.
pub fn read_uleb128(bytes: &[u8], offset: usize) -> Result<(u32, usize), DexError> {
    let mut value: u32 = 0;
    for i in 0..5 {
        let byte = *bytes.get(offset + i).ok_or(DexError::BadUleb128 { offset })?;
        if i == 4 && byte > 0x0F {
            return Err(DexError::BadUleb128 { offset });
        }
        value |= u32::from(byte & 0x7F) << (7 * i);
        if byte & 0x80 == 0 {
            return Ok((value, i + 1));
        }
    }
    Err(DexError::BadUleb128 { offset })
}

/// Parses without integrity checks.
pub fn parse_dex(bytes: &[u8]) -> Result<DexFile, DexError> {
    parse_dex_with(bytes, DexOptions { verify_checksum: false, verify_signature: false })
}

pub fn parse_dex_with(bytes: &[u8], options: DexOptions) -> Result<DexFile, DexError> {
    let header = parse_header(bytes)?;
    let data = &bytes[..header.file_size as usize];
    if options.verify_checksum {
        let actual = adler32(&data[12..]);
        if actual != header.checksum {
            return Err(DexError::ChecksumMismatch { expected: header.checksum, actual });
        }
    }
    if options.verify_signature && !verify_signature(data, &header) {
        return Err(DexError::SignatureMismatch);
    }

    let strings = read_strings(data, &header)?;
    let string_count = header.string_ids.size;

    let mut type_descriptors = Vec::with_capacity(header.type_ids.size as usize);
    for i in 0..header.type_ids.size as usize {
        let idx = u32_at(data, header.type_ids.off as usize + 4 * i);
        if idx >= string_count {
            return Err(DexError::IndexOutOfRange { what: "type descriptor", index: idx, len: string_count });
        }
        type_descriptors.push(strings[idx as usize].clone());
    }

    let mut method_refs = Vec::with_capacity(header.method_ids.size as usize);
    for i in 0..header.method_ids.size as usize {
        let at = header.method_ids.off as usize + 8 * i;
        let m = MethodRef {
            class_idx: u16_at(data, at),
            proto_idx: u16_at(data, at + 2),
            name_idx: u32_at(data, at + 4),
        };
        check_index("method class", u32::from(m.class_idx), header.type_ids.size)?;
        check_index("method proto", u32::from(m.proto_idx), header.proto_ids.size)?;
        check_index("method name", m.name_idx, string_count)?;
        method_refs.push(m);
    }

    Ok(DexFile { header, strings, type_descriptors, method_refs })
}

fn check_index(what: &'static str, index: u32, len: u32) -> Result<(), DexError> {
    if index < len {
        Ok(())
    } else {
        Err(DexError::IndexOutOfRange { what, index, len })
    }
}

fn read_strings(data: &[u8], header: &DexHeader) -> Result<Vec<Option<String>>, DexError> {
    let count = header.string_ids.size as usize;
    let mut strings = Vec::with_capacity(count);
    for i in 0..count {
        let off = u32_at(data, header.string_ids.off as usize + 4 * i) as usize;
        if off >= data.len() {
            return Err(DexError::OffsetOutOfBounds {
                what: "string_data",
                offset: off as u64,
                len: 1,
                file_size: data.len() as u64,
            });
        }
        let (utf16_len, n) = read_uleb128(data, off)?;
        let decoded = match decode_mutf8(data, off + n) {
            Ok((s, units)) if units == utf16_len as usize => Some(s),
            _ => None,
        };
        strings.push(decoded);
    }
    Ok(strings)
}

impl DexFile {
    pub fn string(&self, idx: u32) -> Option<&str> {
        self.strings.get(idx as usize)?.as_deref()
    }

    pub fn type_descriptor(&self, idx: u16) -> Option<&str> {
        self.type_descriptors.get(usize::from(idx))?.as_deref()
    }

    /// Resolves one method reference, if both names decoded and the owner is
    /// a class type (array owners such as `[I` are skipped).
    pub fn api_call(&self, m: &MethodRef) -> Option<ApiCall> {
        let class = self.type_descriptor(m.class_idx)?;
        let name = self.string(m.name_idx)?;
        if !(class.len() >= 3 && class.starts_with('L') && class.ends_with(';')) || name.is_empty() {
            return None;
        }
        Some(ApiCall::new(class, name))
    }
}

/// The distinct `class->method` references of one executable.
pub fn extract_api_calls(dex: &DexFile) -> BTreeSet<ApiCall> {
    dex.method_refs.iter().filter_map(|m| dex.api_call(m)).collect()
}

/// A dex parse failure annotated with the APK entry it came from.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{entry}: {source}")]
pub struct DexEntryError {
    pub entry: String,
    #[source]
    pub source: DexError,
}

/// Union of the API calls of every dex entry in `payload`.
pub fn extract_api_calls_multi(
    payload: &RawPayload,
    options: DexOptions,
) -> Result<BTreeSet<ApiCall>, DexEntryError> {
    let mut all = BTreeSet::new();
    for (entry, bytes) in &payload.dex_payloads {
        let dex = parse_dex_with(bytes, options)
            .map_err(|source| DexEntryError { entry: entry.clone(), source })?;
        all.extend(extract_api_calls(&dex));
    }
    Ok(all)
}
