//! APK container access: the ZIP central directory and the entry bodies the
//! feature extractor needs (the binary manifest and every `classesN.dex`).

use std::collections::HashSet;
use std::path::Path;
use std::sync::Arc;

use flate2::{Decompress, FlushDecompress, Status};
use thiserror::Error;

pub const MANIFEST_ENTRY: &str = "AndroidManifest.xml";

const EOCD_SIG: u32 = 0x0605_4b50;
const EOCD_LEN: usize = 22;
const ZIP64_LOCATOR_SIG: u32 = 0x0706_4b50;
const CDIR_SIG: u32 = 0x0201_4b50;
const CDIR_LEN: usize = 46;
const LOCAL_SIG: u32 = 0x0403_4b50;
const LOCAL_LEN: usize = 30;
const MAX_COMMENT: usize = 0xFFFF;

#[derive(Debug, Error)]
pub enum ApkError {
    #[error("not a ZIP archive: no end-of-central-directory record")]
    NotAZip,
    #[error("truncated archive: {0}")]
    TruncatedArchive(String),
    #[error("duplicate entry name {0:?}")]
    DuplicateEntryName(String),
    #[error("ZIP64 archives are not supported")]
    Zip64Unsupported,
    #[error("entry {0:?} is encrypted")]
    EncryptedEntry(String),
    #[error("entry {name:?} uses unsupported compression method {method}")]
    UnsupportedCompression { name: String, method: u16 },
    #[error("archive has no {MANIFEST_ENTRY} entry")]
    MissingManifest,
    #[error("archive has no classes.dex entry")]
    MissingDex,
    #[error("inflate failed for {name:?}: {reason}")]
    InflateError { name: String, reason: String },
    #[error("CRC-32 mismatch for {0:?}")]
    CrcMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CompressionMethod {
    Stored,
    Deflated,
    Other(u16),
}

impl CompressionMethod {
    fn from_raw(raw: u16) -> Self {
        match raw {
            0 => Self::Stored,
            8 => Self::Deflated,
            m => Self::Other(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZipEntry {
    pub name: String,
    pub compressed_size: u64,
    pub uncompressed_size: u64,
    pub method: CompressionMethod,
    pub crc32: u32,
    local_header_offset: u64,
}

/// Parsed view of an APK. Only the central directory is decoded at open time;
/// entry bodies stay compressed until requested.
#[derive(Debug, Clone)]
pub struct ApkArchive {
    data: Arc<[u8]>,
    entries: Vec<ZipEntry>,
}

/// Decompressed manifest and Dalvik executables of one APK.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPayload {
    pub manifest_bytes: Vec<u8>,
    /// `(entry name, bytes)` in multidex order: `classes.dex`, `classes2.dex`, ...
    pub dex_payloads: Vec<(String, Vec<u8>)>,
}

fn u16_at(buf: &[u8], off: usize) -> u16 {
    u16::from_le_bytes([buf[off], buf[off + 1]])
}

fn u32_at(buf: &[u8], off: usize) -> u32 {
    u32::from_le_bytes([buf[off], buf[off + 1], buf[off + 2], buf[off + 3]])
}

/// Reads the archive at `path` and parses its central directory.
pub fn open_apk(path: impl AsRef<Path>) -> Result<ApkArchive, ApkError> {
    let bytes = std::fs::read(path)?;
    ApkArchive::from_bytes(bytes)
}

impl ApkArchive {
    pub fn from_bytes(bytes: impl Into<Arc<[u8]>>) -> Result<Self, ApkError> {
        let data: Arc<[u8]> = bytes.into();
        let entries = parse_central_directory(&data)?;
        Ok(Self { data, entries })
    }

    pub fn entries(&self) -> &[ZipEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Size of the underlying archive in bytes.
    pub fn archive_size(&self) -> u64 {
        self.data.len() as u64
    }

    pub fn entry(&self, name: &str) -> Option<&ZipEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Decompresses one entry and checks its CRC-32.
    pub fn read_entry(&self, entry: &ZipEntry) -> Result<Vec<u8>, ApkError> {
        let start = self.data_start(entry)?;
        let end = start
            .checked_add(entry.compressed_size)
            .filter(|&end| end <= self.data.len() as u64)
            .ok_or_else(|| {
                ApkError::TruncatedArchive(format!("data of {:?} runs past end of file", entry.name))
            })?;
        let raw = &self.data[start as usize..end as usize];
        let body = match entry.method {
            CompressionMethod::Stored => {
                if entry.compressed_size != entry.uncompressed_size {
                    return Err(ApkError::TruncatedArchive(format!(
                        "stored entry {:?} has mismatched sizes",
                        entry.name
                    )));
                }
                raw.to_vec()
            }
            CompressionMethod::Deflated => inflate(&entry.name, raw, entry.uncompressed_size)?,
            CompressionMethod::Other(method) => {
                return Err(ApkError::UnsupportedCompression { name: entry.name.clone(), method })
            }
        };
        if crc32fast::hash(&body) != entry.crc32 {
            return Err(ApkError::CrcMismatch(entry.name.clone()));
        }
        Ok(body)
    }

    fn data_start(&self, entry: &ZipEntry) -> Result<u64, ApkError> {
        let off = entry.local_header_offset as usize;
        let truncated =
            || ApkError::TruncatedArchive(format!("local header of {:?} out of range", entry.name));
        let header = self.data.get(off..off.checked_add(LOCAL_LEN).ok_or_else(truncated)?);
        let header = header.ok_or_else(truncated)?;
        if u32_at(header, 0) != LOCAL_SIG {
            return Err(ApkError::TruncatedArchive(format!(
                "bad local header signature for {:?}",
                entry.name
            )));
        }
        let name_len = u64::from(u16_at(header, 26));
        let extra_len = u64::from(u16_at(header, 28));
        Ok(entry.local_header_offset + LOCAL_LEN as u64 + name_len + extra_len)
    }

    /// Decompresses the manifest and all Dalvik executables.
    pub fn extract_raw_payload(&self) -> Result<RawPayload, ApkError> {
        let manifest = self.entry(MANIFEST_ENTRY).ok_or(ApkError::MissingManifest)?;
        let manifest_bytes = self.read_entry(manifest)?;
        if manifest_bytes.is_empty() {
            return Err(ApkError::MissingManifest);
        }

        let mut dex: Vec<(u32, &ZipEntry)> = self
            .entries
            .iter()
            .filter_map(|e| dex_ordinal(&e.name).map(|n| (n, e)))
            .collect();
        if !dex.iter().any(|(n, _)| *n == 1) {
            return Err(ApkError::MissingDex);
        }
        dex.sort_by_key(|(n, _)| *n);

        let dex_payloads = dex
            .into_iter()
            .map(|(_, e)| Ok((e.name.clone(), self.read_entry(e)?)))
            .collect::<Result<Vec<_>, ApkError>>()?;
        Ok(RawPayload { manifest_bytes, dex_payloads })
    }
}

/// Position of a top-level dex entry in multidex order: `classes.dex` is 1,
/// `classesN.dex` is N for N >= 2. Anything else is not a dex entry.
pub fn dex_ordinal(name: &str) -> Option<u32> {
    let digits = name.strip_prefix("classes")?.strip_suffix(".dex")?;
    if digits.is_empty() {
        return Some(1);
    }
    if digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<u32>().ok().filter(|&n| n >= 2)
}

fn inflate(name: &str, raw: &[u8], expected: u64) -> Result<Vec<u8>, ApkError> {
    let err = |reason: String| ApkError::InflateError { name: name.to_owned(), reason };
    let expected = usize::try_from(expected).map_err(|_| err("entry too large".into()))?;
    // One spare byte lets an over-long stream show up as a size mismatch.
    let mut out = Vec::with_capacity(expected + 1);
    let mut inflater = Decompress::new(false);
    loop {
        let (seen_in, seen_out) = (inflater.total_in(), inflater.total_out());
        let status = inflater
            .decompress_vec(&raw[seen_in as usize..], &mut out, FlushDecompress::Finish)
            .map_err(|e| err(e.to_string()))?;
        if status == Status::StreamEnd {
            break;
        }
        if out.len() > expected {
            return Err(err("stream longer than declared size".into()));
        }
        if inflater.total_in() == seen_in && inflater.total_out() == seen_out {
            return Err(err("unexpected end of deflate stream".into()));
        }
    }
    if out.len() != expected {
        return Err(err(format!("inflated {} bytes, expected {expected}", out.len())));
    }
    Ok(out)
}

fn parse_central_directory(data: &[u8]) -> Result<Vec<ZipEntry>, ApkError> {
    let eocd = find_eocd(data).ok_or(ApkError::NotAZip)?;
    if eocd >= 20 && u32_at(data, eocd - 20) == ZIP64_LOCATOR_SIG {
        return Err(ApkError::Zip64Unsupported);
    }
    let disk_entries = u16_at(data, eocd + 8);
    let total_entries = u16_at(data, eocd + 10);
    let cd_size = u32_at(data, eocd + 12);
    let cd_offset = u32_at(data, eocd + 16);
    if total_entries == 0xFFFF || cd_size == 0xFFFF_FFFF || cd_offset == 0xFFFF_FFFF {
        return Err(ApkError::Zip64Unsupported);
    }
    if disk_entries != total_entries {
        return Err(ApkError::TruncatedArchive("multi-disk archive".into()));
    }
    let cd_start = cd_offset as usize;
    let cd_end = cd_start
        .checked_add(cd_size as usize)
        .filter(|&end| end <= eocd)
        .ok_or_else(|| ApkError::TruncatedArchive("central directory out of range".into()))?;

    let mut entries = Vec::with_capacity(usize::from(total_entries));
    let mut seen = HashSet::with_capacity(usize::from(total_entries));
    let mut pos = cd_start;
    for _ in 0..total_entries {
        let rec = data
            .get(pos..pos + CDIR_LEN)
            .filter(|_| pos + CDIR_LEN <= cd_end)
            .ok_or_else(|| ApkError::TruncatedArchive("central directory record cut short".into()))?;
        if u32_at(rec, 0) != CDIR_SIG {
            return Err(ApkError::TruncatedArchive(format!(
                "bad central directory signature at offset {pos}"
            )));
        }
        let flags = u16_at(rec, 8);
        let method = u16_at(rec, 10);
        let crc32 = u32_at(rec, 16);
        let compressed = u32_at(rec, 20);
        let uncompressed = u32_at(rec, 24);
        let name_len = usize::from(u16_at(rec, 28));
        let extra_len = usize::from(u16_at(rec, 30));
        let comment_len = usize::from(u16_at(rec, 32));
        let local_offset = u32_at(rec, 42);

        let name_start = pos + CDIR_LEN;
        let next = name_start + name_len + extra_len + comment_len;
        if next > cd_end {
            return Err(ApkError::TruncatedArchive("central directory record cut short".into()));
        }
        let name = String::from_utf8_lossy(&data[name_start..name_start + name_len]).into_owned();

        if compressed == 0xFFFF_FFFF || uncompressed == 0xFFFF_FFFF || local_offset == 0xFFFF_FFFF {
            return Err(ApkError::Zip64Unsupported);
        }
        if flags & 0x0001 != 0 {
            return Err(ApkError::EncryptedEntry(name));
        }
        if !seen.insert(name.clone()) {
            return Err(ApkError::DuplicateEntryName(name));
        }
        entries.push(ZipEntry {
            name,
            compressed_size: u64::from(compressed),
            uncompressed_size: u64::from(uncompressed),
            method: CompressionMethod::from_raw(method),
            crc32,
            local_header_offset: u64::from(local_offset),
        });
        pos = next;
    }
    Ok(entries)
}

fn find_eocd(data: &[u8]) -> Option<usize> {
    if data.len() < EOCD_LEN {
        return None;
    }
    let last = data.len() - EOCD_LEN;
    let first = last.saturating_sub(MAX_COMMENT);
    (first..=last).rev().find(|&pos| {
        u32_at(data, pos) == EOCD_SIG
            && pos + EOCD_LEN + usize::from(u16_at(data, pos + 20)) == data.len()
    })
}
