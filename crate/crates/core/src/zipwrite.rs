//! Minimal PKZIP writer (stored and deflate entries, no ZIP64) used to
//! assemble synthetic APKs.

use std::io::Write;

use flate2::write::DeflateEncoder;
use flate2::Compression;

struct CentralRecord {
    name: String,
    method: u16,
    crc32: u32,
    compressed: u32,
    uncompressed: u32,
    offset: u32,
}

pub struct ZipBuilder {
    buf: Vec<u8>,
    records: Vec<CentralRecord>,
    level: Compression,
}

impl Default for ZipBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ZipBuilder {
    pub fn new() -> Self {
        Self { buf: Vec::new(), records: Vec::new(), level: Compression::default() }
    }

    pub fn with_capacity(bytes: usize, level: Compression) -> Self {
        Self { buf: Vec::with_capacity(bytes), records: Vec::new(), level }
    }

    /// Bytes written so far, excluding the central directory.
    pub fn written(&self) -> usize {
        self.buf.len()
    }

    pub fn add_stored(&mut self, name: &str, body: &[u8]) {
        self.add_raw(name, 0, crc32fast::hash(body), body, body.len());
    }

    pub fn add_deflated(&mut self, name: &str, body: &[u8]) {
        let mut enc = DeflateEncoder::new(Vec::with_capacity(body.len() / 2 + 64), self.level);
        enc.write_all(body).expect("writing to a Vec cannot fail");
        let compressed = enc.finish().expect("writing to a Vec cannot fail");
        self.add_raw(name, 8, crc32fast::hash(body), &compressed, body.len());
    }

    fn add_raw(&mut self, name: &str, method: u16, crc32: u32, data: &[u8], uncompressed: usize) {
        let offset = self.buf.len() as u32;
        let b = &mut self.buf;
        b.extend_from_slice(&0x0403_4b50u32.to_le_bytes());
        b.extend_from_slice(&20u16.to_le_bytes()); // version needed
        b.extend_from_slice(&0u16.to_le_bytes()); // flags
        b.extend_from_slice(&method.to_le_bytes());
        b.extend_from_slice(&0u16.to_le_bytes()); // mod time
        b.extend_from_slice(&0x21u16.to_le_bytes()); // mod date: 1980-01-01
        b.extend_from_slice(&crc32.to_le_bytes());
        b.extend_from_slice(&(data.len() as u32).to_le_bytes());
        b.extend_from_slice(&(uncompressed as u32).to_le_bytes());
        b.extend_from_slice(&(name.len() as u16).to_le_bytes());
        b.extend_from_slice(&0u16.to_le_bytes()); // extra len
        b.extend_from_slice(name.as_bytes());
        b.extend_from_slice(data);
        self.records.push(CentralRecord {
            name: name.to_owned(),
            method,
            crc32,
            compressed: data.len() as u32,
            uncompressed: uncompressed as u32,
            offset,
        });
    }

    pub fn finish(self) -> Vec<u8> {
        self.finish_with_comment(&[])
    }

    /// Finishes the archive with an end-of-central-directory comment.
    pub fn finish_with_comment(mut self, comment: &[u8]) -> Vec<u8> {
        assert!(comment.len() <= usize::from(u16::MAX), "ZIP comments hold at most 65535 bytes");
        let cd_start = self.buf.len() as u32;
        for r in &self.records {
            let b = &mut self.buf;
            b.extend_from_slice(&0x0201_4b50u32.to_le_bytes());
            b.extend_from_slice(&20u16.to_le_bytes()); // version made by
            b.extend_from_slice(&20u16.to_le_bytes()); // version needed
            b.extend_from_slice(&0u16.to_le_bytes());
            b.extend_from_slice(&r.method.to_le_bytes());
            b.extend_from_slice(&0u16.to_le_bytes());
            b.extend_from_slice(&0x21u16.to_le_bytes());
            b.extend_from_slice(&r.crc32.to_le_bytes());
            b.extend_from_slice(&r.compressed.to_le_bytes());
            b.extend_from_slice(&r.uncompressed.to_le_bytes());
            b.extend_from_slice(&(r.name.len() as u16).to_le_bytes());
            b.extend_from_slice(&[0u8; 8]); // extra, comment, disk, internal attrs
            b.extend_from_slice(&0u32.to_le_bytes()); // external attrs
            b.extend_from_slice(&r.offset.to_le_bytes());
            b.extend_from_slice(r.name.as_bytes());
        }
        let cd_size = self.buf.len() as u32 - cd_start;
        let count = self.records.len() as u16;
        let b = &mut self.buf;
        b.extend_from_slice(&0x0605_4b50u32.to_le_bytes());
        b.extend_from_slice(&[0u8; 4]); // disk numbers
        b.extend_from_slice(&count.to_le_bytes());
        b.extend_from_slice(&count.to_le_bytes());
        b.extend_from_slice(&cd_size.to_le_bytes());
        b.extend_from_slice(&cd_start.to_le_bytes());
        b.extend_from_slice(&(comment.len() as u16).to_le_bytes());
        b.extend_from_slice(comment);
        self.buf
    }
}
