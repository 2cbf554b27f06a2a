//! Independent Dalvik executable writer.
//!
//! Layout: header, string_ids, type_ids, proto_ids, method_ids, map_list,
//! then string data. Tables are sorted the way the platform tools sort
//! them, so a fixture is a well-formed executable and not just something
//! this parser happens to accept.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use sha1::{Digest, Sha1};

pub const HEADER_SIZE: usize = 0x70;

/// What a fixture should decode to.
#[derive(Debug, Clone)]
pub struct BuiltDex {
    pub bytes: Vec<u8>,
    pub strings: Vec<String>,
    pub types: Vec<String>,
    /// `(class_idx, proto_idx, name_idx)` in table order.
    pub methods: Vec<(u16, u16, u32)>,
    /// `Lclass;->name` for every method whose owner is a class type.
    pub planted: BTreeSet<String>,
    pub checksum: u32,
    pub signature: [u8; 20],
}

/// Modified UTF-8: UTF-16 code units, NUL as `C0 80`, surrogates encoded
/// one unit at a time.
pub fn mutf8(s: &str) -> Vec<u8> {
    let mut out = Vec::new();
    for u in s.encode_utf16() {
        let u = u32::from(u);
        match u {
            0x01..=0x7F => out.push(u as u8),
            0x00 | 0x80..=0x7FF => {
                out.push(0xC0 | (u >> 6) as u8);
                out.push(0x80 | (u & 0x3F) as u8);
            }
            _ => {
                out.push(0xE0 | (u >> 12) as u8);
                out.push(0x80 | ((u >> 6) & 0x3F) as u8);
                out.push(0x80 | (u & 0x3F) as u8);
            }
        }
    }
    out
}

pub fn uleb128(mut v: u32) -> Vec<u8> {
    let mut out = Vec::new();
    loop {
        let byte = (v & 0x7F) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return out;
        }
        out.push(byte | 0x80);
    }
}

/// Platform string order: by UTF-16 code units.
fn utf16_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    a.encode_utf16().cmp(b.encode_utf16())
}

/// Builds an executable referencing `methods` as `(owner descriptor, name)`
/// pairs, all with prototype `()V`. `extra_strings` adds unreferenced pool
/// entries.
pub fn build_dex(methods: &[(String, String)], extra_strings: &[String], version: &[u8; 3]) -> BuiltDex {
    let mut pool: BTreeSet<String> = extra_strings.iter().cloned().collect();
    pool.insert("V".to_owned());
    for (class, name) in methods {
        pool.insert(class.clone());
        pool.insert(name.clone());
    }
    let mut strings: Vec<String> = pool.into_iter().collect();
    strings.sort_by(|a, b| utf16_cmp(a, b));
    let sidx: BTreeMap<&str, u32> = strings.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();

    let mut type_set: BTreeSet<u32> = methods.iter().map(|(c, _)| sidx[c.as_str()]).collect();
    type_set.insert(sidx["V"]);
    let type_string_idx: Vec<u32> = type_set.into_iter().collect();
    let types: Vec<String> = type_string_idx.iter().map(|&i| strings[i as usize].clone()).collect();
    let tidx: BTreeMap<u32, u16> = type_string_idx.iter().enumerate().map(|(t, &s)| (s, t as u16)).collect();

    let mut method_items: Vec<(u16, u16, u32)> = methods
        .iter()
        .map(|(c, n)| (tidx[&sidx[c.as_str()]], 0u16, sidx[n.as_str()]))
        .collect();
    method_items.sort_by_key(|&(c, p, n)| (c, n, p));
    method_items.dedup();

    let n_str = strings.len();
    let string_ids_off = HEADER_SIZE;
    let type_ids_off = string_ids_off + 4 * n_str;
    let proto_ids_off = type_ids_off + 4 * types.len();
    let method_ids_off = proto_ids_off + 12;
    let map_off = method_ids_off + 8 * method_items.len();
    let map_entries = 6u32;
    let data_off = map_off + 4 + 12 * map_entries as usize;

    let mut data = Vec::new();
    let mut string_offsets = Vec::with_capacity(n_str);
    for s in &strings {
        string_offsets.push((data_off + data.len()) as u32);
        data.extend(uleb128(s.encode_utf16().count() as u32));
        data.extend(mutf8(s));
        data.push(0);
    }
    while data.len() % 4 != 0 {
        data.push(0);
    }
    let file_size = data_off + data.len();

    let mut b = Vec::with_capacity(file_size);
    b.extend_from_slice(b"dex\n");
    b.extend_from_slice(version);
    b.push(0);
    b.extend_from_slice(&[0; 4 + 20]);
    let put = |b: &mut Vec<u8>, v: usize| b.extend_from_slice(&(v as u32).to_le_bytes());
    put(&mut b, file_size);
    put(&mut b, HEADER_SIZE);
    put(&mut b, 0x1234_5678);
    put(&mut b, 0); // link_size
    put(&mut b, 0); // link_off
    put(&mut b, map_off);
    for (size, off) in [
        (n_str, string_ids_off),
        (types.len(), type_ids_off),
        (1, proto_ids_off),
        (0, 0),
        (method_items.len(), if method_items.is_empty() { 0 } else { method_ids_off }),
        (0, 0),
        (file_size - data_off, data_off),
    ] {
        put(&mut b, size);
        put(&mut b, off);
    }
    assert_eq!(b.len(), HEADER_SIZE);
    for off in &string_offsets {
        put(&mut b, *off as usize);
    }
    for s in &type_string_idx {
        put(&mut b, *s as usize);
    }
    // proto ()V: shorty "V", return type V, no parameters.
    put(&mut b, sidx["V"] as usize);
    put(&mut b, usize::from(tidx[&sidx["V"]]));
    put(&mut b, 0);
    for (c, p, n) in &method_items {
        b.extend_from_slice(&c.to_le_bytes());
        b.extend_from_slice(&p.to_le_bytes());
        put(&mut b, *n as usize);
    }
    put(&mut b, map_entries as usize);
    for (ty, size, off) in [
        (0x0000u16, 1, 0),
        (0x0001, n_str, string_ids_off),
        (0x0002, types.len(), type_ids_off),
        (0x0003, 1, proto_ids_off),
        (0x0005, method_items.len(), method_ids_off),
        (0x2002, n_str, data_off),
    ] {
        b.extend_from_slice(&ty.to_le_bytes());
        b.extend_from_slice(&[0, 0]);
        put(&mut b, size);
        put(&mut b, off);
    }
    b.extend(data);
    assert_eq!(b.len(), file_size);

    let signature: [u8; 20] = Sha1::digest(&b[32..]).into();
    b[12..32].copy_from_slice(&signature);
    let checksum = adler2::adler32_slice(&b[12..]);
    b[8..12].copy_from_slice(&checksum.to_le_bytes());

    let planted = method_items
        .iter()
        .map(|&(c, _, n)| (&types[usize::from(c)], &strings[n as usize]))
        .filter(|(c, _)| c.starts_with('L'))
        .map(|(c, n)| format!("{c}->{n}"))
        .collect();
    BuiltDex { bytes: b, strings, types, methods: method_items, planted, checksum, signature }
}

const SEGMENTS: &[&str] = &["android", "app", "net", "telephony", "java", "lang", "io", "com", "ex", "ümlaut", "中文", "a"];
const NAMES: &[&str] = &["<init>", "run", "sendTextMessage", "get", "x", "naïve", "日本", "e\u{0}nul", "😀emoji", "$lambda$0"];

/// A random class descriptor, occasionally an array owner.
pub fn random_class(rng: &mut impl Rng) -> String {
    if rng.gen_ratio(1, 12) {
        return ["[I", "[Ljava/lang/String;", "[[B"][rng.gen_range(0..3)].to_owned();
    }
    let depth = rng.gen_range(1..=4);
    let segs: Vec<&str> = (0..depth).map(|_| SEGMENTS[rng.gen_range(0..SEGMENTS.len())]).collect();
    format!("L{}/C{};", segs.join("/"), rng.gen_range(0..40))
}

pub fn random_name(rng: &mut impl Rng) -> String {
    let base = NAMES[rng.gen_range(0..NAMES.len())];
    if rng.gen_bool(0.5) {
        format!("{base}{}", rng.gen_range(0..100))
    } else {
        base.to_owned()
    }
}

/// A random fixture with up to `max_methods` method references.
pub fn random_dex(rng: &mut impl Rng, max_methods: usize) -> BuiltDex {
    let n = rng.gen_range(0..=max_methods);
    let methods: Vec<(String, String)> = (0..n).map(|_| (random_class(rng), random_name(rng))).collect();
    let extra: Vec<String> = (0..rng.gen_range(0..5)).map(|_| random_name(rng)).collect();
    let version = [b"035", b"037", b"038", b"039"][rng.gen_range(0..4)];
    build_dex(&methods, &extra, version)
}
