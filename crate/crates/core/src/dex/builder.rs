//! Writes well-formed version 035 Dalvik executables containing only
//! identifier tables, used to synthesize APKs.

use std::collections::{BTreeMap, BTreeSet};

use sha1::{Digest, Sha1};

use super::{encode_mutf8, ENDIAN_CONSTANT, HEADER_SIZE};
use crate::checksum::adler32;

const TYPE_HEADER_ITEM: u16 = 0x0000;
const TYPE_STRING_ID_ITEM: u16 = 0x0001;
const TYPE_TYPE_ID_ITEM: u16 = 0x0002;
const TYPE_PROTO_ID_ITEM: u16 = 0x0003;
const TYPE_METHOD_ID_ITEM: u16 = 0x0005;
const TYPE_MAP_LIST: u16 = 0x1000;
const TYPE_STRING_DATA_ITEM: u16 = 0x2002;

#[derive(Debug, Clone, Default)]
pub struct DexBuilder {
    methods: Vec<(String, String)>,
    filler: Vec<u8>,
}

fn utf16_key(s: &str) -> Vec<u16> {
    s.encode_utf16().collect()
}

fn uleb128(mut v: u32, out: &mut Vec<u8>) {
    loop {
        let byte = (v & 0x7F) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

impl DexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a `()V` method `name` on `class_descriptor`.
    pub fn method(mut self, class_descriptor: &str, name: &str) -> Self {
        self.methods.push((class_descriptor.to_owned(), name.to_owned()));
        self
    }

    pub fn methods<I, S, T>(mut self, methods: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        self.methods.extend(methods.into_iter().map(|(c, n)| (c.into(), n.into())));
        self
    }

    /// Opaque bytes placed in the data section, outside every table.
    pub fn filler(mut self, filler: Vec<u8>) -> Self {
        self.filler = filler;
        self
    }

    /// Size of the output without filler.
    pub fn base_size(&self) -> usize {
        let mut probe = self.clone();
        probe.filler.clear();
        probe.build().len()
    }

    pub fn build(&self) -> Vec<u8> {
        // String pool in UTF-16 code unit order, as the format requires.
        let mut pool: BTreeSet<String> = BTreeSet::new();
        pool.insert("V".to_owned());
        for (class, name) in &self.methods {
            pool.insert(class.clone());
            pool.insert(name.clone());
        }
        let mut strings: Vec<String> = pool.into_iter().collect();
        strings.sort_by_key(|s| utf16_key(s));
        let string_idx: BTreeMap<&str, u32> =
            strings.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();

        let mut type_strings: Vec<u32> = self
            .methods
            .iter()
            .map(|(c, _)| string_idx[c.as_str()])
            .chain(std::iter::once(string_idx["V"]))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        type_strings.sort_unstable();
        let type_idx: BTreeMap<u32, u16> =
            type_strings.iter().enumerate().map(|(i, &s)| (s, i as u16)).collect();

        let mut method_ids: Vec<(u16, u16, u32)> = self
            .methods
            .iter()
            .map(|(c, n)| (type_idx[&string_idx[c.as_str()]], 0u16, string_idx[n.as_str()]))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        method_ids.sort_by_key(|&(class, proto, name)| (class, name, proto));
        // Duplicates in the input collapse, as a compiler would emit them.
        method_ids.dedup();

        let string_ids_off = HEADER_SIZE;
        let type_ids_off = string_ids_off + 4 * strings.len();
        let proto_ids_off = type_ids_off + 4 * type_strings.len();
        let method_ids_off = proto_ids_off + 12;
        let data_off = method_ids_off + 8 * method_ids.len();

        let mut data = Vec::new();
        let mut string_offsets = Vec::with_capacity(strings.len());
        for s in &strings {
            string_offsets.push((data_off + data.len()) as u32);
            uleb128(s.encode_utf16().count() as u32, &mut data);
            data.extend_from_slice(&encode_mutf8(s));
            data.push(0);
        }
        data.extend_from_slice(&self.filler);
        while !(data_off + data.len()).is_multiple_of(4) {
            data.push(0);
        }
        let map_off = data_off + data.len();
        let map: [(u16, usize, usize); 7] = [
            (TYPE_HEADER_ITEM, 1, 0),
            (TYPE_STRING_ID_ITEM, strings.len(), string_ids_off),
            (TYPE_TYPE_ID_ITEM, type_strings.len(), type_ids_off),
            (TYPE_PROTO_ID_ITEM, 1, proto_ids_off),
            (TYPE_METHOD_ID_ITEM, method_ids.len(), method_ids_off),
            (TYPE_STRING_DATA_ITEM, strings.len(), data_off),
            (TYPE_MAP_LIST, 1, map_off),
        ];
        let map: Vec<_> = map.into_iter().filter(|&(_, n, _)| n > 0).collect();
        data.extend_from_slice(&(map.len() as u32).to_le_bytes());
        for (ty, n, off) in &map {
            data.extend_from_slice(&ty.to_le_bytes());
            data.extend_from_slice(&0u16.to_le_bytes());
            data.extend_from_slice(&(*n as u32).to_le_bytes());
            data.extend_from_slice(&(*off as u32).to_le_bytes());
        }
        let file_size = data_off + data.len();

        let mut out = Vec::with_capacity(file_size);
        out.extend_from_slice(b"dex\n035\0");
        out.extend_from_slice(&[0u8; 24]); // checksum + signature, patched below
        let put = |out: &mut Vec<u8>, v: usize| out.extend_from_slice(&(v as u32).to_le_bytes());
        put(&mut out, file_size);
        put(&mut out, HEADER_SIZE);
        out.extend_from_slice(&ENDIAN_CONSTANT.to_le_bytes());
        put(&mut out, 0); // link_size
        put(&mut out, 0); // link_off
        put(&mut out, map_off);
        for (size, off) in [
            (strings.len(), string_ids_off),
            (type_strings.len(), type_ids_off),
            (1, proto_ids_off),
            (0, 0),
            (method_ids.len(), method_ids_off),
            (0, 0),
            (file_size - data_off, data_off),
        ] {
            put(&mut out, size);
            put(&mut out, if size == 0 { 0 } else { off });
        }
        debug_assert_eq!(out.len(), HEADER_SIZE);

        for off in &string_offsets {
            out.extend_from_slice(&off.to_le_bytes());
        }
        for s in &type_strings {
            out.extend_from_slice(&s.to_le_bytes());
        }
        // proto ()V: shorty "V", return type V, no parameters.
        let v_string = string_idx["V"];
        out.extend_from_slice(&v_string.to_le_bytes());
        out.extend_from_slice(&u32::from(type_idx[&v_string]).to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        for (class, proto, name) in &method_ids {
            out.extend_from_slice(&class.to_le_bytes());
            out.extend_from_slice(&proto.to_le_bytes());
            out.extend_from_slice(&name.to_le_bytes());
        }
        out.extend_from_slice(&data);
        debug_assert_eq!(out.len(), file_size);

        let signature = Sha1::digest(&out[32..]);
        out[12..32].copy_from_slice(&signature);
        let checksum = adler32(&out[12..]);
        out[8..12].copy_from_slice(&checksum.to_le_bytes());
        out
    }
}
