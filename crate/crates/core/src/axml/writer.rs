//! Binary XML encoder with a UTF-16 string pool, as emitted by the
//! platform packaging tools.

use std::collections::HashMap;

use super::*;

#[derive(Default)]
struct PoolBuilder {
    strings: Vec<String>,
    /// Resource ids of the leading `ids.len()` strings.
    ids: Vec<u32>,
    plain: HashMap<String, u32>,
    with_id: HashMap<(String, u32), u32>,
}

impl PoolBuilder {
    fn plain(&mut self, s: &str) -> u32 {
        if let Some(&i) = self.plain.get(s) {
            return i;
        }
        let i = self.strings.len() as u32;
        self.strings.push(s.to_owned());
        self.plain.insert(s.to_owned(), i);
        i
    }
}

fn collect_ids(e: &Element, pool: &mut PoolBuilder) {
    for a in &e.attributes {
        if let Some(id) = a.resource_id {
            let key = (a.name.clone(), id);
            if !pool.with_id.contains_key(&key) {
                let i = pool.strings.len() as u32;
                pool.strings.push(a.name.clone());
                pool.ids.push(id);
                pool.with_id.insert(key, i);
            }
        }
    }
    for c in &e.children {
        collect_ids(c, pool);
    }
}

fn collect_namespaces(e: &Element, out: &mut Vec<String>) {
    let attr_ns = e.attributes.iter().filter_map(|a| a.namespace.as_ref());
    for ns in e.namespace.iter().chain(attr_ns) {
        if !out.contains(ns) {
            out.push(ns.clone());
        }
    }
    for c in &e.children {
        collect_namespaces(c, out);
    }
}

fn put16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn string_pool_chunk(strings: &[String]) -> Vec<u8> {
    let mut data = Vec::new();
    let mut offsets = Vec::with_capacity(strings.len());
    for s in strings {
        offsets.push(data.len() as u32);
        let units: Vec<u16> = s.encode_utf16().collect();
        if units.len() > 0x7FFF {
            put16(&mut data, 0x8000 | (units.len() >> 16) as u16);
            put16(&mut data, units.len() as u16);
        } else {
            put16(&mut data, units.len() as u16);
        }
        for u in units {
            put16(&mut data, u);
        }
        put16(&mut data, 0);
    }
    while data.len() % 4 != 0 {
        data.push(0);
    }
    let header_size = 28u32;
    let strings_start = header_size + 4 * strings.len() as u32;
    let mut out = Vec::with_capacity(strings_start as usize + data.len());
    put16(&mut out, RES_STRING_POOL_TYPE);
    put16(&mut out, header_size as u16);
    put32(&mut out, strings_start + data.len() as u32);
    put32(&mut out, strings.len() as u32);
    put32(&mut out, 0); // style count
    put32(&mut out, 0); // flags: UTF-16
    put32(&mut out, strings_start);
    put32(&mut out, 0); // styles start
    for off in offsets {
        put32(&mut out, off);
    }
    out.extend_from_slice(&data);
    out
}

fn node_header(out: &mut Vec<u8>, ty: u16, size: u32) {
    put16(out, ty);
    put16(out, 16);
    put32(out, size);
    put32(out, 1); // line number
    put32(out, NO_INDEX); // comment
}

struct Encoder<'a> {
    pool: &'a mut PoolBuilder,
    body: Vec<u8>,
}

impl Encoder<'_> {
    fn ns_index(&mut self, ns: &Option<String>) -> u32 {
        ns.as_deref().map_or(NO_INDEX, |s| self.pool.plain(s))
    }

    fn element(&mut self, e: &Element) {
        let ns = self.ns_index(&e.namespace);
        let name = self.pool.plain(&e.name);
        let mut attrs = Vec::with_capacity(e.attributes.len() * 20);
        for a in &e.attributes {
            let a_ns = self.ns_index(&a.namespace);
            let a_name = match a.resource_id {
                Some(id) => self.pool.with_id[&(a.name.clone(), id)],
                None => self.pool.plain(&a.name),
            };
            let (raw, ty, data) = match &a.value {
                AttrValue::String(s) => {
                    let i = self.pool.plain(s);
                    (i, TYPE_STRING, i)
                }
                AttrValue::Boolean(b) => (NO_INDEX, TYPE_INT_BOOLEAN, if *b { u32::MAX } else { 0 }),
                AttrValue::Integer(i) => (NO_INDEX, TYPE_INT_DEC, *i as u32),
                AttrValue::Reference(r) => (NO_INDEX, TYPE_REFERENCE, *r),
                AttrValue::Other { data_type, data } => (NO_INDEX, *data_type, *data),
            };
            put32(&mut attrs, a_ns);
            put32(&mut attrs, a_name);
            put32(&mut attrs, raw);
            put16(&mut attrs, 8);
            attrs.push(0);
            attrs.push(ty);
            put32(&mut attrs, data);
        }
        node_header(&mut self.body, RES_XML_START_ELEMENT_TYPE, 16 + 20 + attrs.len() as u32);
        put32(&mut self.body, ns);
        put32(&mut self.body, name);
        put16(&mut self.body, 20); // attribute start
        put16(&mut self.body, 20); // attribute size
        put16(&mut self.body, e.attributes.len() as u16);
        put16(&mut self.body, 0); // id index
        put16(&mut self.body, 0); // class index
        put16(&mut self.body, 0); // style index
        self.body.extend_from_slice(&attrs);

        for c in &e.children {
            self.element(c);
        }

        node_header(&mut self.body, RES_XML_END_ELEMENT_TYPE, 24);
        put32(&mut self.body, ns);
        put32(&mut self.body, name);
    }
}

/// Encodes `root` as a binary XML document.
pub fn encode_axml(root: &Element) -> Vec<u8> {
    let mut pool = PoolBuilder::default();
    collect_ids(root, &mut pool);

    let mut namespaces = Vec::new();
    collect_namespaces(root, &mut namespaces);
    let ns_pairs: Vec<(u32, u32)> = namespaces
        .iter()
        .enumerate()
        .map(|(i, uri)| {
            let prefix = if uri == ANDROID_NS { "android".to_owned() } else { format!("ns{i}") };
            (pool.plain(&prefix), pool.plain(uri))
        })
        .collect();

    let mut enc = Encoder { pool: &mut pool, body: Vec::new() };
    for &(prefix, uri) in &ns_pairs {
        node_header(&mut enc.body, RES_XML_START_NAMESPACE_TYPE, 24);
        put32(&mut enc.body, prefix);
        put32(&mut enc.body, uri);
    }
    enc.element(root);
    for &(prefix, uri) in ns_pairs.iter().rev() {
        node_header(&mut enc.body, RES_XML_END_NAMESPACE_TYPE, 24);
        put32(&mut enc.body, prefix);
        put32(&mut enc.body, uri);
    }
    let body = enc.body;

    let pool_chunk = string_pool_chunk(&pool.strings);
    let mut res_map = Vec::new();
    if !pool.ids.is_empty() {
        put16(&mut res_map, RES_XML_RESOURCE_MAP_TYPE);
        put16(&mut res_map, 8);
        put32(&mut res_map, 8 + 4 * pool.ids.len() as u32);
        for id in &pool.ids {
            put32(&mut res_map, *id);
        }
    }

    let total = 8 + pool_chunk.len() + res_map.len() + body.len();
    let mut out = Vec::with_capacity(total);
    put16(&mut out, RES_XML_TYPE);
    put16(&mut out, 8);
    put32(&mut out, total as u32);
    out.extend_from_slice(&pool_chunk);
    out.extend_from_slice(&res_map);
    out.extend_from_slice(&body);
    out
}
