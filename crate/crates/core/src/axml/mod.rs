//! Binary Android XML (the packaged `AndroidManifest.xml` format).
//!
//! The decoder builds a plain element tree from the string pool and the
//! start/end element chunks. Every read is bounds-checked against the
//! enclosing chunk, so malformed input yields an error rather than a panic.

mod manifest;
mod writer;

use std::fmt;

use thiserror::Error;

pub use manifest::{extract_manifest_properties, ManifestError, ManifestInfo};
pub use writer::encode_axml;

pub const RES_STRING_POOL_TYPE: u16 = 0x0001;
pub const RES_XML_TYPE: u16 = 0x0003;
pub const RES_XML_START_NAMESPACE_TYPE: u16 = 0x0100;
pub const RES_XML_END_NAMESPACE_TYPE: u16 = 0x0101;
pub const RES_XML_START_ELEMENT_TYPE: u16 = 0x0102;
pub const RES_XML_END_ELEMENT_TYPE: u16 = 0x0103;
pub const RES_XML_CDATA_TYPE: u16 = 0x0104;
pub const RES_XML_RESOURCE_MAP_TYPE: u16 = 0x0180;

pub const ANDROID_NS: &str = "http://schemas.android.com/apk/res/android";
/// Resource id of the framework attribute `android:name`.
pub const ATTR_NAME_ID: u32 = 0x0101_0003;

const UTF8_FLAG: u32 = 0x100;
const NO_INDEX: u32 = 0xFFFF_FFFF;

const TYPE_NULL: u8 = 0x00;
const TYPE_REFERENCE: u8 = 0x01;
const TYPE_STRING: u8 = 0x03;
const TYPE_INT_DEC: u8 = 0x10;
const TYPE_INT_HEX: u8 = 0x11;
const TYPE_INT_BOOLEAN: u8 = 0x12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AxmlError {
    #[error("bad chunk signature {found:#06x} at offset {offset}")]
    BadChunkSignature { offset: usize, found: u16 },
    #[error("truncated chunk at offset {offset}: {reason}")]
    TruncatedChunk { offset: usize, reason: &'static str },
    #[error("string pool index {0} does not resolve")]
    StringPoolIndexError(u32),
    #[error("unbalanced elements: {0}")]
    UnbalancedElements(String),
    #[error("document has no root element")]
    EmptyDocument,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttrValue {
    String(String),
    Boolean(bool),
    Integer(i32),
    Reference(u32),
    /// Any other typed value, kept as its raw type tag and 32-bit data.
    Other { data_type: u8, data: u32 },
}

impl AttrValue {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            Self::String(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::String(s) => f.write_str(s),
            Self::Boolean(b) => write!(f, "{b}"),
            Self::Integer(i) => write!(f, "{i}"),
            Self::Reference(r) => write!(f, "@{r:#010x}"),
            Self::Other { data, .. } => write!(f, "{data}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub namespace: Option<String>,
    pub name: String,
    /// Framework resource id from the resource map, when present.
    pub resource_id: Option<u32>,
    pub value: AttrValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    pub namespace: Option<String>,
    pub name: String,
    pub attributes: Vec<Attribute>,
    pub children: Vec<Element>,
}

impl Element {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    /// Name with any `prefix:` stripped.
    pub fn local_name(&self) -> &str {
        self.name.rsplit(':').next().unwrap_or(&self.name)
    }

    pub fn attr(&self, local_name: &str) -> Option<&AttrValue> {
        self.attributes.iter().find(|a| a.local_name() == local_name).map(|a| &a.value)
    }

    /// Depth-first pre-order walk.
    pub fn walk(&self, visit: &mut impl FnMut(&Element, &[&Element])) {
        fn go<'a>(
            e: &'a Element,
            path: &mut Vec<&'a Element>,
            visit: &mut impl FnMut(&Element, &[&Element]),
        ) {
            visit(e, path);
            path.push(e);
            for c in &e.children {
                go(c, path, visit);
            }
            path.pop();
        }
        go(self, &mut Vec::new(), visit);
    }
}

impl Attribute {
    /// Attribute local name. Obfuscators may blank the name string, in which
    /// case the framework resource id still identifies `android:name`.
    pub fn local_name(&self) -> &str {
        if self.name.is_empty() && self.resource_id == Some(ATTR_NAME_ID) {
            return "name";
        }
        self.name.rsplit(':').next().unwrap_or(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlTree {
    pub root: Element,
}

struct Chunk {
    ty: u16,
    header_size: usize,
    start: usize,
    end: usize,
}

fn read_u16(b: &[u8], off: usize, limit: usize) -> Result<u16, AxmlError> {
    if off.checked_add(2).is_some_and(|e| e <= limit) {
        Ok(u16::from_le_bytes([b[off], b[off + 1]]))
    } else {
        Err(AxmlError::TruncatedChunk { offset: off, reason: "read past chunk end" })
    }
}

fn read_u32(b: &[u8], off: usize, limit: usize) -> Result<u32, AxmlError> {
    if off.checked_add(4).is_some_and(|e| e <= limit) {
        Ok(u32::from_le_bytes(b[off..off + 4].try_into().unwrap()))
    } else {
        Err(AxmlError::TruncatedChunk { offset: off, reason: "read past chunk end" })
    }
}

fn read_chunk(b: &[u8], start: usize, limit: usize) -> Result<Chunk, AxmlError> {
    let ty = read_u16(b, start, limit)?;
    let header_size = usize::from(read_u16(b, start + 2, limit)?);
    let size = read_u32(b, start + 4, limit)? as usize;
    if header_size < 8 || size < header_size {
        return Err(AxmlError::TruncatedChunk { offset: start, reason: "inconsistent chunk header" });
    }
    let end = start
        .checked_add(size)
        .filter(|&e| e <= limit)
        .ok_or(AxmlError::TruncatedChunk { offset: start, reason: "chunk extends past its parent" })?;
    Ok(Chunk { ty, header_size, start, end })
}

struct StringPool {
    strings: Vec<Option<String>>,
}

impl StringPool {
    fn parse(b: &[u8], chunk: &Chunk) -> Result<Self, AxmlError> {
        let end = chunk.end;
        if chunk.header_size < 28 {
            return Err(AxmlError::TruncatedChunk { offset: chunk.start, reason: "short string pool header" });
        }
        let count = read_u32(b, chunk.start + 8, end)? as usize;
        let flags = read_u32(b, chunk.start + 16, end)?;
        let strings_start = chunk.start + read_u32(b, chunk.start + 20, end)? as usize;
        let offsets = chunk.start + chunk.header_size;
        if count.checked_mul(4).and_then(|n| n.checked_add(offsets)).is_none_or(|e| e > end) {
            return Err(AxmlError::TruncatedChunk { offset: chunk.start, reason: "string offsets past chunk end" });
        }
        let utf8 = flags & UTF8_FLAG != 0;
        let mut strings = Vec::with_capacity(count);
        for i in 0..count {
            let rel = read_u32(b, offsets + 4 * i, end)? as usize;
            let at = strings_start.checked_add(rel);
            let s = at.and_then(|at| {
                if utf8 {
                    decode_utf8_entry(b, at, end)
                } else {
                    decode_utf16_entry(b, at, end)
                }
            });
            strings.push(s);
        }
        Ok(Self { strings })
    }

    fn get(&self, idx: u32) -> Result<&str, AxmlError> {
        self.strings
            .get(idx as usize)
            .and_then(|s| s.as_deref())
            .ok_or(AxmlError::StringPoolIndexError(idx))
    }

    fn get_opt(&self, idx: u32) -> Result<Option<String>, AxmlError> {
        if idx == NO_INDEX {
            Ok(None)
        } else {
            self.get(idx).map(|s| Some(s.to_owned()))
        }
    }
}

fn decode_utf8_entry(b: &[u8], mut at: usize, end: usize) -> Option<String> {
    // utf-16 length, then utf-8 length, each one or two bytes.
    let mut len8 = 0usize;
    for pass in 0..2 {
        let first = *b.get(at).filter(|_| at < end)?;
        let len = if first & 0x80 != 0 {
            let second = *b.get(at + 1).filter(|_| at + 1 < end)?;
            at += 2;
            (usize::from(first & 0x7F) << 8) | usize::from(second)
        } else {
            at += 1;
            usize::from(first)
        };
        if pass == 1 {
            len8 = len;
        }
    }
    let bytes = b.get(at..at.checked_add(len8)?).filter(|_| at + len8 <= end)?;
    Some(String::from_utf8_lossy(bytes).into_owned())
}

fn decode_utf16_entry(b: &[u8], mut at: usize, end: usize) -> Option<String> {
    let unit = |pos: usize| -> Option<u16> {
        (pos.checked_add(2)? <= end).then(|| u16::from_le_bytes([b[pos], b[pos + 1]]))
    };
    let first = unit(at)?;
    let len = if first & 0x8000 != 0 {
        let second = unit(at + 2)?;
        at += 4;
        (usize::from(first & 0x7FFF) << 16) | usize::from(second)
    } else {
        at += 2;
        usize::from(first)
    };
    if at.checked_add(len.checked_mul(2)?)? > end {
        return None;
    }
    let units: Vec<u16> = (0..len).map(|i| u16::from_le_bytes([b[at + 2 * i], b[at + 2 * i + 1]])).collect();
    Some(String::from_utf16_lossy(&units))
}

/// Decodes a binary XML document into an element tree.
pub fn decode_axml(bytes: &[u8]) -> Result<XmlTree, AxmlError> {
    let found = read_u16(bytes, 0, bytes.len())
        .map_err(|_| AxmlError::TruncatedChunk { offset: 0, reason: "no chunk header" })?;
    if found != RES_XML_TYPE {
        return Err(AxmlError::BadChunkSignature { offset: 0, found });
    }
    let doc = read_chunk(bytes, 0, bytes.len())?;

    let mut pool: Option<StringPool> = None;
    let mut resource_ids: Vec<u32> = Vec::new();
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;

    let mut pos = doc.start + doc.header_size;
    while pos < doc.end {
        let chunk = read_chunk(bytes, pos, doc.end)?;
        match chunk.ty {
            RES_STRING_POOL_TYPE if pool.is_none() => {
                pool = Some(StringPool::parse(bytes, &chunk)?);
            }
            RES_XML_RESOURCE_MAP_TYPE => {
                let n = (chunk.end - chunk.start - chunk.header_size) / 4;
                let base = chunk.start + chunk.header_size;
                resource_ids =
                    (0..n).map(|i| read_u32(bytes, base + 4 * i, chunk.end)).collect::<Result<_, _>>()?;
            }
            RES_XML_START_ELEMENT_TYPE => {
                let pool = pool.as_ref().ok_or(AxmlError::StringPoolIndexError(0))?;
                if root.is_some() && stack.is_empty() {
                    return Err(AxmlError::UnbalancedElements("second root element".into()));
                }
                stack.push(parse_start_element(bytes, &chunk, pool, &resource_ids)?);
            }
            RES_XML_END_ELEMENT_TYPE => {
                let pool = pool.as_ref().ok_or(AxmlError::StringPoolIndexError(0))?;
                let ext = node_ext(&chunk, 8)?;
                let name = pool.get(read_u32(bytes, ext + 4, chunk.end)?)?;
                let open = stack.pop().ok_or_else(|| {
                    AxmlError::UnbalancedElements(format!("end of <{name}> with no open element"))
                })?;
                if open.name != name {
                    return Err(AxmlError::UnbalancedElements(format!(
                        "end of <{name}> while <{}> is open",
                        open.name
                    )));
                }
                match stack.last_mut() {
                    Some(parent) => parent.children.push(open),
                    None => root = Some(open),
                }
            }
            RES_XML_START_NAMESPACE_TYPE | RES_XML_END_NAMESPACE_TYPE | RES_XML_CDATA_TYPE => {
                node_ext(&chunk, 8)?;
            }
            _ => {}
        }
        pos = chunk.end;
    }

    if let Some(open) = stack.last() {
        return Err(AxmlError::UnbalancedElements(format!("<{}> never closed", open.name)));
    }
    root.map(|root| XmlTree { root }).ok_or(AxmlError::EmptyDocument)
}

/// Start of a node's extension, checking that `ext_len` bytes of it fit.
fn node_ext(chunk: &Chunk, ext_len: usize) -> Result<usize, AxmlError> {
    if chunk.header_size < 16 || chunk.start + chunk.header_size + ext_len > chunk.end {
        return Err(AxmlError::TruncatedChunk { offset: chunk.start, reason: "short xml node" });
    }
    Ok(chunk.start + chunk.header_size)
}

fn parse_start_element(
    b: &[u8],
    chunk: &Chunk,
    pool: &StringPool,
    resource_ids: &[u32],
) -> Result<Element, AxmlError> {
    let end = chunk.end;
    let ext = node_ext(chunk, 20)?;
    let namespace = pool.get_opt(read_u32(b, ext, end)?)?;
    let name = pool.get(read_u32(b, ext + 4, end)?)?.to_owned();
    let attr_start = usize::from(read_u16(b, ext + 8, end)?);
    let attr_size = usize::from(read_u16(b, ext + 10, end)?);
    let attr_count = usize::from(read_u16(b, ext + 12, end)?);
    if attr_count > 0 && attr_size < 20 {
        return Err(AxmlError::TruncatedChunk { offset: chunk.start, reason: "attribute record too small" });
    }

    let mut attributes = Vec::with_capacity(attr_count);
    for i in 0..attr_count {
        let at = ext + attr_start + i * attr_size;
        if at + 20 > end {
            return Err(AxmlError::TruncatedChunk { offset: at, reason: "attribute past chunk end" });
        }
        let ns = pool.get_opt(read_u32(b, at, end)?)?;
        let name_idx = read_u32(b, at + 4, end)?;
        let attr_name = pool.get(name_idx)?.to_owned();
        let raw = read_u32(b, at + 8, end)?;
        let data_type = b[at + 15];
        let data = read_u32(b, at + 16, end)?;
        let value = match data_type {
            TYPE_STRING => {
                let idx = if raw != NO_INDEX { raw } else { data };
                AttrValue::String(pool.get(idx)?.to_owned())
            }
            TYPE_INT_BOOLEAN => AttrValue::Boolean(data != 0),
            TYPE_INT_DEC | TYPE_INT_HEX => AttrValue::Integer(data as i32),
            TYPE_REFERENCE => AttrValue::Reference(data),
            TYPE_NULL if raw != NO_INDEX => AttrValue::String(pool.get(raw)?.to_owned()),
            other => AttrValue::Other { data_type: other, data },
        };
        attributes.push(Attribute {
            namespace: ns,
            name: attr_name,
            resource_id: resource_ids.get(name_idx as usize).copied(),
            value,
        });
    }
    Ok(Element { namespace, name, attributes, children: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest_tree() -> Element {
        let mut root = Element::new("manifest");
        root.attributes.push(Attribute {
            namespace: None,
            name: "package".into(),
            resource_id: None,
            value: AttrValue::String("a".into()),
        });
        root
    }

    #[test]
    fn single_element_roundtrip() {
        let root = manifest_tree();
        let tree = decode_axml(&encode_axml(&root)).unwrap();
        assert_eq!(tree.root, root);
        assert_eq!(tree.root.attributes.len(), 1);
    }

    #[test]
    fn text_xml_is_rejected() {
        let err = decode_axml(b"<?xml version=\"1.0\"?><manifest/>").unwrap_err();
        assert!(matches!(err, AxmlError::BadChunkSignature { offset: 0, .. }));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(decode_axml(&[]), Err(AxmlError::TruncatedChunk { .. })));
    }

    #[test]
    fn unknown_value_type_renders_as_decimal() {
        let v = AttrValue::Other { data_type: 0x1c, data: 0xFF00_00FF };
        assert_eq!(v.to_string(), "4278190335");
    }

    #[test]
    fn blank_attribute_name_falls_back_to_resource_id() {
        let a = Attribute {
            namespace: None,
            name: String::new(),
            resource_id: Some(ATTR_NAME_ID),
            value: AttrValue::String("x".into()),
        };
        assert_eq!(a.local_name(), "name");
    }

    #[test]
    fn truncations_never_panic() {
        let mut root = manifest_tree();
        let mut perm = Element::new("uses-permission");
        perm.attributes.push(Attribute {
            namespace: Some(ANDROID_NS.into()),
            name: "name".into(),
            resource_id: Some(ATTR_NAME_ID),
            value: AttrValue::String("android.permission.INTERNET".into()),
        });
        root.children.push(perm);
        let bytes = encode_axml(&root);
        for cut in 0..bytes.len() {
            assert!(decode_axml(&bytes[..cut]).is_err(), "cut at {cut}");
        }
    }
}
