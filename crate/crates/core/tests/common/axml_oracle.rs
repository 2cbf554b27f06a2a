//! Plain-text manifests, their expected properties via roxmltree, and an
//! independent binary encoder that uses a UTF-8 string pool.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;

pub const ANDROID_NS: &str = "http://schemas.android.com/apk/res/android";
const ATTR_NAME: u32 = 0x0101_0003;
const ATTR_REQUIRED: u32 = 0x0101_028E;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Expected {
    pub package: String,
    pub permissions: BTreeSet<String>,
    pub intent_actions: BTreeSet<String>,
    pub hardware_features: BTreeSet<String>,
}

/// Property sets of a plain-text manifest.
pub fn oracle_properties(xml: &str) -> Expected {
    let doc = roxmltree::Document::parse(xml).expect("fixture XML parses");
    let root = doc.root_element();
    let mut out = Expected { package: root.attribute("package").unwrap_or_default().to_owned(), ..Expected::default() };
    for node in root.descendants().filter(|n| n.is_element()) {
        let Some(name) = node.attribute((ANDROID_NS, "name")).filter(|s| !s.is_empty()) else { continue };
        match node.tag_name().name() {
            "uses-permission" | "uses-permission-sdk-23" => {
                out.permissions.insert(name.to_owned());
            }
            "uses-feature" => {
                out.hardware_features.insert(name.to_owned());
            }
            "action" if node.ancestors().any(|a| a.tag_name().name() == "intent-filter") => {
                out.intent_actions.insert(name.to_owned());
            }
            _ => {}
        }
    }
    out
}

#[derive(Default)]
struct Pool {
    strings: Vec<String>,
    index: HashMap<String, u32>,
    ids: Vec<u32>,
}

impl Pool {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&i) = self.index.get(s) {
            return i;
        }
        let i = self.strings.len() as u32;
        self.strings.push(s.to_owned());
        self.index.insert(s.to_owned(), i);
        i
    }
}

fn put16(b: &mut Vec<u8>, v: u16) {
    b.extend_from_slice(&v.to_le_bytes());
}

fn put32(b: &mut Vec<u8>, v: u32) {
    b.extend_from_slice(&v.to_le_bytes());
}

/// One or two length bytes; the high bit of the first marks two.
fn put_len8(b: &mut Vec<u8>, n: usize) {
    if n > 0x7F {
        b.push(0x80 | (n >> 8) as u8);
    }
    b.push(n as u8);
}

fn string_pool_utf8(strings: &[String]) -> Vec<u8> {
    let mut data = Vec::new();
    let mut offsets = Vec::new();
    for s in strings {
        offsets.push(data.len() as u32);
        put_len8(&mut data, s.encode_utf16().count());
        put_len8(&mut data, s.len());
        data.extend_from_slice(s.as_bytes());
        data.push(0);
    }
    while data.len() % 4 != 0 {
        data.push(0);
    }
    let header = 28u32;
    let strings_start = header + 4 * strings.len() as u32;
    let mut b = Vec::new();
    put16(&mut b, 0x0001);
    put16(&mut b, header as u16);
    put32(&mut b, strings_start + data.len() as u32);
    put32(&mut b, strings.len() as u32);
    put32(&mut b, 0);
    put32(&mut b, 0x100);
    put32(&mut b, strings_start);
    put32(&mut b, 0);
    for o in offsets {
        put32(&mut b, o);
    }
    b.extend(data);
    b
}

fn node_chunk(ty: u16, body: &[u8]) -> Vec<u8> {
    let mut b = Vec::new();
    put16(&mut b, ty);
    put16(&mut b, 16);
    put32(&mut b, 16 + body.len() as u32);
    put32(&mut b, 1); // line number
    put32(&mut b, u32::MAX); // comment
    b.extend_from_slice(body);
    b
}

/// Binary encoding of a plain-text manifest. Attribute names that carry a
/// framework id lead the pool, matched by the resource map.
pub fn encode_manifest(xml: &str) -> Vec<u8> {
    let doc = roxmltree::Document::parse(xml).expect("fixture XML parses");
    let mut pool = Pool::default();
    for (name, id) in [("name", ATTR_NAME), ("required", ATTR_REQUIRED)] {
        pool.intern(name);
        pool.ids.push(id);
    }
    let ns_prefix = pool.intern("android");
    let ns_uri = pool.intern(ANDROID_NS);

    let mut body = Vec::new();
    let mut ns = Vec::new();
    put32(&mut ns, ns_prefix);
    put32(&mut ns, ns_uri);
    body.extend(node_chunk(0x0100, &ns));
    encode_node(doc.root_element(), &mut pool, ns_uri, &mut body);
    body.extend(node_chunk(0x0101, &ns));

    let mut out = Vec::new();
    let pool_chunk = string_pool_utf8(&pool.strings);
    let mut map = Vec::new();
    put16(&mut map, 0x0180);
    put16(&mut map, 8);
    put32(&mut map, 8 + 4 * pool.ids.len() as u32);
    for id in &pool.ids {
        put32(&mut map, *id);
    }
    put16(&mut out, 0x0003);
    put16(&mut out, 8);
    put32(&mut out, (8 + pool_chunk.len() + map.len() + body.len()) as u32);
    out.extend(pool_chunk);
    out.extend(map);
    out.extend(body);
    out
}

fn encode_node(node: roxmltree::Node, pool: &mut Pool, ns_uri: u32, out: &mut Vec<u8>) {
    let name = pool.intern(node.tag_name().name());
    let attrs: Vec<roxmltree::Attribute> = node.attributes().collect();
    let mut start = Vec::new();
    put32(&mut start, u32::MAX);
    put32(&mut start, name);
    put16(&mut start, 20);
    put16(&mut start, 20);
    put16(&mut start, attrs.len() as u16);
    put16(&mut start, 0);
    put16(&mut start, 0);
    put16(&mut start, 0);
    for a in &attrs {
        let in_android = a.namespace() == Some(ANDROID_NS);
        put32(&mut start, if in_android { ns_uri } else { u32::MAX });
        put32(&mut start, pool.intern(a.name()));
        let (raw, ty, data) = match (in_android, a.value()) {
            (true, "true") => (u32::MAX, 0x12u8, u32::MAX),
            (true, "false") => (u32::MAX, 0x12, 0),
            (_, v) => {
                let i = pool.intern(v);
                (i, 0x03, i)
            }
        };
        put32(&mut start, raw);
        put16(&mut start, 8);
        start.push(0);
        start.push(ty);
        put32(&mut start, data);
    }
    out.extend(node_chunk(0x0102, &start));
    for child in node.children().filter(|c| c.is_element()) {
        encode_node(child, pool, ns_uri, out);
    }
    let mut end = Vec::new();
    put32(&mut end, u32::MAX);
    put32(&mut end, name);
    out.extend(node_chunk(0x0103, &end));
}

const PERMS: &[&str] = &[
    "android.permission.INTERNET", "android.permission.SEND_SMS", "android.permission.READ_CONTACTS",
    "android.permission.CAMERA", "com.example.permission.C2D_MESSAGE", "android.permission.RECEIVE_BOOT_COMPLETED",
];
const ACTIONS: &[&str] = &[
    "android.intent.action.MAIN", "android.intent.action.BOOT_COMPLETED", "android.provider.Telephony.SMS_RECEIVED",
    "android.intent.action.VIEW", "com.example.action.PING", "android.net.conn.CONNECTIVITY_CHANGE",
];
const FEATURES: &[&str] = &["android.hardware.camera", "android.hardware.telephony", "android.hardware.wifi", "android.hardware.nfc"];

fn pick<'a>(rng: &mut impl Rng, from: &[&'a str]) -> Vec<&'a str> {
    from.iter().copied().filter(|_| rng.gen_bool(0.4)).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('"', "&quot;")
}

/// A random manifest exercising every extraction rule and its decoys.
pub fn random_manifest(rng: &mut impl Rng) -> String {
    let package = format!("com.fixture.app{}", rng.gen_range(0..1000));
    let mut x = format!(
        "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<manifest xmlns:android=\"{ANDROID_NS}\" package=\"{package}\" android:versionCode=\"3\">\n"
    );
    for p in pick(rng, PERMS) {
        let tag = if rng.gen_ratio(1, 4) { "uses-permission-sdk-23" } else { "uses-permission" };
        x += &format!("  <{tag} android:name=\"{p}\"/>\n");
    }
    if rng.gen_bool(0.3) {
        x += &format!("  <uses-permission android:name=\"com.fixture.perm.{}\"/>\n", escape("ünï&<\"x"));
    }
    for f in pick(rng, FEATURES) {
        let req = if rng.gen_bool(0.5) { "true" } else { "false" };
        x += &format!("  <uses-feature android:name=\"{f}\" android:required=\"{req}\"/>\n");
    }
    x += "  <uses-feature android:glEsVersion=\"0x00020000\"/>\n";
    x += "  <permission android:name=\"com.fixture.DECLARED_NOT_USED\"/>\n";
    x += "  <application android:label=\"Fixture\">\n";
    for c in 0..rng.gen_range(0..4) {
        let tag = ["activity", "service", "receiver"][c % 3];
        x += &format!("    <{tag} android:name=\".C{c}\">\n");
        for _ in 0..rng.gen_range(0..3) {
            x += "      <intent-filter>\n";
            for a in pick(rng, ACTIONS) {
                x += &format!("        <action android:name=\"{a}\"/>\n");
            }
            x += "        <category android:name=\"android.intent.category.DEFAULT\"/>\n";
            x += "      </intent-filter>\n";
        }
        x += "      <meta-data android:name=\"com.fixture.meta\" android:value=\"1\"/>\n";
        x += &format!("    </{tag}>\n");
    }
    x += "    <action android:name=\"com.fixture.NOT_IN_A_FILTER\"/>\n";
    x += "  </application>\n</manifest>\n";
    x
}
