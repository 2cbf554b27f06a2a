//! The feature universe: API calls followed by manifest properties, each with
//! a stable vector index.
//!
//! Text format (UTF-8, LF line endings):
//!
//! ```text
//! apkfeat-dict v<version> api=<n> manifest=<m>
//! <kind>\t<canonical>\t<origin>
//! ...
//! ```
//!
//! All `api_call` lines come first, then the manifest kinds; each group is in
//! strictly ascending byte order of the canonical string.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::dex::ApiCall;

pub const DICT_MAGIC: &str = "apkfeat-dict";
pub const DELTA_MAGIC: &str = "apkfeat-delta";

#[derive(Debug, Error)]
pub enum DictError {
    #[error("line {line}: {reason}")]
    FormatError { line: usize, reason: String },
    #[error("line {line}: entry {canonical:?} is out of order")]
    OrderError { line: usize, canonical: String },
    #[error("duplicate feature {0:?}")]
    DuplicateFeature(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_err(line: usize, reason: impl Into<String>) -> DictError {
    DictError::FormatError { line, reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    ApiCall,
    Permission,
    IntentAction,
    HardwareFeature,
}

impl FeatureKind {
    pub const MANIFEST: [FeatureKind; 3] =
        [FeatureKind::Permission, FeatureKind::IntentAction, FeatureKind::HardwareFeature];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ApiCall => "api_call",
            Self::Permission => "permission",
            Self::IntentAction => "intent_action",
            Self::HardwareFeature => "hardware_feature",
        }
    }

    pub fn is_manifest(self) -> bool {
        self != Self::ApiCall
    }

    /// Whether `canonical` has the shape this kind requires.
    pub fn accepts(self, canonical: &str) -> bool {
        match self {
            Self::ApiCall => ApiCall::parse(canonical).is_some(),
            _ => is_dotted_identifier(canonical),
        }
    }
}

fn is_dotted_identifier(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with('.')
        && !s.ends_with('.')
        && !s.contains("..")
        && s.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-' | b'$'))
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "api_call" => Ok(Self::ApiCall),
            "permission" => Ok(Self::Permission),
            "intent_action" => Ok(Self::IntentAction),
            "hardware_feature" => Ok(Self::HardwareFeature),
            other => Err(format!("unknown feature kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Documentation,
    Corpus,
    BehaviorReport,
    PackageExpansion,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Documentation => "documentation",
            Self::Corpus => "corpus",
            Self::BehaviorReport => "behavior_report",
            Self::PackageExpansion => "package_expansion",
        }
    }
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "documentation" => Ok(Self::Documentation),
            "corpus" => Ok(Self::Corpus),
            "behavior_report" => Ok(Self::BehaviorReport),
            "package_expansion" => Ok(Self::PackageExpansion),
            other => Err(format!("unknown origin {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FeatureEntry {
    pub canonical: String,
    pub kind: FeatureKind,
    pub origin: Origin,
}

impl FeatureEntry {
    pub fn new(kind: FeatureKind, canonical: impl Into<String>, origin: Origin) -> Self {
        Self { canonical: canonical.into(), kind, origin }
    }

    fn sort_key(&self) -> (bool, &str) {
        (self.kind.is_manifest(), &self.canonical)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureDictionary {
    version: String,
    entries: Vec<FeatureEntry>,
    index: HashMap<String, usize>,
    api_count: usize,
}

impl FeatureDictionary {
    /// Builds a dictionary from entries in any order.
    pub fn from_entries(
        version: impl Into<String>,
        mut entries: Vec<FeatureEntry>,
    ) -> Result<Self, DictError> {
        entries.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut index = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if !e.kind.accepts(&e.canonical) {
                return Err(format_err(0, format!("{:?} is not a valid {}", e.canonical, e.kind)));
            }
            if index.insert(e.canonical.clone(), i).is_some() {
                return Err(DictError::DuplicateFeature(e.canonical.clone()));
            }
        }
        let api_count = entries.iter().take_while(|e| !e.kind.is_manifest()).count();
        let version = version.into();
        check_version(&version, 1)?;
        Ok(Self { version, entries, index, api_count })
    }

    /// Version `version` from a raw corpus call list, pruned by `rules`, and
    /// documented manifest properties.
    pub fn build(
        version: impl Into<String>,
        raw_api: &BTreeSet<ApiCall>,
        manifest: &BTreeSet<(FeatureKind, String)>,
        rules: &PruneConfig,
    ) -> Result<Self, DictError> {
        let api = prune_api_calls(raw_api, rules)
            .into_iter()
            .map(|c| FeatureEntry::new(FeatureKind::ApiCall, c.canonical(), Origin::Corpus));
        let props = manifest.iter().map(|(k, v)| FeatureEntry::new(*k, v.as_str(), Origin::Documentation));
        Self::from_entries(version, api.chain(props).collect())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DictError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses the dictionary text format, enforcing grouping and order.
    pub fn parse(text: &str) -> Result<Self, DictError> {
        let mut lines = text.split('\n');
        let header = lines.next().unwrap_or_default();
        let (version, api_n, manifest_n) = parse_header(header)?;

        let mut entries: Vec<FeatureEntry> = Vec::with_capacity(api_n + manifest_n);
        let mut index = HashMap::with_capacity(api_n + manifest_n);
        let mut body: Vec<&str> = lines.collect();
        match body.pop() {
            Some("") => {}
            _ => return Err(format_err(body.len() + 2, "file must end with a newline")),
        }
        for (i, line) in body.iter().enumerate() {
            let lineno = i + 2;
            let mut parts = line.split('\t');
            let (Some(kind), Some(canonical), Some(origin), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(format_err(lineno, "expected <kind>\\t<canonical>\\t<origin>"));
            };
            let kind: FeatureKind = kind.parse().map_err(|e| format_err(lineno, e))?;
            let origin: Origin = origin.parse().map_err(|e| format_err(lineno, e))?;
            if !kind.accepts(canonical) {
                return Err(format_err(lineno, format!("{canonical:?} is not a valid {kind}")));
            }
            let entry = FeatureEntry::new(kind, canonical, origin);
            if index.contains_key(canonical) {
                return Err(DictError::DuplicateFeature(canonical.to_owned()));
            }
            if let Some(prev) = entries.last() {
                if prev.sort_key() >= entry.sort_key() {
                    return Err(DictError::OrderError { line: lineno, canonical: canonical.to_owned() });
                }
            }
            index.insert(canonical.to_owned(), entries.len());
            entries.push(entry);
        }

        let api_count = entries.iter().take_while(|e| !e.kind.is_manifest()).count();
        if api_count != api_n || entries.len() - api_count != manifest_n {
            return Err(format_err(
                1,
                format!(
                    "header declares api={api_n} manifest={manifest_n}, body has api={} manifest={}",
                    api_count,
                    entries.len() - api_count
                ),
            ));
        }
        Ok(Self { version, entries, index, api_count })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.entries.len() * 48 + 64);
        out.push_str(&header_line(&self.version, self.api_count, self.manifest_count()));
        out.push('\n');
        for e in &self.entries {
            out.push_str(e.kind.as_str());
            out.push('\t');
            out.push_str(&e.canonical);
            out.push('\t');
            out.push_str(e.origin.as_str());
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DictError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn entries(&self) -> &[FeatureEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn api_count(&self) -> usize {
        self.api_count
    }

    pub fn manifest_count(&self) -> usize {
        self.entries.len() - self.api_count
    }

    pub fn count_of(&self, kind: FeatureKind) -> usize {
        self.entries.iter().filter(|e| e.kind == kind).count()
    }

    pub fn index_of(&self, canonical: &str) -> Option<usize> {
        self.index.get(canonical).copied()
    }

    /// Position of `canonical` if it is present with the given kind.
    pub fn index_of_kind(&self, kind: FeatureKind, canonical: &str) -> Option<usize> {
        self.index_of(canonical).filter(|&i| self.entries[i].kind == kind)
    }

    pub fn contains(&self, canonical: &str) -> bool {
        self.index.contains_key(canonical)
    }

    /// Adds the behavior-report features and every universe call under each
    /// reported package prefix. Returns a new dictionary with a bumped version.
    pub fn update_with_behaviors(
        &self,
        delta: &BehaviorDelta,
        corpus_api_universe: &BTreeSet<ApiCall>,
    ) -> FeatureDictionary {
        let mut entries = self.entries.clone();
        let mut seen: BTreeSet<String> = self.index.keys().cloned().collect();
        let mut add = |kind: FeatureKind, canonical: &str, origin: Origin| {
            if seen.insert(canonical.to_owned()) {
                entries.push(FeatureEntry::new(kind, canonical, origin));
            }
        };
        for call in &delta.new_api_calls {
            add(FeatureKind::ApiCall, call.canonical(), Origin::BehaviorReport);
        }
        for prefix in &delta.new_packages {
            let class_prefix = format!("L{prefix}");
            for call in corpus_api_universe {
                if call.class_descriptor().starts_with(&class_prefix) {
                    add(FeatureKind::ApiCall, call.canonical(), Origin::PackageExpansion);
                }
            }
        }
        for (kind, name) in &delta.new_manifest {
            add(*kind, name, Origin::BehaviorReport);
        }
        Self::from_entries(bump_version(&self.version), entries)
            .expect("merged entries are unique and individually validated")
    }
}

fn header_line(version: &str, api: usize, manifest: usize) -> String {
    format!("{DICT_MAGIC} v{version} api={api} manifest={manifest}")
}

fn check_version(version: &str, line: usize) -> Result<(), DictError> {
    if version.is_empty() || version.chars().any(char::is_whitespace) {
        return Err(format_err(line, format!("bad version {version:?}")));
    }
    Ok(())
}

fn parse_header(line: &str) -> Result<(String, usize, usize), DictError> {
    let bad = || format_err(1, format!("expected `{DICT_MAGIC} v<version> api=<n> manifest=<m>`"));
    let mut parts = line.split(' ');
    if parts.next() != Some(DICT_MAGIC) {
        return Err(bad());
    }
    let version = parts.next().and_then(|v| v.strip_prefix('v')).ok_or_else(bad)?;
    check_version(version, 1)?;
    let api = parts
        .next()
        .and_then(|p| p.strip_prefix("api="))
        .and_then(|n| n.parse().ok())
        .ok_or_else(bad)?;
    let manifest = parts
        .next()
        .and_then(|p| p.strip_prefix("manifest="))
        .and_then(|n| n.parse().ok())
        .ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((version.to_owned(), api, manifest))
}

/// Reads only the header line of a dictionary file: `(version, api, manifest)`.
pub fn read_header(path: impl AsRef<Path>) -> Result<(String, usize, usize), DictError> {
    use std::io::BufRead;
    let mut first = String::new();
    std::io::BufReader::new(std::fs::File::open(path)?).read_line(&mut first)?;
    parse_header(first.trim_end_matches('\n'))
}

/// Increments the last numeric dot-separated component, or appends `.1`.
pub fn bump_version(version: &str) -> String {
    if let Some((head, last)) = version.rsplit_once('.') {
        if let Ok(n) = last.parse::<u64>() {
            return format!("{head}.{}", n + 1);
        }
    } else if let Ok(n) = version.parse::<u64>() {
        return (n + 1).to_string();
    }
    format!("{version}.1")
}

/// Features distilled from behavior reports.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BehaviorDelta {
    pub new_api_calls: BTreeSet<ApiCall>,
    /// Package prefixes without the leading `L`, e.g. `android/net/Uri`.
    pub new_packages: BTreeSet<String>,
    pub new_manifest: BTreeSet<(FeatureKind, String)>,
}

impl BehaviorDelta {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, DictError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses `apkfeat-delta v1` followed by `<kind>\t<value>` lines, where
    /// kind is `api_call`, `package`, or a manifest kind. Blank lines and
    /// `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, DictError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end() == format!("{DELTA_MAGIC} v1") => {}
            _ => return Err(format_err(1, format!("expected `{DELTA_MAGIC} v1` header"))),
        }
        let mut delta = Self::default();
        for (i, line) in lines {
            let lineno = i + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (kind, value) =
                line.split_once('\t').ok_or_else(|| format_err(lineno, "expected <kind>\\t<value>"))?;
            match kind {
                "package" => {
                    if value.is_empty() || value.contains("->") || value.starts_with('L') && value.ends_with(';') {
                        return Err(format_err(lineno, format!("bad package prefix {value:?}")));
                    }
                    delta.new_packages.insert(value.to_owned());
                }
                _ => {
                    let kind: FeatureKind = kind.parse().map_err(|e| format_err(lineno, e))?;
                    if !kind.accepts(value) {
                        return Err(format_err(lineno, format!("{value:?} is not a valid {kind}")));
                    }
                    if kind == FeatureKind::ApiCall {
                        delta.new_api_calls.insert(ApiCall::parse(value).expect("validated above"));
                    } else {
                        delta.new_manifest.insert((kind, value.to_owned()));
                    }
                }
            }
        }
        Ok(delta)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{DELTA_MAGIC} v1\n");
        for c in &self.new_api_calls {
            out.push_str(&format!("api_call\t{c}\n"));
        }
        for p in &self.new_packages {
            out.push_str(&format!("package\t{p}\n"));
        }
        for (k, n) in &self.new_manifest {
            out.push_str(&format!("{k}\t{n}\n"));
        }
        out
    }
}

/// Reads one canonical API call per line; blank lines and `#` comments are
/// skipped.
pub fn parse_api_list(text: &str) -> Result<BTreeSet<ApiCall>, DictError> {
    let mut out = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let call = ApiCall::parse(line)
            .ok_or_else(|| format_err(i + 1, format!("{line:?} is not a canonical API call")))?;
        out.insert(call);
    }
    Ok(out)
}

/// Reads `<kind>\t<name>` manifest property lines.
pub fn parse_manifest_list(text: &str) -> Result<BTreeSet<(FeatureKind, String)>, DictError> {
    let mut out = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (kind, name) =
            line.split_once('\t').ok_or_else(|| format_err(i + 1, "expected <kind>\\t<name>"))?;
        let kind: FeatureKind = kind.parse().map_err(|e| format_err(i + 1, e))?;
        if !kind.is_manifest() || !kind.accepts(name) {
            return Err(format_err(i + 1, format!("{name:?} is not a manifest property")));
        }
        out.insert((kind, name.to_owned()));
    }
    Ok(out)
}

/// Pruning rules for raw corpus API calls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneConfig {
    /// A class is obfuscated when every package segment and the simple class
    /// name are at most this long.
    pub obfuscation_max_len: usize,
    /// Behavior-irrelevant class prefixes (UI and layout namespaces).
    pub deny_prefixes: Vec<String>,
    /// Platform class prefixes; calls outside them are third-party.
    pub allow_prefixes: Vec<String>,
}

impl Default for PruneConfig {
    fn default() -> Self {
        let owned = |v: &[&str]| v.iter().map(|s| (*s).to_owned()).collect();
        Self {
            obfuscation_max_len: 2,
            deny_prefixes: owned(&[
                "Landroid/view/",
                "Landroid/widget/",
                "Landroid/animation/",
                "Landroid/transition/",
                "Landroid/graphics/drawable/",
                "Landroid/text/style/",
            ]),
            allow_prefixes: owned(&[
                "Landroid/",
                "Lcom/android/",
                "Ldalvik/",
                "Ljava/",
                "Ljavax/",
                "Lorg/apache/http/",
                "Lorg/json/",
                "Lorg/w3c/",
                "Lorg/xml/",
                "Lorg/xmlpull/",
            ]),
        }
    }
}

impl PruneConfig {
    pub fn is_obfuscated(&self, class_descriptor: &str) -> bool {
        let inner = class_descriptor
            .strip_prefix('L')
            .and_then(|s| s.strip_suffix(';'))
            .unwrap_or(class_descriptor);
        inner.split('/').all(|seg| seg.chars().count() <= self.obfuscation_max_len)
    }

    pub fn keeps(&self, call: &ApiCall) -> bool {
        let class = call.class_descriptor();
        !self.is_obfuscated(class)
            && !self.deny_prefixes.iter().any(|p| class.starts_with(p.as_str()))
            && self.allow_prefixes.iter().any(|p| class.starts_with(p.as_str()))
    }
}

/// Drops obfuscated, behavior-irrelevant, and third-party calls.
pub fn prune_api_calls(raw: &BTreeSet<ApiCall>, rules: &PruneConfig) -> BTreeSet<ApiCall> {
    raw.iter().filter(|c| rules.keeps(c)).cloned().collect()
}
