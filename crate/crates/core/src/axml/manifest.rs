use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AttrValue, Attribute, Element, XmlTree, ANDROID_NS, ATTR_NAME_ID};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ManifestError {
    #[error("root element is <{0}>, not <manifest>")]
    NotAManifest(String),
}

/// The manifest properties used as features.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ManifestInfo {
    pub package_name: String,
    pub permissions: BTreeSet<String>,
    pub intent_actions: BTreeSet<String>,
    pub hardware_features: BTreeSet<String>,
}

fn name_of(e: &Element) -> Option<&str> {
    e.attr("name").and_then(AttrValue::as_str).filter(|s| !s.is_empty())
}

/// Reduces a decoded manifest to permissions, intent-filter actions, and
/// hardware features. Attributes are matched by local name, so stripped
/// namespaces do not hide features.
pub fn extract_manifest_properties(tree: &XmlTree) -> Result<ManifestInfo, ManifestError> {
    let root = &tree.root;
    if root.local_name() != "manifest" {
        return Err(ManifestError::NotAManifest(root.name.clone()));
    }
    let mut info = ManifestInfo {
        package_name: root
            .attr("package")
            .and_then(AttrValue::as_str)
            .unwrap_or_default()
            .to_owned(),
        ..ManifestInfo::default()
    };
    root.walk(&mut |e, ancestors| {
        let Some(name) = name_of(e) else { return };
        match e.local_name() {
            "uses-permission" | "uses-permission-sdk-23" => {
                info.permissions.insert(name.to_owned());
            }
            "uses-feature" => {
                info.hardware_features.insert(name.to_owned());
            }
            "action" if ancestors.iter().any(|a| a.local_name() == "intent-filter") => {
                info.intent_actions.insert(name.to_owned());
            }
            _ => {}
        }
    });
    Ok(info)
}

impl ManifestInfo {
    pub fn feature_count(&self) -> usize {
        self.permissions.len() + self.intent_actions.len() + self.hardware_features.len()
    }

    /// A minimal manifest element tree carrying exactly these properties,
    /// with intent actions placed under one receiver's intent filter.
    pub fn to_element(&self) -> Element {
        let android_name = |value: &str| Attribute {
            namespace: Some(ANDROID_NS.to_owned()),
            name: "name".to_owned(),
            resource_id: Some(ATTR_NAME_ID),
            value: AttrValue::String(value.to_owned()),
        };
        let leaf = |tag: &str, value: &str| Element {
            name: tag.to_owned(),
            attributes: vec![android_name(value)],
            ..Element::default()
        };

        let mut root = Element::new("manifest");
        root.attributes.push(Attribute {
            namespace: None,
            name: "package".to_owned(),
            resource_id: None,
            value: AttrValue::String(self.package_name.clone()),
        });
        root.children.extend(self.permissions.iter().map(|p| leaf("uses-permission", p)));
        root.children.extend(self.hardware_features.iter().map(|f| leaf("uses-feature", f)));

        let mut app = Element::new("application");
        if !self.intent_actions.is_empty() {
            let mut filter = Element::new("intent-filter");
            filter.children.extend(self.intent_actions.iter().map(|a| leaf("action", a)));
            let mut receiver = leaf("receiver", &format!("{}.Receiver", self.package_name));
            receiver.children.push(filter);
            app.children.push(receiver);
        }
        root.children.push(app);
        root
    }
}
