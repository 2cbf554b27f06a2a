use std::collections::BTreeSet;

use apkfeat::axml::ManifestInfo;
use apkfeat::dex::ApiCall;
use apkfeat::dictionary::{
    parse_api_list, BehaviorDelta, DictError, FeatureDictionary, FeatureKind, Origin, PruneConfig,
};
use apkfeat::reference;
use apkfeat::vector::{text_to_vector, vector_to_text, vectorize};

const CORPUS_50: &str = include_str!("fixtures/corpus-50.txt");

/// Kept by hand: platform namespaces only, minus UI namespaces, minus
/// classes whose every path segment has at most two characters.
const KEPT_BY_HAND: [&str; 28] = [
    "Landroid/telephony/SmsManager;->sendTextMessage",
    "Landroid/telephony/TelephonyManager;->getDeviceId",
    "Landroid/content/Intent;-><init>",
    "Landroid/app/Activity;->onCreate",
    "Landroid/os/Handler;->post",
    "Landroid/net/Uri;->parse",
    "Landroid/a;->b",
    "Lcom/android/internal/telephony/ITelephony;->endCall",
    "Ldalvik/system/DexClassLoader;->loadClass",
    "Ljava/lang/Runtime;->exec",
    "Ljava/io/File;->delete",
    "Ljava/a/b;->c",
    "Ljavax/crypto/Cipher;->doFinal",
    "Lorg/apache/http/client/HttpClient;->execute",
    "Lorg/json/JSONObject;->getString",
    "Lorg/w3c/dom/Document;->getElementsByTagName",
    "Lorg/xml/sax/XMLReader;->parse",
    "Lorg/xmlpull/v1/XmlPullParser;->next",
    "Landroid/widgetx/Foo;->bar",
    "Landroid/viewpager/Pager;->scroll",
    "Landroid/graphics/Bitmap;->compress",
    "Landroid/text/TextUtils;->isEmpty",
    "Lcom/android/vending/billing/IInAppBillingService;->getBuyIntent",
    "Ljava/lang/reflect/Method;->invoke",
    "Ljava/net/URL;->openConnection",
    "Landroid/app/admin/DevicePolicyManager;->lockNow",
    "Landroid/provider/Settings$Secure;->getString",
    "Landroid/support/v4/app/Fragment;->onCreate",
];

#[test]
fn build_prunes_corpus_fixture_to_hand_oracle() {
    let raw = parse_api_list(CORPUS_50).unwrap();
    assert_eq!(raw.len(), 50);
    let dict = FeatureDictionary::build("1", &raw, &BTreeSet::new(), &PruneConfig::default()).unwrap();
    let mut expected: Vec<&str> = KEPT_BY_HAND.to_vec();
    expected.sort_unstable();
    let got: Vec<&str> = dict.entries().iter().map(|e| e.canonical.as_str()).collect();
    assert_eq!(got, expected);
    assert!(dict.entries().iter().all(|e| e.origin == Origin::Corpus));
}

#[test]
fn reference_counts() {
    let full = reference::full();
    assert_eq!((full.api_count(), full.manifest_count(), full.len()), (2290, 625, 2915));
    let base = reference::base();
    assert_eq!((base.api_count(), base.manifest_count()), (1509, 613));
    assert_eq!(base.count_of(FeatureKind::Permission), 324);
    assert_eq!(base.count_of(FeatureKind::IntentAction), 213);
    assert_eq!(base.count_of(FeatureKind::HardwareFeature), 76);
    let d = reference::delta();
    assert_eq!((d.new_api_calls.len(), d.new_manifest.len()), (46, 12));
    assert!(d.new_packages.contains("android/net/Uri"));
}

#[test]
fn update_keeps_base_entries_within_their_group() {
    let base = reference::base();
    let full = reference::full();
    // Every base feature survives, and API indices stay below every manifest index.
    for e in base.entries() {
        let i = full.index_of(&e.canonical).unwrap();
        assert_eq!(e.kind.is_manifest(), i >= full.api_count());
    }
    let expansion = full.entries().iter().filter(|e| e.origin == Origin::PackageExpansion);
    let prefixes = reference::delta().new_packages;
    for e in expansion {
        let call = ApiCall::parse(&e.canonical).unwrap();
        assert!(prefixes.iter().any(|p| call.class_descriptor().starts_with(&format!("L{p}"))), "{}", e.canonical);
    }
}

#[test]
fn empty_delta_only_bumps_version() {
    let base = reference::base();
    let same = base.update_with_behaviors(&BehaviorDelta::default(), &reference::universe());
    assert_eq!(same.version(), "2");
    assert_eq!(same.entries(), base.entries());
}

#[test]
fn text_round_trip_is_byte_exact() {
    let full = reference::full();
    assert_eq!(FeatureDictionary::parse(&full.to_text()).unwrap().to_text(), reference::FULL_TEXT);
}

#[test]
fn parse_rejections() {
    let header = "apkfeat-dict v1 api=2 manifest=0\n";
    let unsorted = format!("{header}api_call\tLb/cc/D;->x\tcorpus\napi_call\tLa/bb/C;->x\tcorpus\n");
    assert!(matches!(FeatureDictionary::parse(&unsorted), Err(DictError::OrderError { line: 3, .. })));
    let dup = format!("{header}api_call\tLa/bb/C;->x\tcorpus\napi_call\tLa/bb/C;->x\tcorpus\n");
    assert!(matches!(FeatureDictionary::parse(&dup), Err(DictError::DuplicateFeature(_))));
    let wrong_count = "apkfeat-dict v1 api=3 manifest=0\napi_call\tLa/bb/C;->x\tcorpus\n";
    assert!(FeatureDictionary::parse(wrong_count).is_err());
    let bad_kind = "apkfeat-dict v1 api=0 manifest=1\npermission\tnot a name\tdocumentation\n";
    assert!(FeatureDictionary::parse(bad_kind).is_err());
}

#[test]
fn vectorize_sets_exactly_the_present_features() {
    let full = reference::full();
    let calls: BTreeSet<ApiCall> = [
        "Landroid/telephony/SmsManager;->sendTextMessage",
        "Landroid/net/Uri;->parse",
        "Lcom/unknown/Thing;->notInDictionary",
    ]
    .iter()
    .map(|c| ApiCall::parse(c).unwrap())
    .collect();
    let mut manifest = ManifestInfo::default();
    manifest.permissions.insert("android.permission.SEND_SMS".into());
    manifest.intent_actions.insert("android.intent.action.BOOT_COMPLETED".into());
    manifest.hardware_features.insert("android.permission.SEND_SMS".into());
    let v = vectorize(&calls, &manifest, &full);
    let expected: BTreeSet<usize> = [
        full.index_of("Landroid/telephony/SmsManager;->sendTextMessage").unwrap(),
        full.index_of("Landroid/net/Uri;->parse").unwrap(),
        full.index_of("android.permission.SEND_SMS").unwrap(),
        full.index_of("android.intent.action.BOOT_COMPLETED").unwrap(),
    ]
    .into();
    assert_eq!(v.ones().collect::<BTreeSet<_>>(), expected);
    let (back, label) = text_to_vector(&vector_to_text(&v, Some(1))).unwrap();
    assert_eq!((back, label), (v, Some(1)));
}
