//! The bundled reference dictionary and the inputs that produce it.
//!
//! `base()` holds 1,509 API calls and 613 manifest properties (324
//! permissions, 213 intent actions, 76 hardware features). Applying
//! `delta()` against `universe()` adds 46 reported calls, 735 calls under
//! the reported package prefixes, and 12 manifest properties, which gives
//! `full()`: 2,290 + 625 = 2,915 features. Regenerate with the
//! `gen_reference_dictionary` example.

use std::collections::BTreeSet;

use crate::dex::ApiCall;
use crate::dictionary::{parse_api_list, BehaviorDelta, FeatureDictionary};

pub const BASE_TEXT: &str = include_str!("../data/dict-base.txt");
pub const DELTA_TEXT: &str = include_str!("../data/behavior-delta.txt");
pub const UNIVERSE_TEXT: &str = include_str!("../data/api-universe.txt");
pub const FULL_TEXT: &str = include_str!("../data/dict-full.txt");

pub const FULL_API: usize = 2290;
pub const FULL_MANIFEST: usize = 625;
pub const FULL_DIM: usize = FULL_API + FULL_MANIFEST;

pub fn base() -> FeatureDictionary {
    FeatureDictionary::parse(BASE_TEXT).expect("bundled base dictionary parses")
}

pub fn delta() -> BehaviorDelta {
    BehaviorDelta::parse(DELTA_TEXT).expect("bundled delta parses")
}

pub fn universe() -> BTreeSet<ApiCall> {
    parse_api_list(UNIVERSE_TEXT).expect("bundled universe parses")
}

pub fn full() -> FeatureDictionary {
    FeatureDictionary::parse(FULL_TEXT).expect("bundled dictionary parses")
}
