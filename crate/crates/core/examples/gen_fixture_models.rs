//! Regenerates the model fixtures under `tests/fixtures/`.
//!
//! ```text
//! cargo run -p apkfeat --example gen_fixture_models [-- <out-dir>]
//! ```

#[path = "../tests/common/fixtures.rs"]
mod fixtures;

use std::path::PathBuf;

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures"));
    std::fs::create_dir_all(&out_dir).expect("create output directory");
    for (name, bytes) in fixtures::all() {
        std::fs::write(out_dir.join(name), &bytes).expect("write fixture");
        println!("{name}: {} bytes", bytes.len());
    }
}
