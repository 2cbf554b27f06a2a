//! APK assembly with the `zip` crate, independent of the library writer.

use std::io::Write;

use zip::write::SimpleFileOptions;
use zip::CompressionMethod;

/// `(name, bytes, deflate)` entries in order.
pub fn zip_entries(entries: &[(&str, &[u8], bool)]) -> Vec<u8> {
    let mut w = zip::ZipWriter::new(std::io::Cursor::new(Vec::new()));
    for (name, bytes, deflate) in entries {
        let method = if *deflate { CompressionMethod::Deflated } else { CompressionMethod::Stored };
        w.start_file(*name, SimpleFileOptions::default().compression_method(method)).unwrap();
        w.write_all(bytes).unwrap();
    }
    w.finish().unwrap().into_inner()
}

/// An APK with the given binary manifest and dex files (`classes.dex`,
/// `classes2.dex`, ...).
pub fn apk(manifest: &[u8], dexes: &[Vec<u8>]) -> Vec<u8> {
    let names: Vec<String> = (0..dexes.len())
        .map(|i| if i == 0 { "classes.dex".to_owned() } else { format!("classes{}.dex", i + 1) })
        .collect();
    let mut entries: Vec<(&str, &[u8], bool)> = vec![("AndroidManifest.xml", manifest, true)];
    entries.push(("res/raw/blob.bin", b"not a dex", false));
    for (n, d) in names.iter().zip(dexes) {
        entries.push((n.as_str(), d.as_slice(), true));
    }
    zip_entries(&entries)
}
