use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::ptr;

use apkfeat::dex::ApiCall;
use apkfeat::dictionary::Origin;
use apkfeat::reference;
use apkfeat::synth::{manifest_from_props, synth_apk_bytes, SynthContent};
use apkfeat_ffi::*;

const MALWARE_CALL: &str = "Landroid/telephony/SmsManager;->sendTextMessage";

fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn c(p: &Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = apkfeat_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Env {
    dir: tempfile::TempDir,
    model: *mut ApkfeatModel,
    dict: *mut ApkfeatDictionary,
}

impl Env {
    fn new(model: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let dict = reference::full();
        dict.save(dir.path().join("dict.txt")).unwrap();
        let benign = dict.entries().iter().find(|e| e.origin == Origin::Corpus).unwrap().canonical.clone();
        for (name, call) in [("clean.apk", benign.as_str()), ("bad.apk", MALWARE_CALL)] {
            let calls = [ApiCall::parse(call).unwrap()];
            let content = SynthContent::new(calls, manifest_from_props(&[], "com.t").unwrap());
            std::fs::write(dir.path().join(name), synth_apk_bytes(8192, &content, 1).unwrap()).unwrap();
        }
        std::fs::write(dir.path().join("corrupt.apk"), b"PK\x03\x04 nope").unwrap();
        let (mut m, mut d) = (ptr::null_mut(), ptr::null_mut());
        unsafe {
            assert_eq!(apkfeat_model_load(c(&core_fixture(model)).as_ptr(), &mut m), ApkfeatStatus::Ok);
            assert_eq!(apkfeat_dictionary_load(c(&dir.path().join("dict.txt")).as_ptr(), &mut d), ApkfeatStatus::Ok);
        }
        Self { dir, model: m, dict: d }
    }

    fn apk(&self, name: &str) -> CString {
        c(&self.dir.path().join(name))
    }

    fn scan(&self, name: &str) -> (ApkfeatStatus, ApkfeatScanResult) {
        let mut r = ApkfeatScanResult::default();
        let s = unsafe { apkfeat_scan(self.model, self.dict, self.apk(name).as_ptr(), &mut r) };
        (s, r)
    }
}

impl Drop for Env {
    fn drop(&mut self) {
        unsafe {
            apkfeat_model_free(self.model);
            apkfeat_dictionary_free(self.dict);
        }
    }
}

#[test]
fn scan_verdicts_and_error_codes() {
    let env = Env::new("cluster-gru.model");
    let (s, clean) = env.scan("clean.apk");
    assert_eq!(s, ApkfeatStatus::Ok);
    assert!(clean.is_benign);
    assert_eq!(clean.features_present, 1);
    let (s, bad) = env.scan("bad.apk");
    assert_eq!(s, ApkfeatStatus::Ok);
    assert!(!bad.is_benign);
    assert_eq!(bad.class_index, 1);

    assert_eq!(env.scan("corrupt.apk").0, ApkfeatStatus::Apk);
    assert!(last_error().starts_with("ApkError: "), "{}", last_error());
    assert_eq!(env.scan("absent.apk").0, ApkfeatStatus::Io);

    let mut r = ApkfeatScanResult::default();
    let path = env.apk("clean.apk");
    unsafe {
        assert_eq!(apkfeat_scan(ptr::null(), env.dict, path.as_ptr(), &mut r), ApkfeatStatus::NullArg);
        assert_eq!(apkfeat_scan(env.model, env.dict, path.as_ptr(), ptr::null_mut()), ApkfeatStatus::NullArg);
        let bad_utf8 = [0xFFu8, 0];
        assert_eq!(apkfeat_scan(env.model, env.dict, bad_utf8.as_ptr().cast::<c_char>(), &mut r), ApkfeatStatus::Utf8);
    }
    assert_eq!(last_error(), "path is not UTF-8: invalid utf-8 sequence of 1 bytes from index 0");
}

#[test]
fn mismatched_model_reports_dimension() {
    let env = Env::new("cluster-gru-base.model");
    assert_eq!(env.scan("clean.apk").0, ApkfeatStatus::Dimension);
    assert!(last_error().starts_with("DimensionMismatch: "));
}

#[test]
fn quantize_in_place_keeps_verdicts() {
    let env = Env::new("cluster-gru.model");
    unsafe {
        assert!(!apkfeat_model_is_quantized(env.model));
        assert_eq!(apkfeat_model_quantize(env.model), ApkfeatStatus::Ok);
        assert!(apkfeat_model_is_quantized(env.model));
        assert_eq!(apkfeat_model_quantize(env.model), ApkfeatStatus::Ok);
        assert_eq!(apkfeat_model_quantize(ptr::null_mut()), ApkfeatStatus::NullArg);
    }
    assert!(env.scan("clean.apk").1.is_benign);
    assert!(!env.scan("bad.apk").1.is_benign);
}

#[test]
fn extract_then_predict_matches_scan() {
    let env = Env::new("cluster-gru.model");
    let n = unsafe { apkfeat_dictionary_len(env.dict) };
    assert_eq!(n, reference::FULL_DIM);
    assert_eq!(unsafe { apkfeat_model_input_dim(env.model) }, n);
    let path = env.apk("bad.apk");
    let mut written = 0;
    let mut small = vec![0u8; 10];
    let s = unsafe { apkfeat_extract_vector(env.dict, path.as_ptr(), small.as_mut_ptr(), small.len(), &mut written) };
    assert_eq!((s, written), (ApkfeatStatus::BufferTooSmall, n));
    assert!(small.iter().all(|&b| b == 0));

    let mut bits = vec![7u8; n];
    let s = unsafe { apkfeat_extract_vector(env.dict, path.as_ptr(), bits.as_mut_ptr(), n, &mut written) };
    assert_eq!(s, ApkfeatStatus::Ok);
    let idx = reference::full().index_of(MALWARE_CALL).unwrap();
    assert_eq!(bits.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).collect::<Vec<_>>(), [idx]);

    let mut r = ApkfeatScanResult::default();
    assert_eq!(unsafe { apkfeat_predict_vector(env.model, bits.as_ptr(), n, &mut r) }, ApkfeatStatus::Ok);
    assert_eq!(r, env.scan("bad.apk").1);
    assert_eq!(unsafe { apkfeat_predict_vector(env.model, bits.as_ptr(), n - 1, &mut r) }, ApkfeatStatus::Dimension);
    bits[0] = 2;
    assert_eq!(unsafe { apkfeat_predict_vector(env.model, bits.as_ptr(), n, &mut r) }, ApkfeatStatus::InvalidArg);
}

#[test]
fn labels_and_version() {
    let env = Env::new("cluster-gru.model");
    let mut needed = 0;
    let mut buf = [0 as c_char; 16];
    unsafe {
        assert_eq!(apkfeat_model_num_classes(env.model), 2);
        assert_eq!(apkfeat_model_label(env.model, 1, buf.as_mut_ptr(), 3, &mut needed), ApkfeatStatus::BufferTooSmall);
        assert_eq!(apkfeat_model_label(env.model, 1, buf.as_mut_ptr(), buf.len(), &mut needed), ApkfeatStatus::Ok);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_str().unwrap(), "malware");
        assert_eq!(needed, 8);
        assert_eq!(apkfeat_model_label(env.model, 2, buf.as_mut_ptr(), buf.len(), &mut needed), ApkfeatStatus::InvalidArg);
        assert_eq!(CStr::from_ptr(apkfeat_version()).to_str().unwrap(), env!("CARGO_PKG_VERSION"));
        assert_eq!(apkfeat_dictionary_len(ptr::null()), 0);
        apkfeat_model_free(ptr::null_mut());
        apkfeat_dictionary_free(ptr::null_mut());
    }
}

#[test]
fn load_failures() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "apkfeat-dict v1 api=1 manifest=0\nnot-a-call\n").unwrap();
    let mut d = ptr::null_mut();
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(apkfeat_dictionary_load(c(&bad).as_ptr(), &mut d), ApkfeatStatus::Dict);
        assert!(d.is_null());
        assert_eq!(apkfeat_model_load(c(&bad).as_ptr(), &mut m), ApkfeatStatus::Model);
        assert_eq!(apkfeat_model_load(c(&dir.path().join("none")).as_ptr(), &mut m), ApkfeatStatus::Io);
        assert_eq!(apkfeat_model_load(ptr::null(), &mut m), ApkfeatStatus::NullArg);
        assert_eq!(apkfeat_dictionary_load(c(&bad).as_ptr(), ptr::null_mut()), ApkfeatStatus::NullArg);
    }
    assert!(m.is_null());
}

#[test]
fn handles_are_shared_across_threads() {
    let env = Env::new("cluster-gru.model");
    let (m, d) = (env.model as usize, env.dict as usize);
    let paths = [env.apk("clean.apk"), env.apk("bad.apk")];
    std::thread::scope(|s| {
        for t in 0..8 {
            let path = &paths[t % 2];
            s.spawn(move || {
                let mut r = ApkfeatScanResult::default();
                let status = unsafe {
                    apkfeat_scan(m as *const ApkfeatModel, d as *const ApkfeatDictionary, path.as_ptr(), &mut r)
                };
                assert_eq!(status, ApkfeatStatus::Ok);
                assert_eq!(r.is_benign, t % 2 == 0);
            });
        }
    });
}

/// Compiles `tests/c/smoke.c` against the generated header and the static
/// library. Skipped when no C compiler is on PATH.
#[test]
fn c_program_links_and_scans() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_owned();
    let lib = profile_dir.join("libapkfeat_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let env = Env::new("cluster-gru.model");
    let exe = env.dir.path().join("smoke");
    let out = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dict = env.dir.path().join("dict.txt");
    for (apk, benign) in [("clean.apk", "1"), ("bad.apk", "0")] {
        let run = std::process::Command::new(&exe)
            .arg(core_fixture("cluster-gru.model"))
            .arg(&dict)
            .arg(env.dir.path().join(apk))
            .arg(benign)
            .output()
            .unwrap();
        assert!(run.status.success(), "{apk}: {:?} {}", run.status, String::from_utf8_lossy(&run.stderr));
        let expected = if benign == "1" { "benign " } else { "malware " };
        assert!(String::from_utf8_lossy(&run.stdout).starts_with(expected));
    }
}
