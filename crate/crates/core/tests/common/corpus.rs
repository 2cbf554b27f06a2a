//! Oracle-built APKs and the CLI exit-code matrix.

use std::path::{Path, PathBuf};
use std::process::Command;

use apkfeat::dictionary::{FeatureDictionary, Origin};

use super::axml_oracle::{encode_manifest, ANDROID_NS};
use super::dex_oracle::build_dex;

pub const MALWARE_CALL: &str = "Landroid/telephony/SmsManager;->sendTextMessage";
pub const MALWARE_PERMISSION: &str = "android.permission.SYSTEM_ALERT_WINDOW";

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// An APK planting `calls` split across two dex files and `permissions`.
pub fn planted_apk(path: &Path, calls: &[String], permissions: &[&str]) {
    let mut xml = format!("<manifest xmlns:android=\"{ANDROID_NS}\" package=\"com.t\">");
    for p in permissions {
        xml += &format!("<uses-permission android:name=\"{p}\"/>");
    }
    xml += "</manifest>";
    let pairs: Vec<(String, String)> = calls
        .iter()
        .map(|c| {
            let (class, name) = c.split_once("->").expect("canonical call");
            (class.to_owned(), name.to_owned())
        })
        .collect();
    let (a, b) = pairs.split_at(pairs.len() / 2);
    let dexes = [a, b].map(|part| build_dex(part, &[], b"035").bytes);
    std::fs::write(path, super::apk::apk(&encode_manifest(&xml), &dexes)).unwrap();
}

/// The first `n` corpus-derived API calls of `dict`.
pub fn corpus_calls(dict: &FeatureDictionary, n: usize) -> Vec<String> {
    dict.entries().iter().filter(|e| e.origin == Origin::Corpus).take(n).map(|e| e.canonical.clone()).collect()
}

pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
    /// Supplies the dictionary through `APKFEAT_DICT` instead of `--dict`.
    pub dict_from_env: bool,
    pub expected: i32,
}

/// Files the matrix refers to, written under `dir`.
pub struct MatrixInputs {
    pub dir: PathBuf,
}

impl MatrixInputs {
    pub fn create(dir: &Path) -> Self {
        let dict = apkfeat::reference::full();
        dict.save(dir.join("dict.txt")).unwrap();
        let clean = corpus_calls(&dict, 40);
        let mut bad = clean.clone();
        bad.push(MALWARE_CALL.to_owned());
        planted_apk(&dir.join("clean.apk"), &clean, &["android.permission.INTERNET"]);
        planted_apk(&dir.join("clean2.apk"), &clean[10..], &[]);
        planted_apk(&dir.join("mal-api.apk"), &bad, &["android.permission.INTERNET"]);
        planted_apk(&dir.join("mal-perm.apk"), &clean, &[MALWARE_PERMISSION]);
        std::fs::write(dir.join("notzip.apk"), b"this is not an archive").unwrap();
        let whole = std::fs::read(dir.join("clean.apk")).unwrap();
        std::fs::write(dir.join("truncated.apk"), &whole[..whole.len() / 2]).unwrap();
        Self { dir: dir.to_owned() }
    }

    fn path(&self, name: &str) -> String {
        if name.ends_with(".model") {
            fixture(name).display().to_string()
        } else {
            self.dir.join(name).display().to_string()
        }
    }

    fn case(&self, name: &'static str, model: &str, apks: &[&str], extra: &[&str], expected: i32) -> Case {
        let mut args = vec!["scan".to_owned(), "--model".to_owned(), self.path(model)];
        args.extend(extra.iter().map(|s| (*s).to_owned()));
        args.extend(apks.iter().map(|a| self.path(a)));
        Case { name, args, dict_from_env: false, expected }
    }

    pub fn cases(&self) -> Vec<Case> {
        let (f, q, stale) = ("cluster-gru.model", "cluster-gru-int8.model", "cluster-gru-base.model");
        let mut cases = vec![
            self.case("clean", f, &["clean.apk"], &[], 0),
            self.case("clean-int8", q, &["clean.apk"], &[], 0),
            self.case("clean-quantized-on-load", f, &["clean.apk"], &["--quantized"], 0),
            self.case("clean-json", f, &["clean2.apk"], &["--json"], 0),
            self.case("two-clean", f, &["clean.apk", "clean2.apk"], &[], 0),
            self.case("two-clean-jobs", f, &["clean.apk", "clean2.apk"], &["--jobs", "4"], 0),
            self.case("planted-api", f, &["mal-api.apk"], &[], 1),
            self.case("planted-permission", f, &["mal-perm.apk"], &[], 1),
            self.case("planted-int8", q, &["mal-api.apk"], &[], 1),
            self.case("clean-then-planted", f, &["clean.apk", "mal-api.apk"], &[], 1),
            self.case("planted-json", f, &["mal-perm.apk"], &["--json"], 1),
            self.case("planted-jobs", f, &["mal-api.apk", "clean.apk"], &["--jobs", "2"], 1),
            self.case("not-a-zip", f, &["notzip.apk"], &[], 2),
            self.case("truncated", f, &["truncated.apk"], &[], 2),
            self.case("clean-and-corrupt", f, &["clean.apk", "notzip.apk"], &[], 2),
            self.case("planted-and-corrupt", f, &["mal-api.apk", "truncated.apk"], &[], 2),
            self.case("missing-apk", f, &["absent.apk"], &[], 2),
            self.case("mismatched-model-clean", stale, &["clean.apk"], &[], 2),
            self.case("mismatched-model-planted", stale, &["mal-api.apk"], &[], 2),
        ];
        for c in &mut cases {
            c.args.splice(3..3, ["--dict".to_owned(), self.path("dict.txt")]);
        }
        let mut env = self.case("planted-dict-from-env", f, &["mal-api.apk"], &[], 1);
        env.dict_from_env = true;
        cases.push(env);
        cases
    }

    /// Exit code, stdout and stderr of one case.
    pub fn run(&self, case: &Case) -> (i32, String, String) {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_apkfeat"));
        cmd.args(&case.args).env_remove("APKFEAT_DICT");
        if case.dict_from_env {
            cmd.env("APKFEAT_DICT", self.path("dict.txt"));
        }
        let out = cmd.output().expect("binary runs");
        let code = out.status.code().expect("exited normally");
        (code, String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
    }
}
