//! Phase-timed corpus measurement.
//!
//! Each file is scanned `repeats` times and the per-phase medians are
//! reported. One untimed scan of the first file runs before any timing.
//! Per-file failures become error rows and never abort the run.

use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dex::DexOptions;
use crate::dictionary::FeatureDictionary;
use crate::model::Inference;
use crate::pipeline::{PhaseTimings, Scanner};
use crate::synth::MB;
use crate::Error;

/// Default report size buckets, in MiB.
pub const REFERENCE_BUCKETS_MB: [f64; 6] = [5.0, 10.0, 20.0, 30.0, 40.0, 50.0];

pub const REPORT_COLUMNS: [&str; 10] = [
    "apk_path",
    "size_bytes",
    "bucket_mb",
    "unzip_s",
    "extract_s",
    "predict_ms",
    "total_s",
    "label",
    "confidence",
    "error",
];

/// One report row. Timing fields are empty on error rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub apk_path: String,
    pub size_bytes: u64,
    pub bucket_mb: f64,
    pub unzip_s: Option<f64>,
    pub extract_s: Option<f64>,
    pub predict_ms: Option<f64>,
    pub total_s: Option<f64>,
    pub label: Option<String>,
    pub confidence: Option<f64>,
    pub error: Option<String>,
}

impl TimingRow {
    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
}

impl Summary {
    /// Zeros for an empty sample. p95 uses the nearest-rank definition.
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let rank = (0.95 * n as f64).ceil() as usize;
        Self { mean: v.iter().sum::<f64>() / n as f64, median: median_sorted(&v), p95: v[rank.max(1) - 1] }
    }
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        0.0
    } else {
        median_sorted(&v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketSummary {
    pub bucket_mb: f64,
    pub files: usize,
    pub errors: usize,
    pub unzip_s: Summary,
    pub extract_s: Summary,
    pub predict_ms: Summary,
    pub total_s: Summary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub rows: Vec<TimingRow>,
    pub buckets: Vec<f64>,
}

impl TimingReport {
    /// One summary per configured bucket; successful rows only.
    pub fn aggregates(&self) -> Vec<BucketSummary> {
        self.buckets
            .iter()
            .map(|&b| {
                let rows: Vec<&TimingRow> = self.rows.iter().filter(|r| r.bucket_mb == b).collect();
                let ok: Vec<&&TimingRow> = rows.iter().filter(|r| !r.is_error()).collect();
                let col = |f: fn(&TimingRow) -> Option<f64>| Summary::of(&ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
                BucketSummary {
                    bucket_mb: b,
                    files: rows.len(),
                    errors: rows.len() - ok.len(),
                    unzip_s: col(|r| r.unzip_s),
                    extract_s: col(|r| r.extract_s),
                    predict_ms: col(|r| r.predict_ms),
                    total_s: col(|r| r.total_s),
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String, Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(REPORT_COLUMNS)?;
        }
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Parses rows written by `to_csv`; bucket list is recovered from the rows.
    pub fn from_csv(text: &str) -> Result<Self, Error> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
        if header != REPORT_COLUMNS {
            return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, format!("unexpected header {header:?}")).into());
        }
        let rows = r.deserialize().collect::<Result<Vec<TimingRow>, _>>()?;
        let mut buckets: Vec<f64> = rows.iter().map(|r| r.bucket_mb).collect();
        buckets.sort_by(f64::total_cmp);
        buckets.dedup();
        Ok(Self { rows, buckets })
    }

    pub fn aggregates_to_csv(&self) -> Result<String, Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "bucket_mb", "files", "errors", "unzip_mean_s", "unzip_median_s", "unzip_p95_s", "extract_mean_s",
            "extract_median_s", "extract_p95_s", "predict_mean_ms", "predict_median_ms", "predict_p95_ms",
            "total_mean_s", "total_median_s", "total_p95_s",
        ])?;
        for a in self.aggregates() {
            let mut rec = vec![a.bucket_mb.to_string(), a.files.to_string(), a.errors.to_string()];
            for s in [a.unzip_s, a.extract_s, a.predict_ms, a.total_s] {
                rec.extend([s.mean, s.median, s.p95].map(|v| format!("{v:.6}")));
            }
            w.write_record(rec)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Nearest configured bucket; ties go to the smaller bucket.
pub fn nearest_bucket(size_bytes: u64, buckets: &[f64]) -> f64 {
    let mb = size_bytes as f64 / MB as f64;
    buckets.iter().copied().fold(f64::NAN, |best, b| {
        if best.is_nan() || (b - mb).abs() < (best - mb).abs() {
            b
        } else {
            best
        }
    })
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub buckets: Vec<f64>,
    pub repeats: usize,
    pub warmup: bool,
    /// Scans files concurrently. Throughput only: phase timings contend.
    pub parallel: bool,
    pub dex: DexOptions,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { buckets: REFERENCE_BUCKETS_MB.to_vec(), repeats: 3, warmup: true, parallel: false, dex: DexOptions::default() }
    }
}

/// Regular files ending in `.apk` (any case), sorted by name.
pub fn list_apks(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let is_apk = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("apk"));
        if is_apk && path.is_file() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn measure<M: Inference + Sync + ?Sized>(scanner: &Scanner<'_, M>, path: &Path, options: &BenchOptions) -> TimingRow {
    let size_bytes = std::fs::metadata(path).map(|m| m.len()).unwrap_or(0);
    let mut row = TimingRow {
        apk_path: path.display().to_string(),
        size_bytes,
        bucket_mb: nearest_bucket(size_bytes, &options.buckets),
        unzip_s: None,
        extract_s: None,
        predict_ms: None,
        total_s: None,
        label: None,
        confidence: None,
        error: None,
    };
    let mut runs: Vec<PhaseTimings> = Vec::with_capacity(options.repeats.max(1));
    for _ in 0..options.repeats.max(1) {
        match scanner.scan(path) {
            Ok(result) => {
                row.label = Some(result.verdict);
                row.confidence = Some(result.confidence);
                runs.push(result.timings);
            }
            Err(e) => {
                row.error = Some(format!("{}: {e}", e.kind()));
                return row;
            }
        }
    }
    let med = |f: fn(&PhaseTimings) -> Duration| median(&runs.iter().map(|t| f(t).as_secs_f64()).collect::<Vec<_>>());
    row.unzip_s = Some(med(|t| t.unzip));
    row.extract_s = Some(med(|t| t.extract));
    row.predict_ms = Some(med(|t| t.predict) * 1000.0);
    row.total_s = Some(med(|t| t.total));
    row
}

/// Scans every APK in `dir`. Fails only if the model and dictionary
/// disagree or `dir` cannot be listed.
pub fn bench_corpus<M: Inference + Sync + ?Sized>(
    dir: &Path,
    model: &M,
    dict: &FeatureDictionary,
    options: &BenchOptions,
) -> Result<TimingReport, Error> {
    let scanner = Scanner::new(model, dict)?.with_dex_options(options.dex);
    let files = list_apks(dir)?;
    if options.warmup {
        if let Some(first) = files.first() {
            let _ = scanner.scan(first);
        }
    }
    let rows = if options.parallel {
        files.par_iter().map(|p| measure(&scanner, p, options)).collect()
    } else {
        files.iter().map(|p| measure(&scanner, p, options)).collect()
    };
    Ok(TimingReport { rows, buckets: options.buckets.clone() })
}
