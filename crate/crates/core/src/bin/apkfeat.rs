//! `apkfeat`: scan, extract, dictionary, model, benchmark and synthesis
//! commands over the library pipeline.
//!
//! Exit codes for `scan`: 0 when every APK is benign, 1 when any verdict is
//! non-benign, 2 when anything failed. Every other command exits 0 on
//! success and 2 on failure. Results go to stdout, diagnostics to stderr.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use apkfeat::bench::{bench_corpus, BenchOptions, REFERENCE_BUCKETS_MB};
use apkfeat::dex::{ApiCall, DexOptions};
use apkfeat::dictionary::{
    self, parse_api_list, parse_manifest_list, BehaviorDelta, FeatureDictionary, FeatureKind, PruneConfig,
};
use apkfeat::model::{self, Architecture, CnnParams, ModelSpec};
use apkfeat::pipeline::{extract_features, vectorize_features, ScanResult};
use apkfeat::quant::{model_size_report, QuantizedModel, StoredTensor};
use apkfeat::synth::{api_catalogue, manifest_from_props, synth_apk_bytes, SynthContent, MB};
use apkfeat::vector::vector_to_text;
use apkfeat::{reference, AnyModel, Error, Inference, Model, ModelError, Scanner};

const EXIT_BENIGN: u8 = 0;
const EXIT_MALICIOUS: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "apkfeat", version, about = "Static APK feature extraction and malware classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one or more APKs.
    Scan(ScanArgs),
    /// Print the raw features of an APK, or its vector when a dictionary is given.
    Extract(ExtractArgs),
    /// Build, update, inspect or export feature dictionaries.
    #[command(subcommand)]
    Dict(DictCommand),
    /// Inspect, quantize or initialize model files.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Time every APK in a directory and write a CSV report.
    Bench(BenchArgs),
    /// Write a synthetic APK of an exact size with planted features.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ScanArgs {
    #[arg(required = true)]
    apks: Vec<PathBuf>,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, env = "APKFEAT_DICT")]
    dict: PathBuf,
    /// Run int8 inference; float models are quantized on load.
    #[arg(long)]
    quantized: bool,
    /// One JSON object per APK, one per line.
    #[arg(long)]
    json: bool,
    /// Worker threads across APK arguments.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    /// Also verify each dex SHA-1 signature.
    #[arg(long)]
    verify_signature: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct ExtractArgs {
    apk: PathBuf,
    /// Emit the feature vector over this dictionary instead of raw features.
    #[arg(long)]
    dict: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Class label written into the vector header.
    #[arg(long, requires = "dict")]
    label: Option<u32>,
}

#[derive(Subcommand)]
enum DictCommand {
    /// Prune a raw corpus call list and combine it with manifest properties.
    Build {
        /// One canonical API call per line.
        #[arg(long)]
        api_calls: PathBuf,
        /// `<kind>\t<name>` lines.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value = "1")]
        version: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Apply a behavior delta with package-prefix expansion.
    Update {
        dict: PathBuf,
        #[arg(long)]
        delta: PathBuf,
        /// Corpus call list the package prefixes expand against.
        #[arg(long)]
        universe: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print per-kind counts.
    Show {
        dict: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Write the bundled reference dictionary files into a directory.
    Reference {
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Print the header, tensor table and size of a model file.
    Inspect {
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Write the int8 form of a float model.
    Quantize {
        model: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a seeded random (or all-zero) model of a given shape.
    Init {
        #[arg(long)]
        arch: Architecture,
        /// Input width; defaults to the size of `--dict`.
        #[arg(long, required_unless_present = "dict")]
        input: Option<usize>,
        #[arg(long, conflicts_with = "input")]
        dict: Option<PathBuf>,
        #[arg(long, default_value_t = model::REFERENCE_HIDDEN_UNITS)]
        hidden: usize,
        #[arg(long, default_value_t = 2)]
        classes: usize,
        /// Comma-separated class names.
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        zeros: bool,
        /// CNN rows of the narrow width; input past three such rows is dropped.
        #[arg(long)]
        narrow_cnn: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct BenchArgs {
    dir: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, env = "APKFEAT_DICT")]
    dict: PathBuf,
    #[arg(long)]
    report: PathBuf,
    /// Per-bucket mean, median and p95.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    repeats: u32,
    /// Size buckets in MiB.
    #[arg(long, value_delimiter = ',')]
    buckets: Option<Vec<f64>>,
    /// Scan files concurrently; timings then contend.
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    no_warmup: bool,
    #[arg(long)]
    quantized: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(short, long)]
    output: PathBuf,
    /// Target size in MiB.
    #[arg(long)]
    size_mb: f64,
    /// Calls sampled from the dictionary when no `--call` is given.
    #[arg(long, default_value_t = 0)]
    n_api: usize,
    /// Planted API call in canonical form; repeatable.
    #[arg(long = "call")]
    calls: Vec<String>,
    #[arg(long = "permission")]
    permissions: Vec<String>,
    #[arg(long = "intent")]
    intents: Vec<String>,
    #[arg(long = "feature")]
    features: Vec<String>,
    /// Sampling catalogue; the bundled reference dictionary when absent.
    #[arg(long)]
    dict: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn report(err: &Error, apk: Option<&Path>) {
    let msg = err.to_string().replace('\n', " ");
    match apk {
        Some(p) => eprintln!("error kind={} apk={} msg={msg}", err.kind(), p.display()),
        None => eprintln!("error kind={} msg={msg}", err.kind()),
    }
}

fn invalid(msg: String) -> Error {
    std::io::Error::new(std::io::ErrorKind::InvalidInput, msg).into()
}

/// Compares header dimensions before any full load.
fn check_dimensions(model_path: &Path, dict_path: &Path) -> Result<(), Error> {
    let (spec, _) = model::read_header(model_path)?;
    let (_, api, manifest) = dictionary::read_header(dict_path)?;
    if spec.input_dim != api + manifest {
        return Err(ModelError::DimensionMismatch { expected: spec.input_dim, found: api + manifest }.into());
    }
    Ok(())
}

fn load_model(path: &Path, quantized: bool) -> Result<AnyModel, Error> {
    let m = AnyModel::load(path)?;
    Ok(if quantized { m.into_quantized() } else { m })
}

fn cmd_scan(args: ScanArgs) -> u8 {
    let setup = || -> Result<(AnyModel, FeatureDictionary), Error> {
        check_dimensions(&args.model, &args.dict)?;
        Ok((load_model(&args.model, args.quantized)?, FeatureDictionary::load(&args.dict)?))
    };
    let (model, dict) = match setup() {
        Ok(v) => v,
        Err(e) => {
            report(&e, None);
            return EXIT_ERROR;
        }
    };
    let dex = DexOptions { verify_signature: args.verify_signature, ..DexOptions::default() };
    let scanner = match Scanner::new(&model, &dict) {
        Ok(s) => s.with_dex_options(dex),
        Err(e) => {
            report(&e, None);
            return EXIT_ERROR;
        }
    };
    let results: Vec<Result<ScanResult, Error>> = if args.jobs > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(usize::from(args.jobs)).build() {
            Ok(pool) => pool.install(|| args.apks.par_iter().map(|p| scanner.scan(p)).collect()),
            Err(e) => {
                report(&std::io::Error::other(e.to_string()).into(), None);
                return EXIT_ERROR;
            }
        }
    } else {
        args.apks.iter().map(|p| scanner.scan(p)).collect()
    };
    let (mut failed, mut malicious) = (false, false);
    for (path, result) in args.apks.iter().zip(results) {
        match result {
            Ok(r) => {
                malicious |= !r.is_benign();
                if args.json {
                    println!("{}", serde_json::to_string(&r).expect("scan result serializes"));
                } else {
                    println!("{}\t{:.4}\t{}", r.verdict, r.confidence, r.apk);
                }
            }
            Err(e) => {
                failed = true;
                report(&e, Some(path));
            }
        }
    }
    if failed {
        EXIT_ERROR
    } else if malicious {
        EXIT_MALICIOUS
    } else {
        EXIT_BENIGN
    }
}

#[derive(Serialize)]
struct VectorJson<'a> {
    dict_version: &'a str,
    dimension: usize,
    label: Option<u32>,
    indices: Vec<usize>,
}

fn cmd_extract(args: ExtractArgs) -> Result<(), Error> {
    let features = extract_features(&args.apk, DexOptions::default())?;
    match (&args.dict, args.format) {
        (None, Format::Json) => {
            println!("{}", serde_json::to_string_pretty(&features).expect("features serialize"));
        }
        (None, Format::Text) => {
            let m = &features.manifest;
            let kinds = [
                (FeatureKind::ApiCall, &features.api_calls),
                (FeatureKind::Permission, &m.permissions),
                (FeatureKind::IntentAction, &m.intent_actions),
                (FeatureKind::HardwareFeature, &m.hardware_features),
            ];
            for (kind, values) in kinds {
                for v in values {
                    println!("{kind}\t{v}");
                }
            }
        }
        (Some(path), format) => {
            let dict = FeatureDictionary::load(path)?;
            let v = vectorize_features(&features, &dict);
            match format {
                Format::Text => print!("{}", vector_to_text(&v, args.label)),
                Format::Json => {
                    let out = VectorJson {
                        dict_version: dict.version(),
                        dimension: v.dimension(),
                        label: args.label,
                        indices: v.ones().collect(),
                    };
                    println!("{}", serde_json::to_string_pretty(&out).expect("vector serializes"));
                }
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DictCounts<'a> {
    version: &'a str,
    api: usize,
    manifest: usize,
    total: usize,
    permission: usize,
    intent_action: usize,
    hardware_feature: usize,
}

fn cmd_dict(cmd: DictCommand) -> Result<(), Error> {
    match cmd {
        DictCommand::Build { api_calls, manifest, version, output } => {
            let raw = parse_api_list(&std::fs::read_to_string(api_calls)?)?;
            let props = match manifest {
                Some(p) => parse_manifest_list(&std::fs::read_to_string(p)?)?,
                None => BTreeSet::new(),
            };
            let dict = FeatureDictionary::build(version, &raw, &props, &PruneConfig::default())?;
            dict.save(&output)?;
            eprintln!("kept {} of {} API calls", dict.api_count(), raw.len());
        }
        DictCommand::Update { dict, delta, universe, output } => {
            let base = FeatureDictionary::load(dict)?;
            let delta = BehaviorDelta::load(delta)?;
            let universe = match universe {
                Some(p) => parse_api_list(&std::fs::read_to_string(p)?)?,
                None => BTreeSet::new(),
            };
            let updated = base.update_with_behaviors(&delta, &universe);
            updated.save(&output)?;
            eprintln!(
                "v{} -> v{}: +{} api, +{} manifest",
                base.version(),
                updated.version(),
                updated.api_count() - base.api_count(),
                updated.manifest_count() - base.manifest_count()
            );
        }
        DictCommand::Show { dict, json } => {
            let d = FeatureDictionary::load(dict)?;
            let c = DictCounts {
                version: d.version(),
                api: d.api_count(),
                manifest: d.manifest_count(),
                total: d.len(),
                permission: d.count_of(FeatureKind::Permission),
                intent_action: d.count_of(FeatureKind::IntentAction),
                hardware_feature: d.count_of(FeatureKind::HardwareFeature),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&c).expect("counts serialize"));
            } else {
                println!("api={} manifest={} total={}", c.api, c.manifest, c.total);
                println!(
                    "permission={} intent_action={} hardware_feature={}",
                    c.permission, c.intent_action, c.hardware_feature
                );
                println!("version={}", c.version);
            }
        }
        DictCommand::Reference { output } => {
            std::fs::create_dir_all(&output)?;
            for (name, text) in [
                ("dict-base.txt", reference::BASE_TEXT),
                ("behavior-delta.txt", reference::DELTA_TEXT),
                ("api-universe.txt", reference::UNIVERSE_TEXT),
                ("dict-full.txt", reference::FULL_TEXT),
            ] {
                std::fs::write(output.join(name), text)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct TensorInfo {
    name: String,
    rows: usize,
    cols: usize,
    dtype: &'static str,
    scale: Option<f32>,
}

#[derive(Serialize)]
struct ModelInfo {
    architecture: Architecture,
    input_dim: usize,
    hidden_units: usize,
    num_classes: usize,
    labels: Vec<String>,
    quantized: bool,
    parameters: usize,
    file_bytes: u64,
    tensors: Vec<TensorInfo>,
}

fn cmd_model(cmd: ModelCommand) -> Result<(), Error> {
    match cmd {
        ModelCommand::Inspect { model: path, json } => {
            let file_bytes = std::fs::metadata(&path)?.len();
            let m = AnyModel::load(&path)?;
            let tensors = match &m {
                AnyModel::Float(f) => f
                    .tensors()
                    .iter()
                    .map(|(n, t)| TensorInfo { name: n.clone(), rows: t.rows, cols: t.cols, dtype: "f32", scale: None })
                    .collect(),
                AnyModel::Int8(q) => q
                    .tensors()
                    .iter()
                    .map(|(n, t)| match t {
                        StoredTensor::Float(t) => {
                            TensorInfo { name: n.clone(), rows: t.rows, cols: t.cols, dtype: "f32", scale: None }
                        }
                        StoredTensor::Int8(q) => {
                            TensorInfo { name: n.clone(), rows: q.rows, cols: q.cols, dtype: "i8", scale: Some(q.scale) }
                        }
                    })
                    .collect(),
            };
            let spec = m.spec();
            let info = ModelInfo {
                architecture: spec.architecture,
                input_dim: spec.input_dim,
                hidden_units: spec.hidden_units,
                num_classes: spec.num_classes,
                labels: spec.labels.clone(),
                quantized: m.is_quantized(),
                parameters: spec.parameter_count(),
                file_bytes,
                tensors,
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&info).expect("model info serializes"));
            } else {
                println!("{}", model::format_header(spec, info.quantized));
                println!("parameters={} file_bytes={}", info.parameters, info.file_bytes);
                for t in &info.tensors {
                    match t.scale {
                        Some(s) => println!("{}\t{}x{}\t{}\tscale={s:e}", t.name, t.rows, t.cols, t.dtype),
                        None => println!("{}\t{}x{}\t{}", t.name, t.rows, t.cols, t.dtype),
                    }
                }
            }
        }
        ModelCommand::Quantize { model: path, output } => {
            let float = Model::load(&path)?;
            let q = QuantizedModel::quantize(&float);
            q.save(&output)?;
            let r = model_size_report(&float, &q);
            println!("float_bytes={} quantized_bytes={} ratio={:.3}", r.float_bytes, r.quantized_bytes, r.ratio);
        }
        ModelCommand::Init { arch, input, dict, hidden, classes, labels, seed, zeros, narrow_cnn, output } => {
            let input = match (input, dict) {
                (Some(n), _) => n,
                (None, Some(d)) => {
                    let (_, api, manifest) = dictionary::read_header(d)?;
                    api + manifest
                }
                (None, None) => unreachable!("clap requires --input or --dict"),
            };
            let mut spec = ModelSpec::new(arch, input, hidden, classes);
            if let Some(l) = labels {
                spec = spec.with_labels(l);
            }
            if narrow_cnn {
                let p = spec.cnn.ok_or_else(|| invalid("--narrow-cnn requires --arch cnn".into()))?;
                spec = spec.with_cnn(CnnParams { width: model::REFERENCE_CNN_WIDTH, ..p });
            }
            let m = if zeros { Model::zeros(spec)? } else { Model::random(spec, seed)? };
            m.save(&output)?;
        }
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Error> {
    check_dimensions(&args.model, &args.dict)?;
    let model = load_model(&args.model, args.quantized)?;
    let dict = FeatureDictionary::load(&args.dict)?;
    let options = BenchOptions {
        buckets: args.buckets.unwrap_or_else(|| REFERENCE_BUCKETS_MB.to_vec()),
        repeats: args.repeats as usize,
        warmup: !args.no_warmup,
        parallel: args.parallel,
        dex: DexOptions::default(),
    };
    if options.buckets.is_empty() || options.buckets.iter().any(|b| !b.is_finite() || *b < 0.0) {
        return Err(invalid("--buckets must be non-negative numbers".into()));
    }
    let report = bench_corpus(&args.dir, &model, &dict, &options)?;
    std::fs::write(&args.report, report.to_csv()?)?;
    if let Some(summary) = &args.summary {
        std::fs::write(summary, report.aggregates_to_csv()?)?;
    }
    let errors = report.rows.iter().filter(|r| r.is_error()).count();
    eprintln!("scanned {} files, {errors} errors", report.rows.len());
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), Error> {
    if !args.size_mb.is_finite() || args.size_mb < 0.0 {
        return Err(invalid(format!("--size-mb {} is not a size", args.size_mb)));
    }
    let mut props: Vec<(FeatureKind, String)> = Vec::new();
    for (kind, values) in [
        (FeatureKind::Permission, &args.permissions),
        (FeatureKind::IntentAction, &args.intents),
        (FeatureKind::HardwareFeature, &args.features),
    ] {
        props.extend(values.iter().map(|v| (kind, v.clone())));
    }
    let content = if args.calls.is_empty() {
        let dict = match &args.dict {
            Some(p) => FeatureDictionary::load(p)?,
            None => reference::full(),
        };
        SynthContent::sampled(&api_catalogue(&dict), args.n_api, &props, args.seed)?
    } else {
        let calls = args
            .calls
            .iter()
            .map(|c| ApiCall::parse(c).ok_or_else(|| invalid(format!("{c:?} is not a canonical API call"))))
            .collect::<Result<Vec<_>, _>>()?;
        SynthContent::new(calls, manifest_from_props(&props, &format!("com.synth.app{}", args.seed))?)
    };
    let target = (args.size_mb * MB as f64).round() as u64;
    std::fs::write(&args.output, synth_apk_bytes(target, &content, args.seed)?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scan(args) => return ExitCode::from(cmd_scan(args)),
        Command::Extract(args) => cmd_extract(args),
        Command::Dict(cmd) => cmd_dict(cmd),
        Command::Model(cmd) => cmd_model(cmd),
        Command::Bench(args) => cmd_bench(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e, None);
            ExitCode::from(EXIT_ERROR)
        }
    }
}
