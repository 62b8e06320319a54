//! Command-line front end: `sig compute`, `features extract`, `train`,
//! `eval`, `predict` and `bench`.

mod bench;
pub mod formats;
mod metrics;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::classifier::{train, train_two_stage, two_stage_predict, LinearNetModel, TrainConfig, TwoStageModel};
use crate::error::{Error, Result};
use crate::sigcore::{path_signature, DiscretePath};
use crate::skeleton::{
    extract_clips, prepare_body, prepare_clip, read_labels, write_labels, ExtractConfig,
    FeatureExtractor, FeatureMatrix, FeatureScaler,
};
use crate::transforms::{add_time, lead_lag};

pub use bench::{random_path, run_bench, BenchReport};
pub use formats::{read_clip_file, read_descriptor, read_path_file, write_clip_file, write_descriptor, DatasetManifest, ManifestRecord, Split};
pub use metrics::Evaluation;

#[derive(Debug, Parser)]
#[command(name = "skelsig", version, about = "Path signatures and skeleton action features")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Signature utilities.
    Sig {
        #[command(subcommand)]
        command: SigCommand,
    },
    /// Feature extraction.
    Features {
        #[command(subcommand)]
        command: FeaturesCommand,
    },
    /// Train a classifier (or the two-stage composition).
    Train(TrainArgs),
    /// Evaluate a classifier on labelled features.
    Eval(EvalArgs),
    /// Classify a single clip.
    Predict(PredictArgs),
    /// Time signature computation on a random path.
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
pub enum SigCommand {
    /// Print the truncated signature of a path file.
    Compute {
        path: PathBuf,
        #[arg(long)]
        level: usize,
        /// Append a time coordinate (after lead-lag, if both are given).
        #[arg(long)]
        add_time: bool,
        /// Lead-lag lift of a 1D path to this many coordinates.
        #[arg(long, value_name = "K")]
        lead_lag: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum FeaturesCommand {
    /// Extract train/test feature matrices from a manifest.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        descriptor: PathBuf,
        /// TOML extraction config; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// TOML training config; paper defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Number of classes; defaults to the largest label plus one.
    #[arg(long)]
    pub classes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Train gate + one-body + multi-body models from a manifest.
    #[arg(long)]
    pub two_stage: bool,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub descriptor: Option<PathBuf>,
    #[arg(long)]
    pub extract_config: Option<PathBuf>,
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Supplies class names for the report.
    #[arg(long)]
    pub descriptor: Option<PathBuf>,
    #[arg(long)]
    pub two_stage: bool,
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub clip: PathBuf,
    #[arg(long)]
    pub descriptor: PathBuf,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// One-row SIGFEAT1 scaler written by `features extract`.
    #[arg(long)]
    pub scaler: Option<PathBuf>,
    #[arg(long)]
    pub extract_config: Option<PathBuf>,
    #[arg(long)]
    pub two_stage: bool,
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
    /// Minimum actor count for the clip.
    #[arg(long, default_value_t = 1)]
    pub actors: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 60)]
    pub dim: usize,
    #[arg(long, default_value_t = 4)]
    pub level: usize,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Process exit code for an error: 2 for malformed files, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_format() {
        2
    } else {
        1
    }
}

fn need<'a>(opt: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    opt.as_deref()
        .ok_or_else(|| Error::input(format!("missing required flag --{flag}")))
}

fn read_toml<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::format(path, None, e.to_string()))
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Sig {
            command: SigCommand::Compute { path, level, add_time, lead_lag },
        } => sig_compute(&path, level, add_time, lead_lag, out),
        Command::Features {
            command: FeaturesCommand::Extract { manifest, descriptor, config, out: dir, seed },
        } => features_extract(&manifest, &descriptor, config.as_deref(), &dir, seed, out),
        Command::Train(args) => cmd_train(&args, out),
        Command::Eval(args) => cmd_eval(&args, out),
        Command::Predict(args) => cmd_predict(&args, out),
        Command::Bench(args) => {
            let report = run_bench(args.dim, args.level, args.points, args.repeats, args.seed)?;
            writeln!(out, "{report}").map_err(io_err)
        }
    }
}

/// One line per coefficient: level, 1-based multi-index, value.
pub fn sig_compute(
    path: &Path,
    level: usize,
    time: bool,
    lead: Option<usize>,
    out: &mut dyn Write,
) -> Result<()> {
    let mut p: DiscretePath = read_path_file(path)?;
    if let Some(k) = lead {
        if p.dim() != 1 {
            return Err(Error::input(format!("--lead-lag needs a 1D path, got dimension {}", p.dim())));
        }
        p = lead_lag(p.as_slice(), k)?;
    }
    if time {
        p = add_time(&p);
    }
    let sig = path_signature(&p, level)?;
    let d = sig.dim();
    for k in 1..=level {
        for (flat, v) in sig.block(k).iter().enumerate() {
            let mut digits = Vec::with_capacity(k);
            let mut rest = flat;
            for _ in 0..k {
                digits.push((rest % d + 1).to_string());
                rest /= d;
            }
            digits.reverse();
            writeln!(out, "{k}\t{}\t{v}", digits.join(",")).map_err(io_err)?;
        }
    }
    Ok(())
}

fn features_extract(
    manifest: &Path,
    descriptor: &Path,
    config: Option<&Path>,
    dir: &Path,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> Result<()> {
    let desc = read_descriptor(descriptor)?;
    let mut cfg: ExtractConfig = read_toml(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let manifest = DatasetManifest::read(manifest, &desc)?;
    let train_clips = manifest.load_split(Split::Train, &desc)?;
    let test_clips = manifest.load_split(Split::Test, &desc)?;
    let (mut train_m, train_l) = extract_clips(&train_clips, &desc, &cfg, true)?;
    let (mut test_m, test_l) = extract_clips(&test_clips, &desc, &cfg, false)?;
    let scaler = FeatureScaler::fit(train_m.iter_rows())?;
    for m in [&mut train_m, &mut test_m] {
        for r in 0..m.rows {
            scaler.apply(m.row_mut(r))?;
        }
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    train_m.write(&dir.join("train.sigfeat"))?;
    write_labels(&dir.join("train.labels"), &train_l)?;
    test_m.write(&dir.join("test.sigfeat"))?;
    write_labels(&dir.join("test.labels"), &test_l)?;
    let mut scale_m = FeatureMatrix::new(scaler.len(), train_m.layout.clone());
    scale_m.push_row(scaler.scales())?;
    scale_m.write(&dir.join("scaler.sigfeat"))?;

    let dims = cfg.features.dimensions(desc.joints * cfg.bodies, desc.dims);
    let mut w = |s: String| writeln!(out, "{s}").map_err(io_err);
    w(format!("train rows: {}", train_m.rows))?;
    w(format!("test rows: {}", test_m.rows))?;
    w(format!("D_sj: {}", dims.joints))?;
    w(format!("D_SP: {}", dims.pairs))?;
    w(format!("D_ST: {}", dims.triples))?;
    w(format!("D_S: {}", dims.spatial))?;
    w(format!("D_TJ: {}", dims.temporal_joints))?;
    w(format!("D_TS: {}", dims.temporal_spatial))?;
    w(format!("D_T: {}", dims.temporal))?;
    w(format!("D: {}", dims.total))?;
    for kind in crate::skeleton::BlockKind::ALL {
        w(format!("block {kind}: {}", train_m.layout.width(kind)))?;
    }
    Ok(())
}

fn cmd_train(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg: TrainConfig = read_toml(args.config.as_deref())?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.two_stage {
        let desc = read_descriptor(need(&args.descriptor, "descriptor")?)?;
        let manifest = DatasetManifest::read(need(&args.manifest, "manifest")?, &desc)?;
        let extract: ExtractConfig = read_toml(args.extract_config.as_deref())?;
        let clips = manifest.load_split(Split::Train, &desc)?;
        let model = train_two_stage(&clips, &desc, &extract, &cfg)?;
        let dir = need(&args.model_dir, "model-dir")?;
        model.save_dir(dir)?;
        writeln!(out, "one-body classes: {:?}", model.one_body.classes).map_err(io_err)?;
        writeln!(out, "multi-body classes: {:?}", model.multi_body.classes).map_err(io_err)?;
        return Ok(());
    }
    let features = FeatureMatrix::read(need(&args.features, "features")?)?;
    let labels = read_labels(need(&args.labels, "labels")?)?;
    let classes = args
        .classes
        .unwrap_or_else(|| labels.iter().max().map_or(0, |m| m + 1));
    let model = LinearNetModel::new(features.cols, classes, cfg.clone())?;
    let outcome = train(model, &features, &labels, &cfg)?;
    outcome.model.save(need(&args.model, "model")?)?;
    let mut text = String::from("# epoch lr loss train_accuracy\n");
    for e in &outcome.history {
        text.push_str(&format!("{} {} {} {}\n", e.epoch, e.learning_rate, e.loss, e.accuracy));
    }
    if let Some(h) = &args.history {
        fs::write(h, &text).map_err(|e| Error::io(h, e))?;
    }
    if let Some(last) = outcome.history.last() {
        writeln!(out, "epochs: {}", outcome.history.len()).map_err(io_err)?;
        writeln!(out, "final loss: {}", last.loss).map_err(io_err)?;
        writeln!(out, "final train accuracy: {}", last.accuracy).map_err(io_err)?;
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    if args.two_stage {
        let desc = read_descriptor(need(&args.descriptor, "descriptor")?)?;
        let manifest = DatasetManifest::read(need(&args.manifest, "manifest")?, &desc)?;
        let model = TwoStageModel::load_dir(need(&args.model_dir, "model-dir")?)?;
        let clips = manifest.load_split(Split::Test, &desc)?;
        let mut truth = Vec::with_capacity(clips.len());
        let mut predicted = Vec::with_capacity(clips.len());
        for clip in &clips {
            truth.push(clip.label.expect("manifest clips are labelled"));
            predicted.push(two_stage_predict(&model, clip, &desc)?.label);
        }
        let eval = Evaluation::new(desc.class_names.len(), &truth, &predicted);
        return write!(out, "{}", eval.render(&desc.class_names)).map_err(io_err);
    }
    let model = LinearNetModel::load(need(&args.model, "model")?)?;
    let features = FeatureMatrix::read(need(&args.features, "features")?)?;
    let labels = read_labels(need(&args.labels, "labels")?)?;
    if labels.len() != features.rows {
        return Err(Error::input("label count differs from feature rows"));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= model.class_count()) {
        return Err(Error::input(format!("label {bad} outside the model's {} classes", model.class_count())));
    }
    let names = match &args.descriptor {
        Some(p) => read_descriptor(p)?.class_names,
        None => Vec::new(),
    };
    let predicted = features
        .iter_rows()
        .map(|r| model.predict(r).map(|(c, _)| c))
        .collect::<Result<Vec<_>>>()?;
    let eval = Evaluation::new(model.class_count(), &labels, &predicted);
    write!(out, "{}", eval.render(&names)).map_err(io_err)
}

fn cmd_predict(args: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    let desc = read_descriptor(&args.descriptor)?;
    let clip = read_clip_file(&args.clip, &desc, args.actors)?;
    let name = |c: usize| desc.class_names.get(c).cloned().unwrap_or_else(|| c.to_string());
    if args.two_stage {
        let model = TwoStageModel::load_dir(need(&args.model_dir, "model-dir")?)?;
        let p = two_stage_predict(&model, &clip, &desc)?;
        return writeln!(out, "{}\t{}", name(p.label), p.probability).map_err(io_err);
    }
    let cfg: ExtractConfig = read_toml(args.extract_config.as_deref())?;
    let model = LinearNetModel::load(need(&args.model, "model")?)?;
    let scale_path = need(&args.scaler, "scaler")?;
    let scale_m = FeatureMatrix::read(scale_path)?;
    if scale_m.rows != 1 {
        return Err(Error::format(scale_path, None, "scaler file must hold one row"));
    }
    let scaler = FeatureScaler::from_scales(scale_m.data)?;
    let prepared = prepare_clip(&clip, cfg.centering);
    let body = prepare_body(&prepared, cfg.bodies)?;
    let extractor = FeatureExtractor::new(&cfg.features, &desc.stacked(cfg.bodies))?;
    let mut x = extractor.extract(&body)?.values;
    scaler.apply(&mut x)?;
    let (c, p) = model.predict(&x)?;
    writeln!(out, "{}\t{}", name(c), p).map_err(io_err)
}
