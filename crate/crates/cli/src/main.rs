//! Command-line front end: threshold histograms, binarize images, evaluate
//! predictions against ground truth, sweep one hyperparameter, and tune all
//! four against a training corpus.
//!
//! Exit codes: 0 on success, 1 when a computation fails on valid inputs,
//! 2 for usage and input errors (bad flags, unreadable or malformed files).

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ght::image::{run_binarization, Algorithm, BinaryImage, GrayImage};
use ght::metrics::{aggregate, drd, f1, psnr, EvalReport, ImageRecord};
use ght::tuner::{tune, write_trace_csv, TuneConfig};
use ght::{ght as ght_threshold, GhtError, GhtParams, Histogram, ThresholdResult};
use rayon::prelude::*;

/// Marker for errors that should exit with the usage code.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

/// Everything except failures of the computation itself points at the
/// invocation or the input files.
fn is_usage(e: &anyhow::Error) -> bool {
    for cause in e.chain() {
        if cause.downcast_ref::<UsageError>().is_some() || cause.downcast_ref::<std::io::Error>().is_some() {
            return true;
        }
        if let Some(g) = cause.downcast_ref::<GhtError>() {
            return !matches!(g, GhtError::UniformGroundTruth | GhtError::DimensionMismatch(..));
        }
    }
    false
}

#[derive(Parser)]
#[command(name = "ght", version, about = "Histogram thresholding and image binarization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a threshold for a histogram CSV (columns x,n)
    Threshold(ThresholdArgs),
    /// Binarize a grayscale or color image (PNG, PGM, PPM)
    Binarize(BinarizeArgs),
    /// Score predicted masks against ground truth (F1, PSNR, DRD)
    Eval(EvalArgs),
    /// Threshold a histogram across a range of one hyperparameter
    Sweep(SweepArgs),
    /// Coordinate-descent search for the hyperparameters maximizing mean F1
    Tune(TuneArgs),
}

#[derive(Args)]
struct ParamOpts {
    /// Variance-prior strength (default 0)
    #[arg(long, conflicts_with = "nu_log2", allow_negative_numbers = true)]
    nu: Option<f64>,
    /// Variance-prior strength as a log2 exponent
    #[arg(long, allow_negative_numbers = true)]
    nu_log2: Option<f64>,
    /// Variance-prior scale (default 1)
    #[arg(long, conflicts_with = "tau_log2", allow_negative_numbers = true)]
    tau: Option<f64>,
    /// Variance-prior scale as a log2 exponent
    #[arg(long, allow_negative_numbers = true)]
    tau_log2: Option<f64>,
    /// Mixture-prior concentration (default 0)
    #[arg(long, conflicts_with = "kappa_log2", allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Mixture-prior concentration as a log2 exponent
    #[arg(long, allow_negative_numbers = true)]
    kappa_log2: Option<f64>,
    /// Mixture-prior mode in [0, 1] (default 0.5)
    #[arg(long, conflicts_with = "omega_log2", allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Mixture-prior mode as a log2 exponent
    #[arg(long, allow_negative_numbers = true)]
    omega_log2: Option<f64>,
}

impl ParamOpts {
    fn resolve(&self) -> Result<GhtParams> {
        let pick = |raw: Option<f64>, exp: Option<f64>, dflt: f64| {
            raw.or(exp.map(f64::exp2)).unwrap_or(dflt)
        };
        GhtParams::new(
            pick(self.nu, self.nu_log2, 0.0),
            pick(self.tau, self.tau_log2, 1.0),
            pick(self.kappa, self.kappa_log2, 0.0),
            pick(self.omega, self.omega_log2, 0.5),
        )
        .map_err(|e| usage(e.to_string()))
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AlgOpt {
    Ght,
    Met,
    Otsu,
    OtsuDistortion,
    Wprctile,
}

impl AlgOpt {
    fn build(self, params: &GhtParams) -> Algorithm {
        match self {
            AlgOpt::Ght => Algorithm::Ght(*params),
            AlgOpt::Met => Algorithm::Met,
            AlgOpt::Otsu => Algorithm::Otsu,
            AlgOpt::OtsuDistortion => Algorithm::OtsuDistortion,
            AlgOpt::Wprctile => Algorithm::Wprctile(params.omega()),
        }
    }
}

#[derive(Args)]
struct ThresholdArgs {
    /// Histogram CSV with header x,n
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgOpt::Ght)]
    algorithm: AlgOpt,
    /// Write the per-split score curve as CSV (columns x,score)
    #[arg(long)]
    scores: Option<PathBuf>,
    #[command(flatten)]
    params: ParamOpts,
}

#[derive(Args)]
struct BinarizeArgs {
    /// Input image (PNG, PGM, or PPM; color collapses by channel max)
    #[arg(long)]
    input: PathBuf,
    /// Output mask image; ink is 0, background 255 (PNG, or PGM by extension)
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgOpt::Ght)]
    algorithm: AlgOpt,
    #[command(flatten)]
    params: ParamOpts,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of predicted masks
    #[arg(long)]
    pred: PathBuf,
    /// Directory of ground-truth masks, matched to predictions by file stem
    #[arg(long)]
    gt: PathBuf,
    /// Write the full report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write per-image rows as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Skip unmatched files with a warning instead of failing
    #[arg(long)]
    allow_missing: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    Nu,
    Tau,
    Kappa,
    Omega,
}

#[derive(Args)]
struct SweepArgs {
    /// Histogram CSV with header x,n
    #[arg(long)]
    input: PathBuf,
    /// Which hyperparameter to sweep
    #[arg(long, value_enum)]
    param: SweepParam,
    /// Range start: log2 exponent for nu/tau/kappa, linear for omega
    #[arg(long, allow_negative_numbers = true)]
    min: f64,
    /// Range end (same units as --min)
    #[arg(long, allow_negative_numbers = true)]
    max: f64,
    /// Number of grid points (at least 2)
    #[arg(long)]
    count: usize,
    /// Output CSV (columns value,threshold); stdout if omitted
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    params: ParamOpts,
}

#[derive(Args)]
struct TuneArgs {
    /// Directory of training images
    #[arg(long)]
    train: PathBuf,
    /// Directory of ground-truth masks, matched by file stem
    #[arg(long)]
    gt: PathBuf,
    /// Write the best parameters as JSON
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write every objective evaluation as CSV
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Starting point
    #[arg(long, value_enum, default_value_t = Preset::Warm)]
    preset: Preset,
    #[arg(long, default_value_t = 20)]
    max_sweeps: usize,
    /// Skip unmatched files with a warning instead of failing
    #[arg(long)]
    allow_missing: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Preset {
    Warm,
    Cold,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_usage(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Threshold(args) => cmd_threshold(args),
        Command::Binarize(args) => cmd_binarize(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Tune(args) => cmd_tune(args),
    }
}

fn read_histogram(path: &Path) -> Result<Histogram> {
    Histogram::read_csv_path(path).with_context(|| format!("reading histogram {}", path.display()))
}

fn write_scores(path: &Path, h: &Histogram, res: &ThresholdResult) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(w, "x,score")?;
    for (i, s) in res.scores.iter().enumerate() {
        writeln!(w, "{},{}", h.x()[i], s)?;
    }
    Ok(())
}

fn cmd_threshold(args: ThresholdArgs) -> Result<()> {
    let h = read_histogram(&args.input)?;
    let params = args.params.resolve()?;
    let res = args.algorithm.build(&params).threshold(&h)?;
    if let Some(path) = &args.scores {
        write_scores(path, &h, &res)?;
    }
    println!("{:.6}", res.t);
    Ok(())
}

fn cmd_binarize(args: BinarizeArgs) -> Result<()> {
    let img = GrayImage::load(&args.input).with_context(|| format!("reading image {}", args.input.display()))?;
    let hist = Histogram::from_pixels(img.pixels())?;
    if hist.is_degenerate() {
        eprintln!("warning: degenerate histogram (single intensity); the mask is all one class");
    }
    let params = args.params.resolve()?;
    let (mask, res) = run_binarization(&img, &args.algorithm.build(&params))?;
    mask.save(&args.output)
        .with_context(|| format!("writing {}", args.output.display()))?;
    println!("{:.6}", res.t);
    Ok(())
}

/// Image files in `dir` keyed by file stem.
fn stem_map(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut map = BTreeMap::new();
    let entries = std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))?;
    for entry in entries {
        let path = entry?.path();
        let is_image = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| ["png", "pgm", "ppm"].contains(&e.to_ascii_lowercase().as_str()));
        if !is_image {
            continue;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| usage(format!("unreadable file name in {}", dir.display())))?
            .to_string();
        map.insert(stem, path);
    }
    Ok(map)
}

/// Pairs of same-stem files from two directories. Unmatched stems either
/// fail (usage error) or are skipped with a warning.
fn matched_pairs(
    a: &Path,
    b: &Path,
    allow_missing: bool,
) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    let ma = stem_map(a)?;
    let mut mb = stem_map(b)?;
    let mut pairs = Vec::new();
    let mut missing = Vec::new();
    for (stem, pa) in ma {
        match mb.remove(&stem) {
            Some(pb) => pairs.push((stem, pa, pb)),
            None => missing.push(format!("{stem} (only in {})", a.display())),
        }
    }
    for stem in mb.into_keys() {
        missing.push(format!("{stem} (only in {})", b.display()));
    }
    if !missing.is_empty() {
        if !allow_missing {
            return Err(usage(format!("unmatched files: {}", missing.join(", "))));
        }
        for m in &missing {
            eprintln!("warning: skipping unmatched {m}");
        }
    }
    if pairs.is_empty() {
        return Err(usage("no matched image pairs"));
    }
    Ok(pairs)
}

fn print_report(report: &EvalReport) {
    println!("{:<24} {:>8} {:>8} {:>8}", "id", "f1", "psnr", "drd");
    for r in &report.records {
        println!("{:<24} {:>8.2} {:>8.2} {:>8.2}", r.id, r.f1, r.psnr, r.drd);
    }
    println!(
        "{:<24} {:>8.2} {:>8.2} {:>8.2}",
        "mean", report.f1.mean, report.psnr.mean, report.drd.mean
    );
    println!(
        "{:<24} {:>8.2} {:>8.2} {:>8.2}",
        "std", report.f1.std, report.psnr.std, report.drd.std
    );
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let pairs = matched_pairs(&args.pred, &args.gt, args.allow_missing)?;
    let records: Vec<ImageRecord> = pairs
        .par_iter()
        .map(|(stem, pred_path, gt_path)| -> Result<ImageRecord> {
            let pred = BinaryImage::load(pred_path)
                .with_context(|| format!("reading prediction {}", pred_path.display()))?;
            let gt = BinaryImage::load(gt_path)
                .with_context(|| format!("reading ground truth {}", gt_path.display()))?;
            Ok(ImageRecord {
                id: stem.clone(),
                f1: f1(&pred, &gt).with_context(|| format!("scoring {stem}"))?,
                psnr: psnr(&pred, &gt).with_context(|| format!("scoring {stem}"))?,
                drd: drd(&pred, &gt).with_context(|| format!("scoring {stem}"))?,
            })
        })
        .collect::<Result<_>>()?;
    let report = aggregate(records)?;
    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.csv {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        report.write_csv(BufWriter::new(file))?;
    }
    print_report(&report);
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    if args.count < 2 {
        return Err(usage(format!("--count must be at least 2, got {}", args.count)));
    }
    if !(args.min < args.max) {
        return Err(usage(format!("--min must be below --max, got {} .. {}", args.min, args.max)));
    }
    if args.param == SweepParam::Omega && !(0.0..=1.0).contains(&args.min) {
        return Err(usage("omega sweep bounds must lie in [0, 1]"));
    }
    if args.param == SweepParam::Omega && !(0.0..=1.0).contains(&args.max) {
        return Err(usage("omega sweep bounds must lie in [0, 1]"));
    }
    let h = read_histogram(&args.input)?;
    let base = args.params.resolve()?;

    let mut rows = Vec::with_capacity(args.count);
    for i in 0..args.count {
        let pos = args.min + (args.max - args.min) * i as f64 / (args.count - 1) as f64;
        let (value, params) = match args.param {
            SweepParam::Nu => (pos.exp2(), GhtParams::new(pos.exp2(), base.tau(), base.kappa(), base.omega())),
            SweepParam::Tau => (pos.exp2(), GhtParams::new(base.nu(), pos.exp2(), base.kappa(), base.omega())),
            SweepParam::Kappa => (pos.exp2(), GhtParams::new(base.nu(), base.tau(), pos.exp2(), base.omega())),
            SweepParam::Omega => (pos, GhtParams::new(base.nu(), base.tau(), base.kappa(), pos)),
        };
        let params = params.map_err(|e| usage(e.to_string()))?;
        rows.push((value, ght_threshold(&h, &params).t));
    }

    let mut out: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    writeln!(out, "value,threshold")?;
    for (value, t) in rows {
        writeln!(out, "{value},{t}")?;
    }
    Ok(())
}

fn cmd_tune(args: TuneArgs) -> Result<()> {
    let pairs = matched_pairs(&args.train, &args.gt, args.allow_missing)?;
    let corpus: Vec<(GrayImage, BinaryImage)> = pairs
        .par_iter()
        .map(|(stem, train_path, gt_path)| -> Result<(GrayImage, BinaryImage)> {
            let img = GrayImage::load(train_path)
                .with_context(|| format!("reading image {}", train_path.display()))?;
            let gt = BinaryImage::load(gt_path)
                .with_context(|| format!("reading ground truth for {stem}"))?;
            Ok((img, gt))
        })
        .collect::<Result<_>>()?;

    let mut cfg = match args.preset {
        Preset::Warm => TuneConfig::warm(),
        Preset::Cold => TuneConfig::cold(),
    };
    cfg.max_sweeps = args.max_sweeps;
    let result = tune(&corpus, &cfg)?;

    let p = result.params;
    println!(
        "best: nu={} tau={} kappa={} omega={} (mean F1 {:.4}, {} evaluations)",
        p.nu(),
        p.tau(),
        p.kappa(),
        p.omega(),
        result.mean_f1,
        result.trace.len()
    );
    if let Some(path) = &args.output {
        let log2_or_null = |v: f64| {
            if v > 0.0 {
                serde_json::json!(v.log2())
            } else {
                serde_json::Value::Null
            }
        };
        let doc = serde_json::json!({
            "nu": p.nu(),
            "tau": p.tau(),
            "kappa": p.kappa(),
            "omega": p.omega(),
            "nu_log2": log2_or_null(p.nu()),
            "tau_log2": log2_or_null(p.tau()),
            "kappa_log2": log2_or_null(p.kappa()),
            "omega_log2": log2_or_null(p.omega()),
            "mean_f1": result.mean_f1,
        });
        std::fs::write(path, serde_json::to_string_pretty(&doc)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.trace {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_trace_csv(&result.trace, BufWriter::new(file))?;
    }
    Ok(())
}
