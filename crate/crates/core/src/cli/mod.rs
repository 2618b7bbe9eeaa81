//! The `cldet` command line: estimate, evaluate, train, generate, elbow and
//! bench subcommands.
//!
//! Exit codes: 0 success, 1 user or input error, 2 internal invariant
//! violation. Output files are written to a temporary file in the target
//! directory and renamed into place, so a failed run never leaves a partial
//! file behind.

mod config;
mod svg;

pub use config::{parse_point, read_config_file, CliConfig, PipelineOverrides, Tolerance};
pub use svg::elbow_svg;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classification::{
    classify_trajectory, extract_features, train, ClassifierModel,
};
use crate::clustering::{elbow_curve, knee_point, KMeansConfig, KMeansInit};
use crate::dataio::{
    load_sequence, read_cloud_file, read_predictions, read_truth_file, save_sequence,
    sequence_id_for, write_predictions, write_zones, PredictionRecord,
};
use crate::error::{Error, Result};
use crate::estimation::{estimate_sequence, historical_average, profile_sequence, StageTimes};
use crate::evaluation::{evaluate, measure_throughput, MonotonicClock, DEFAULT_REPETITIONS};
use crate::model::{Aabb, DroneClass, EstimateSource, Point3, Sequence, TruthSample};
use crate::synthgen::{generate_scene, ClutterBox, DronePath, SceneSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cldet",
    version,
    about = "Clustering-based UAV position estimation from LiDAR 360 and Livox Avia point clouds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate drone positions and classes for each sequence and write a
    /// prediction CSV.
    Estimate(EstimateArgs),
    /// Score a prediction CSV against ground truth (pose MSE and accuracy).
    Evaluate(EvaluateArgs),
    /// Fit the drone-class model from sequences with ground truth.
    Train(TrainArgs),
    /// Write a seeded synthetic scene (manifest, clouds, truth, zones).
    Generate(GenerateArgs),
    /// K-Means elbow analysis of one point cloud (CSV + SVG, prints the knee).
    Elbow(ElbowArgs),
    /// Measure predictions per second of the estimation loop.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct PipelineFlags {
    /// key=value settings file; flags override it, it overrides defaults.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Environment zone file (xmin,ymin,zmin,xmax,ymax,zmax per line).
    #[arg(long, value_name = "PATH")]
    pub zones: Option<PathBuf>,
    /// DBSCAN neighborhood radius in meters [default: 2.0].
    #[arg(long, value_name = "F")]
    pub eps: Option<f64>,
    /// DBSCAN core-point threshold, counting the point itself [default: 1].
    #[arg(long = "min-pts", value_name = "N")]
    pub min_pts: Option<usize>,
    /// Position used when no sensor data is usable [default: 0.734,-9.739,33.353].
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_point, allow_hyphen_values = true)]
    pub fallback: Option<Point3>,
    /// Largest accepted |frame - query| gap in nanoseconds, or `inf` [default: inf].
    #[arg(long = "tolerance-ns", value_name = "N|inf")]
    pub tolerance_ns: Option<Tolerance>,
}

impl PipelineFlags {
    fn overrides(&self) -> PipelineOverrides {
        PipelineOverrides {
            config: self.config.clone(),
            zones: self.zones.clone(),
            eps: self.eps,
            min_pts: self.min_pts,
            fallback: self.fallback,
            tolerance: self.tolerance_ns,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Sequence manifests.
    #[arg(required = true, value_name = "MANIFEST")]
    pub manifests: Vec<PathBuf>,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
    /// Class model from `cldet train`; without it every sequence gets class 0.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Use the mean truth position of these training files as the fallback.
    #[arg(long = "train-truth", value_name = "PATH", conflicts_with = "fallback")]
    pub train_truth: Vec<PathBuf>,
    /// Prediction CSV to write.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Prediction CSV from `cldet estimate`.
    #[arg(value_name = "PREDICTIONS")]
    pub predictions: PathBuf,
    /// Truth sources: a sequence manifest with a truth entry, or SEQUENCE=TRUTH_CSV.
    #[arg(required = true, value_name = "TRUTH")]
    pub truth: Vec<String>,
    /// Per-sequence CSV (sequence,mse,accuracy,n); printed to stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Sequence manifests with truth entries.
    #[arg(required = true, value_name = "MANIFEST")]
    pub manifests: Vec<PathBuf>,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
    /// Model file to write.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Sequence id (names the manifest and frame directory).
    #[arg(long, default_value = "scene")]
    pub id: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub frames: usize,
    /// Nanoseconds between frames.
    #[arg(long = "period-ns", default_value_t = 100_000_000)]
    pub period_ns: i64,
    /// hover:X,Y,Z | linear:X,Y,Z:X,Y,Z | circle:X,Y,Z:RADIUS:RAD_PER_S
    #[arg(long, default_value = "hover:0,-10,33", allow_hyphen_values = true)]
    pub path: String,
    #[arg(long = "drone-points", default_value_t = 12)]
    pub drone_points: usize,
    /// Radius of the ball drone points are drawn from, meters.
    #[arg(long = "drone-radius", default_value_t = 0.5)]
    pub drone_radius: f64,
    /// Clutter box as xmin,ymin,zmin,xmax,ymax,zmax:COUNT; repeatable.
    /// Replaces the built-in ground slab and building.
    #[arg(long, value_name = "BOX:COUNT", allow_hyphen_values = true)]
    pub clutter: Vec<String>,
    /// Generate no clutter at all.
    #[arg(long = "no-clutter", conflicts_with = "clutter")]
    pub no_clutter: bool,
    /// Fraction of Avia rows that are (0,0,0).
    #[arg(long = "avia-zero-fraction", default_value_t = 0.25)]
    pub avia_zero_fraction: f64,
    /// Drone class label (0-3).
    #[arg(long, default_value_t = 0)]
    pub class: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    #[value(name = "kmeans++")]
    KMeansPlusPlus,
    Random,
}

#[derive(Debug, Args)]
pub struct ElbowArgs {
    /// Point cloud file (x,y,z rows).
    #[arg(value_name = "CLOUD")]
    pub cloud: PathBuf,
    #[arg(long = "k-min", default_value_t = 2)]
    pub k_min: usize,
    #[arg(long = "k-max", default_value_t = 10)]
    pub k_max: usize,
    /// Fresh seeded initializations per k.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "kmeans++")]
    pub init: InitArg,
    #[arg(long = "max-iter", default_value_t = 100)]
    pub max_iter: usize,
    /// Centroid-shift convergence threshold, meters.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// k,sse CSV to write.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// SVG plot to write [default: the CSV path with an .svg extension].
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Benchmark these sequences instead of a synthetic scene.
    #[arg(long = "manifest", value_name = "PATH")]
    pub manifests: Vec<PathBuf>,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
    /// Synthetic scene frames.
    #[arg(long, default_value_t = 500)]
    pub frames: usize,
    /// Synthetic LiDAR 360 points per frame.
    #[arg(long, default_value_t = 20_000)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    pub repetitions: usize,
    /// Also write the predictions of one pass to this CSV.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USER } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| dispatch(cli.command, stdout, stderr)));
    match outcome {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USER
        }
        Err(_) => {
            let _ = writeln!(stderr, "error: internal invariant violated");
            EXIT_INTERNAL
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Estimate(a) => cmd_estimate(&a, out, err),
        Command::Evaluate(a) => cmd_evaluate(&a, out),
        Command::Train(a) => cmd_train(&a, out, err),
        Command::Generate(a) => cmd_generate(&a, out, err),
        Command::Elbow(a) => cmd_elbow(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    }
}

/// Writes `path` through a temporary sibling file that is renamed on success.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        write(&mut buf)?;
        buf.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn require_out(flag: &Option<PathBuf>, file: &Option<PathBuf>) -> Result<PathBuf> {
    flag.clone()
        .or_else(|| file.clone())
        .ok_or_else(|| Error::Config("an output path is required (--out)".into()))
}

fn load_model(path: Option<&Path>) -> Result<ClassifierModel> {
    match path {
        Some(p) => {
            let f = fs::File::open(p)
                .map_err(|e| Error::Config(format!("cannot open model {}: {e}", p.display())))?;
            ClassifierModel::read(BufReader::new(f))
        }
        None => Ok(ClassifierModel::prior_only(
            DroneClass::new(0).expect("valid class"),
        )),
    }
}

fn load_all(manifests: &[PathBuf]) -> Result<Vec<Sequence>> {
    let seqs: Vec<Sequence> = manifests
        .iter()
        .map(|m| load_sequence(m))
        .collect::<Result<_>>()?;
    let mut ids: Vec<&str> = seqs.iter().map(|s| s.id()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Config(format!("two manifests share sequence id `{}`", w[0])));
    }
    Ok(seqs)
}

pub fn cmd_estimate(a: &EstimateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut overrides = a.pipeline.overrides();
    overrides.model = a.model.clone();
    overrides.out = a.out.clone();
    let mut cfg = CliConfig::resolve(&overrides)?;
    let out_path = require_out(&a.out, &cfg.out)?;

    if !a.train_truth.is_empty() {
        let mut positions = Vec::new();
        for p in &a.train_truth {
            positions.extend(read_truth_file(p)?.iter().map(|t| t.position));
        }
        cfg.pipeline.fallback_position = historical_average(&positions)?;
    }
    let model = load_model(cfg.model.as_deref())?;
    let seqs = load_all(&a.manifests)?;

    let mut records = Vec::new();
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for seq in &seqs {
        let estimates = estimate_sequence(seq, &cfg.pipeline);
        let class = classify_trajectory(&model, &estimates);
        for e in &estimates {
            *counts.entry(e.source().tag()).or_default() += 1;
            records.push(PredictionRecord {
                sequence_id: seq.id().to_owned(),
                stamp: e.stamp(),
                position: e.position(),
                class,
                source: e.source(),
            });
        }
        if estimates.is_empty() {
            writeln!(err, "warning: sequence {} has no query timestamps", seq.id())?;
        }
    }
    write_atomic(&out_path, |w| write_predictions(&records, w))?;
    let summary: Vec<String> = counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(
        out,
        "wrote {} predictions for {} sequences to {} ({})",
        records.len(),
        seqs.len(),
        out_path.display(),
        summary.join(", ")
    )?;
    Ok(())
}

/// Truth path named by a manifest's `truth,` entry, without loading clouds.
fn manifest_truth(manifest: &Path) -> Result<Vec<TruthSample>> {
    let text = fs::read_to_string(manifest)
        .map_err(|e| Error::manifest(manifest, format!("cannot read manifest: {e}")))?;
    let base = manifest.parent().unwrap_or_else(|| Path::new(""));
    let rel = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix("truth,"))
        .next()
        .ok_or_else(|| Error::manifest(manifest, "no truth entry"))?;
    read_truth_file(&base.join(rel.trim()))
}

pub fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let f = fs::File::open(&a.predictions).map_err(|e| {
        Error::Config(format!("cannot open predictions {}: {e}", a.predictions.display()))
    })?;
    let predictions = read_predictions(BufReader::new(f))?;

    let mut truth: BTreeMap<String, Vec<TruthSample>> = BTreeMap::new();
    for spec in &a.truth {
        let (id, samples) = match spec.split_once('=') {
            Some((id, path)) => (id.to_owned(), read_truth_file(Path::new(path))?),
            None => {
                let p = Path::new(spec);
                (sequence_id_for(p), manifest_truth(p)?)
            }
        };
        if truth.insert(id.clone(), samples).is_some() {
            return Err(Error::Config(format!("truth for `{id}` given twice")));
        }
    }

    let report = evaluate(&predictions, &truth)?;
    write!(out, "{report}")?;
    let csv = report.to_csv();
    match &a.out {
        Some(p) => write_atomic(p, |w| Ok(w.write_all(csv.as_bytes())?))?,
        None => write!(out, "{csv}")?,
    }
    Ok(())
}

pub fn cmd_train(a: &TrainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut overrides = a.pipeline.overrides();
    overrides.out = a.out.clone();
    let cfg = CliConfig::resolve(&overrides)?;
    let out_path = require_out(&a.out, &cfg.out)?;
    let seqs = load_all(&a.manifests)?;

    let mut labeled = Vec::new();
    let mut positions = Vec::new();
    for seq in &seqs {
        let truth = seq
            .truth()
            .ok_or_else(|| Error::Config(format!("sequence {} has no truth", seq.id())))?;
        positions.extend(truth.iter().map(|t| t.position));
        let mut votes = [0usize; DroneClass::COUNT as usize];
        for t in truth {
            votes[t.class.label() as usize] += 1;
        }
        let label = (0..votes.len())
            .max_by_key(|&i| (votes[i], std::cmp::Reverse(i)))
            .and_then(|i| DroneClass::new(i as u8))
            .expect("four classes");
        let observed: Vec<_> = estimate_sequence(seq, &cfg.pipeline)
            .into_iter()
            .filter(|e| e.source() != EstimateSource::Fallback)
            .collect();
        if observed.len() < 2 {
            writeln!(
                err,
                "warning: sequence {} has fewer than 2 sensor estimates; skipped",
                seq.id()
            )?;
            continue;
        }
        labeled.push((extract_features(&observed)?, label));
    }
    let model = train(&labeled)?;
    write_atomic(&out_path, |w| model.write(w))?;
    let avg = historical_average(&positions)?;
    writeln!(
        out,
        "trained on {} sequences; prior class {}; training mean position {},{},{}",
        labeled.len(),
        model.prior_class(),
        avg.x,
        avg.y,
        avg.z
    )?;
    Ok(())
}

fn parse_path(s: &str) -> Result<DronePath> {
    let bad = |m: String| Error::Config(format!("--path: {m}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["hover", p] => Ok(DronePath::Hover(parse_point(p).map_err(bad)?)),
        ["linear", a, b] => Ok(DronePath::Linear {
            from: parse_point(a).map_err(bad)?,
            to: parse_point(b).map_err(bad)?,
        }),
        ["circle", c, r, w] => Ok(DronePath::Circular {
            center: parse_point(c).map_err(bad)?,
            radius: r.parse().map_err(|_| bad(format!("bad radius `{r}`")))?,
            rate: w.parse().map_err(|_| bad(format!("bad rate `{w}`")))?,
        }),
        _ => Err(bad(format!("unrecognized path `{s}`"))),
    }
}

fn parse_clutter(s: &str) -> Result<ClutterBox> {
    let bad = || Error::Config(format!("--clutter: expected xmin,ymin,zmin,xmax,ymax,zmax:COUNT, got `{s}`"));
    let (bounds, count) = s.split_once(':').ok_or_else(bad)?;
    let v: Vec<f64> = bounds
        .split(',')
        .map(|f| f.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    if v.len() != 6 {
        return Err(bad());
    }
    Ok(ClutterBox {
        region: Aabb::new(Point3::new(v[0], v[1], v[2]), Point3::new(v[3], v[4], v[5]))?,
        points: count.trim().parse().map_err(|_| bad())?,
    })
}

pub fn scene_spec_from(a: &GenerateArgs) -> Result<SceneSpec> {
    let defaults = SceneSpec::default();
    let clutter = if a.no_clutter {
        Vec::new()
    } else if a.clutter.is_empty() {
        defaults.clutter
    } else {
        a.clutter.iter().map(|c| parse_clutter(c)).collect::<Result<_>>()?
    };
    Ok(SceneSpec {
        id: a.id.clone(),
        seed: a.seed,
        n_frames: a.frames,
        frame_period: a.period_ns,
        drone_path: parse_path(&a.path)?,
        drone_points_per_frame: a.drone_points,
        drone_radius: a.drone_radius,
        clutter,
        avia_zero_noise_fraction: a.avia_zero_fraction,
        class_label: DroneClass::new(a.class)
            .ok_or_else(|| Error::Config(format!("--class {} is not in 0..=3", a.class)))?,
    })
}

pub fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let spec = scene_spec_from(a)?;
    let scene = generate_scene(&spec)?;
    if let Some(clear) = spec.clutter_clearance() {
        if clear <= spec.drone_radius {
            writeln!(
                err,
                "warning: clutter overlaps the drone path (clearance {clear:.3} m)"
            )?;
        }
    }
    fs::create_dir_all(&a.out)?;
    let manifest = save_sequence(&scene.sequence, &a.out)?;
    let zones_path = a.out.join(format!("{}.zones", spec.id));
    write_atomic(&zones_path, |w| write_zones(&scene.zones, w))?;
    writeln!(
        out,
        "wrote {} ({} frames per sensor) and {}",
        manifest.display(),
        spec.n_frames,
        zones_path.display()
    )?;
    Ok(())
}

pub fn cmd_elbow(a: &ElbowArgs, out: &mut dyn Write) -> Result<()> {
    let points = read_cloud_file(&a.cloud)?;
    let cfg = KMeansConfig {
        k: a.k_min,
        init: match a.init {
            InitArg::KMeansPlusPlus => KMeansInit::KMeansPlusPlus,
            InitArg::Random => KMeansInit::Random,
        },
        max_iter: a.max_iter,
        tol: a.tol,
        seed: a.seed,
        restarts: a.restarts,
    };
    let curve = elbow_curve(&points, a.k_min, a.k_max, &cfg)?;
    let knee = knee_point(&curve).ok();
    let svg_path = a.svg.clone().unwrap_or_else(|| a.out.with_extension("svg"));
    write_atomic(&a.out, |w| Ok(w.write_all(curve.to_csv().as_bytes())?))?;
    let plot = elbow_svg(&curve, knee);
    write_atomic(&svg_path, |w| Ok(w.write_all(plot.as_bytes())?))?;
    for (k, sse) in &curve.entries {
        writeln!(out, "k={k} sse={sse}")?;
    }
    match knee {
        Some(k) => writeln!(out, "knee: {k}")?,
        None => writeln!(out, "knee: undefined (fewer than 3 values of k)")?,
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub predictions: usize,
    pub rates: Vec<f64>,
    pub mean_rate: f64,
    pub stages: StageTimes,
    /// Estimates of one instrumented pass, in sequence order.
    pub records: Vec<PredictionRecord>,
}

/// Throughput of the estimation loop over `seqs`, plus one instrumented pass
/// for the per-stage breakdown.
pub fn bench(seqs: &[Sequence], cfg: &CliConfig, repetitions: usize) -> Result<BenchReport> {
    let tp = measure_throughput(seqs, &cfg.pipeline, &MonotonicClock::new(), repetitions)?;
    let mut stages = StageTimes::default();
    let mut records = Vec::new();
    for seq in seqs {
        for e in profile_sequence(seq, &cfg.pipeline, &mut stages) {
            records.push(PredictionRecord {
                sequence_id: seq.id().to_owned(),
                stamp: e.stamp(),
                position: e.position(),
                class: DroneClass::new(0).expect("valid class"),
                source: e.source(),
            });
        }
    }
    Ok(BenchReport {
        predictions: tp.predictions_per_repetition,
        mean_rate: tp.mean(),
        rates: tp.rates,
        stages,
        records,
    })
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    if a.repetitions == 0 {
        return Err(Error::Config("--repetitions must be at least 1".into()));
    }
    let mut cfg = CliConfig::resolve(&a.pipeline.overrides())?;
    let started = Instant::now();
    let seqs = if a.manifests.is_empty() {
        let spec = SceneSpec::benchmark(a.frames, a.points, a.seed)?;
        let scene = generate_scene(&spec)?;
        if cfg.zones_path.is_none() {
            cfg.pipeline.zone_set = scene.zones;
        }
        writeln!(
            out,
            "synthetic scene: {} frames x {} points (seed {})",
            a.frames, a.points, a.seed
        )?;
        vec![scene.sequence]
    } else {
        load_all(&a.manifests)?
    };
    let prep = started.elapsed();

    let report = bench(&seqs, &cfg, a.repetitions)?;
    writeln!(
        out,
        "{:.1} predictions/second (mean of {} repetitions, single-threaded, {} predictions each)",
        report.mean_rate,
        report.rates.len(),
        report.predictions
    )?;
    let rates: Vec<String> = report.rates.iter().map(|r| format!("{r:.1}")).collect();
    writeln!(out, "repetitions: {}", rates.join(", "))?;
    let s = &report.stages;
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
    writeln!(out, "stage breakdown over {} estimates:", s.estimates)?;
    writeln!(out, "  frame lookup   {:>10.3} ms", ms(s.lookup))?;
    writeln!(out, "  zone filter    {:>10.3} ms", ms(s.zone_filter))?;
    writeln!(out, "  dbscan         {:>10.3} ms", ms(s.clustering))?;
    writeln!(out, "  averaging      {:>10.3} ms", ms(s.averaging))?;
    writeln!(out, "setup (generation or loading): {:.3} ms", ms(prep))?;
    if let Some(p) = &a.out {
        write_atomic(p, |w| write_predictions(&report.records, w))?;
    }
    Ok(())
}
