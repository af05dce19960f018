//! The `gramtraj` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gramtraj::classify::{
    cross_validate, fit, CSelection, ClassifierSpec, ModelArchive, PipelineConfig, ResampleMode,
};
use gramtraj::data::{
    load_sequences, synth_generate, write_csv, write_jsonl, SequenceFormat, SequenceRecord,
    SynthSpec,
};
use gramtraj::geometry::{
    closeness, default_epsilon, flat_distance, point_from_landmarks, regularized_spd_distance,
    PsdPoint, DEFAULT_K,
};
use gramtraj::trajectory::{
    dtw_align_with, resample, Alignment, FrameMetric, ResampleThresholds, Trajectory,
    TrajectoryMetric,
};
use gramtraj::Error;
use nalgebra::MatrixXx2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "gramtraj",
    version,
    about = "Shape trajectories of planar landmarks on S⁺(2,n)"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceKind {
    Closeness,
    Flat,
    SpdReg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierKind {
    Ppfsvm,
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Machine,
}

fn parse_c(s: &str) -> Result<CSelection, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(CSelection::Auto);
    }
    match s.parse::<f64>() {
        Ok(c) if c > 0.0 && c.is_finite() => Ok(CSelection::Fixed(c)),
        _ => Err(format!("expected a positive number or `auto`, got `{s}`")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Weight of the covariance term in the closeness.
    #[arg(long, global = true, default_value_t = DEFAULT_K)]
    pub k: f64,
    /// Drop frames closer than this to the previous kept frame.
    #[arg(long, global = true, requires = "zeta2")]
    pub zeta1: Option<f64>,
    /// Fill gaps wider than this with pseudo-geodesic samples.
    #[arg(long, global = true, requires = "zeta1")]
    pub zeta2: Option<f64>,
    /// Derive ζ₁, ζ₂ from the training data (the default).
    #[arg(long, global = true, conflicts_with_all = ["zeta1", "zeta2"])]
    pub auto_zeta: bool,
    #[arg(long, global = true, value_enum, default_value_t = DistanceKind::Closeness)]
    pub distance: DistanceKind,
    /// Regularization of spd-reg; chosen per pair when absent.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = ClassifierKind::Ppfsvm)]
    pub classifier: ClassifierKind,
    /// Neighbors of the k-NN classifier.
    #[arg(long = "K", global = true, default_value_t = 1)]
    pub neighbors: usize,
    /// SVM regularization, or `auto` for inner cross-validation.
    #[arg(long = "C", global = true, default_value = "1", value_parser = parse_c)]
    pub c: CSelection,
    #[arg(long, global = true, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Compare frames index by index after uniform resampling to a common length.
    #[arg(long, global = true)]
    pub no_dtw: bool,
    /// Skip adaptive re-sampling.
    #[arg(long, global = true, conflicts_with_all = ["zeta1", "zeta2", "auto_zeta"])]
    pub no_resample: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dissimilarity of two sequences, or of two frames given as ID@FRAME.
    Dist {
        input: PathBuf,
        a: String,
        b: String,
        /// Look `b` up in this file instead of INPUT.
        #[arg(long)]
        with: Option<PathBuf>,
    },
    /// Optimal warping path between two sequences.
    Align {
        input: PathBuf,
        a: String,
        b: String,
        #[arg(long)]
        with: Option<PathBuf>,
    },
    /// Adaptively re-sample every sequence.
    Resample {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Train a classifier and write the model archive.
    Train {
        input: PathBuf,
        #[arg(short, long)]
        model: PathBuf,
    },
    /// Label sequences with a trained model.
    Predict {
        #[arg(short, long)]
        model: PathBuf,
        input: PathBuf,
    },
    /// Stratified cross-validation report.
    Eval { input: PathBuf },
    /// Write a synthetic labeled data set.
    Synth {
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        classes: Option<usize>,
        #[arg(long)]
        per_class: Option<usize>,
        #[arg(long)]
        landmarks: Option<usize>,
        #[arg(long)]
        min_frames: Option<usize>,
        #[arg(long)]
        max_frames: Option<usize>,
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long)]
        rate_warp: Option<f64>,
        #[arg(long)]
        no_rigid: bool,
        /// No rigid motion, time warp or noise.
        #[arg(long)]
        clean: bool,
    },
    /// Time the frame distances on random configurations.
    Bench {
        #[arg(long, default_value_t = 68)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
    },
    /// Convert between JSON-lines and CSV, chosen by file extension.
    Convert { input: PathBuf, output: PathBuf },
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) => EXIT_USAGE,
        Error::Numeric(_) | Error::NotPositiveDefinite(_) | Error::NotHorizontal(_) => EXIT_NUMERIC,
        _ => EXIT_DATA,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

type Outcome = Result<String, Failure>;

/// Nine significant digits; zero prints as `0.000000000`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..9).contains(&exp) {
        format!("{x:.*}", (8 - exp).max(0) as usize)
    } else {
        sci
    }
}

impl GlobalOpts {
    pub fn frame_metric(&self) -> Result<FrameMetric, Failure> {
        if self.epsilon.is_some() && self.distance != DistanceKind::SpdReg {
            return Err(Failure::usage(
                "--epsilon applies only to --distance spd-reg",
            ));
        }
        let metric = match self.distance {
            DistanceKind::Closeness => FrameMetric::Closeness { k: self.k },
            DistanceKind::Flat => FrameMetric::Flat,
            DistanceKind::SpdReg => FrameMetric::SpdRegularized {
                epsilon: self.epsilon,
            },
        };
        metric.validate()?;
        Ok(metric)
    }

    pub fn metric(&self) -> Result<TrajectoryMetric, Failure> {
        Ok(TrajectoryMetric {
            frame: self.frame_metric()?,
            alignment: if self.no_dtw {
                Alignment::Lockstep
            } else {
                Alignment::Dtw
            },
        })
    }

    pub fn resample_mode(&self) -> ResampleMode {
        match (self.no_resample, self.zeta1, self.zeta2) {
            (true, _, _) => ResampleMode::Off,
            (false, Some(zeta1), Some(zeta2)) => ResampleMode::Fixed { zeta1, zeta2 },
            _ => ResampleMode::Auto,
        }
    }

    pub fn pipeline(&self) -> Result<PipelineConfig, Failure> {
        let classifier = match self.classifier {
            ClassifierKind::Ppfsvm => ClassifierSpec::PpfSvm { c: self.c },
            ClassifierKind::Knn => ClassifierSpec::Knn {
                neighbors: self.neighbors,
            },
        };
        classifier.validate()?;
        if let ResampleMode::Fixed { zeta1, zeta2 } = self.resample_mode() {
            ResampleThresholds::new(zeta1, zeta2)?;
        }
        Ok(PipelineConfig {
            k: self.k,
            metric: self.metric()?,
            resample: self.resample_mode(),
            classifier,
            seed: self.seed,
        })
    }
}

/// Parses `args`, runs the command, prints its output and returns the
/// exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if cli.opts.threads > 0 {
        // Fails only if a pool already exists, which then keeps its size.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.opts.threads)
            .build_global();
    }
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            let _ = stdout.flush();
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let o = &cli.opts;
    match &cli.command {
        Command::Dist { input, a, b, with } => cmd_dist(o, input, a, b, with.as_deref()),
        Command::Align { input, a, b, with } => cmd_align(o, input, a, b, with.as_deref()),
        Command::Resample { input, output } => cmd_resample(o, input, output),
        Command::Train { input, model } => cmd_train(o, input, model),
        Command::Predict { model, input } => cmd_predict(o, model, input),
        Command::Eval { input } => cmd_eval(o, input),
        Command::Synth {
            output,
            classes,
            per_class,
            landmarks,
            min_frames,
            max_frames,
            noise,
            rate_warp,
            no_rigid,
            clean,
        } => {
            let d = SynthSpec::default();
            let mut spec = SynthSpec {
                classes: classes.unwrap_or(d.classes),
                per_class: per_class.unwrap_or(d.per_class),
                landmarks: landmarks.unwrap_or(d.landmarks),
                min_frames: min_frames.unwrap_or(d.min_frames),
                max_frames: max_frames.unwrap_or(d.max_frames),
                noise: noise.unwrap_or(d.noise),
                rate_warp: rate_warp.unwrap_or(d.rate_warp),
                rigid: !no_rigid,
                seed: o.seed,
                ..d
            };
            if *clean {
                spec = spec.clean();
            }
            cmd_synth(o, &spec, output)
        }
        Command::Bench { n, pairs } => cmd_bench(o, *n, *pairs),
        Command::Convert { input, output } => cmd_convert(input, output),
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::data(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn load(path: &Path) -> Result<Vec<SequenceRecord>, Failure> {
    let outcome = load_sequences(path, None)
        .map_err(|e| Failure::from(e).prefixed(&path.display().to_string()))?;
    for s in &outcome.skipped {
        eprintln!(
            "warning: {}: skipped line {}{}: {}",
            path.display(),
            s.line,
            s.id.as_deref()
                .map(|id| format!(" ({id})"))
                .unwrap_or_default(),
            s.error
        );
    }
    if outcome.records.is_empty() {
        return Err(Failure::data(format!(
            "{}: no valid sequences",
            path.display()
        )));
    }
    Ok(outcome.records)
}

fn trajectories(records: &[SequenceRecord]) -> Result<Vec<Trajectory>, Failure> {
    records
        .iter()
        .map(|r| {
            r.to_trajectory()
                .map_err(|e| Failure::from(e).prefixed(&format!("sequence `{}`", r.id())))
        })
        .collect()
}

impl Failure {
    fn prefixed(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

fn encode(records: &[SequenceRecord], path: &Path) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    match SequenceFormat::from_path(path) {
        SequenceFormat::Jsonl => write_jsonl(records, &mut buf)?,
        SequenceFormat::Csv => write_csv(records, &mut buf)?,
    }
    Ok(buf)
}

/// `ID` or `ID@FRAME`; an id containing `@` wins over the split form.
fn lookup<'a>(
    records: &'a [SequenceRecord],
    key: &str,
) -> Result<(&'a SequenceRecord, Option<usize>), Failure> {
    if let Some(r) = records.iter().find(|r| r.id() == key) {
        return Ok((r, None));
    }
    if let Some((id, frame)) = key.rsplit_once('@') {
        let frame: usize = frame
            .parse()
            .map_err(|_| Failure::usage(format!("bad frame index in `{key}`")))?;
        if let Some(r) = records.iter().find(|r| r.id() == id) {
            if frame >= r.frames().len() {
                return Err(Failure::data(format!(
                    "sequence `{id}` has {} frames, no frame {frame}",
                    r.frames().len()
                )));
            }
            return Ok((r, Some(frame)));
        }
    }
    Err(Failure::data(format!("no sequence `{key}`")))
}

fn pair_sources(
    input: &Path,
    with: Option<&Path>,
) -> Result<(Vec<SequenceRecord>, Vec<SequenceRecord>), Failure> {
    let first = load(input)?;
    let second = match with {
        Some(p) => load(p)?,
        None => first.clone(),
    };
    Ok((first, second))
}

fn frame_point(r: &SequenceRecord, i: usize) -> Result<PsdPoint, Failure> {
    point_from_landmarks(&r.frames()[i])
        .map_err(|e| Failure::data(format!("frame {i} of `{}`: {e}", r.id())))
}

fn cmd_dist(o: &GlobalOpts, input: &Path, a: &str, b: &str, with: Option<&Path>) -> Outcome {
    let (left, right) = pair_sources(input, with)?;
    let (ra, fa) = lookup(&left, a)?;
    let (rb, fb) = lookup(&right, b)?;
    let (value, kind) = match (fa, fb) {
        (Some(i), Some(j)) => {
            let metric = o.frame_metric()?;
            (
                metric.cost(&frame_point(ra, i)?, &frame_point(rb, j)?)?,
                "frame",
            )
        }
        (None, None) => {
            let metric = o.metric()?;
            let (ta, tb) = (ra.to_trajectory()?, rb.to_trajectory()?);
            (metric.distance(&ta, &tb)?, "sequence")
        }
        _ => {
            return Err(Failure::usage(
                "compare two frames (ID@FRAME) or two sequences (ID)",
            ))
        }
    };
    Ok(match o.format {
        OutputFormat::Text => format!("{}\n", sig9(value)),
        OutputFormat::Machine => format!(
            "{}\n",
            json!({ "kind": kind, "a": a, "b": b, "distance": value })
        ),
    })
}

fn cmd_align(o: &GlobalOpts, input: &Path, a: &str, b: &str, with: Option<&Path>) -> Outcome {
    let (left, right) = pair_sources(input, with)?;
    let (ra, fa) = lookup(&left, a)?;
    let (rb, fb) = lookup(&right, b)?;
    if fa.is_some() || fb.is_some() {
        return Err(Failure::usage("align takes two sequence ids"));
    }
    let frame = o.frame_metric()?;
    let (ta, tb) = (ra.to_trajectory()?, rb.to_trajectory()?);
    let path = dtw_align_with(ta.points(), tb.points(), |p, q| frame.cost(p, q))?;
    Ok(match o.format {
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "total {}", sig9(path.total_cost));
            let _ = writeln!(s, "normalized {}", sig9(path.normalized_cost));
            let _ = writeln!(s, "steps {}", path.steps.len());
            for (i, j) in &path.steps {
                let _ = writeln!(s, "{i} {j}");
            }
            s
        }
        OutputFormat::Machine => format!(
            "{}\n",
            serde_json::to_string(&path).expect("path serializes")
        ),
    })
}

fn cmd_resample(o: &GlobalOpts, input: &Path, output: &Path) -> Outcome {
    if o.no_resample {
        return Err(Failure::usage("--no-resample makes resample a no-op"));
    }
    let records = load(input)?;
    let set = trajectories(&records)?;
    let thresholds = match o.resample_mode() {
        ResampleMode::Fixed { zeta1, zeta2 } => ResampleThresholds::new(zeta1, zeta2)?,
        _ => ResampleThresholds::auto(&set, o.k)?,
    };
    let mut out = Vec::with_capacity(set.len());
    let mut lines = String::new();
    for (r, t) in records.iter().zip(&set) {
        let re = resample(t, thresholds, o.k)?;
        let frames: Vec<MatrixXx2<f64>> = re.points().iter().map(PsdPoint::to_landmarks).collect();
        let _ = writeln!(lines, "{} {} -> {}", r.id(), t.len(), re.len());
        out.push(SequenceRecord::new(
            r.id().into(),
            r.label().map(Into::into),
            frames,
        )?);
    }
    write_atomic(output, &encode(&out, output)?)?;
    Ok(match o.format {
        OutputFormat::Text => format!(
            "zeta1 {} zeta2 {}\n{lines}",
            sig9(thresholds.zeta1),
            sig9(thresholds.zeta2)
        ),
        OutputFormat::Machine => format!(
            "{}\n",
            json!({ "zeta1": thresholds.zeta1, "zeta2": thresholds.zeta2, "sequences": out.len() })
        ),
    })
}

fn describe(config: &PipelineConfig) -> String {
    let classifier = match config.classifier {
        ClassifierSpec::PpfSvm {
            c: CSelection::Fixed(c),
        } => format!("ppfsvm C={c}"),
        ClassifierSpec::PpfSvm {
            c: CSelection::Auto,
        } => "ppfsvm C=auto".into(),
        ClassifierSpec::Knn { neighbors } => format!("knn K={neighbors}"),
    };
    let distance = match config.metric.frame {
        FrameMetric::Closeness { k } => format!("closeness k={k}"),
        FrameMetric::Flat => "flat".into(),
        FrameMetric::SpdRegularized { epsilon: Some(e) } => format!("spd-reg epsilon={e}"),
        FrameMetric::SpdRegularized { epsilon: None } => "spd-reg epsilon=auto".into(),
    };
    let alignment = match config.metric.alignment {
        Alignment::Dtw => "dtw",
        Alignment::Lockstep => "lockstep",
    };
    let resampling = match config.resample {
        ResampleMode::Off => "off".into(),
        ResampleMode::Fixed { zeta1, zeta2 } => format!("zeta1={zeta1} zeta2={zeta2}"),
        ResampleMode::Auto => "auto".into(),
    };
    format!(
        "classifier {classifier}\ndistance {distance}\nalignment {alignment}\nresample {resampling} (k={})\nseed {}\n",
        config.k, config.seed
    )
}

fn thresholds_text(t: &Option<ResampleThresholds>) -> String {
    match t {
        Some(t) => format!("zeta1 {} zeta2 {}", sig9(t.zeta1), sig9(t.zeta2)),
        None => "off".into(),
    }
}

fn cmd_train(o: &GlobalOpts, input: &Path, model_path: &Path) -> Outcome {
    let config = o.pipeline()?;
    let set = trajectories(&load(input)?)?;
    let model = fit(&set, &config)?;
    write_atomic(model_path, model.to_json().as_bytes())?;
    let c = match &model.classifier {
        gramtraj::classify::Classifier::PpfSvm(m) => Some(m.c),
        gramtraj::classify::Classifier::Knn(_) => None,
    };
    Ok(match o.format {
        OutputFormat::Text => {
            let mut s = describe(&config);
            let _ = writeln!(s, "classes {}", model.classes().join(" "));
            let _ = writeln!(s, "references {}", set.len());
            let _ = writeln!(s, "thresholds {}", thresholds_text(&model.thresholds));
            if let Some(c) = c {
                let _ = writeln!(s, "C {c}");
            }
            let _ = writeln!(s, "model {}", model_path.display());
            s
        }
        OutputFormat::Machine => format!(
            "{}\n",
            json!({
                "config": config,
                "classes": model.classes(),
                "references": set.len(),
                "thresholds": model.thresholds,
                "c": c,
                "model": model_path.display().to_string(),
            })
        ),
    })
}

fn cmd_predict(o: &GlobalOpts, model_path: &Path, input: &Path) -> Outcome {
    let text = std::fs::read_to_string(model_path)
        .map_err(|e| Failure::data(format!("cannot read {}: {e}", model_path.display())))?;
    let model = ModelArchive::from_json(&text)
        .map_err(|e| Failure::from(e).prefixed(&model_path.display().to_string()))?;
    let records = load(input)?;
    let set = trajectories(&records)?;
    let predictions = model.predict_many(&set)?;
    let mut s = String::new();
    match o.format {
        OutputFormat::Text => {
            let _ = writeln!(s, "id label {}", model.classes().join(" "));
            for (r, p) in records.iter().zip(&predictions) {
                let scores: Vec<String> = p.scores.iter().map(|&v| sig9(v)).collect();
                let _ = writeln!(s, "{} {} {}", r.id(), p.label, scores.join(" "));
            }
        }
        OutputFormat::Machine => {
            for (r, p) in records.iter().zip(&predictions) {
                let _ = writeln!(
                    s,
                    "{}",
                    json!({ "id": r.id(), "label": p.label, "scores": p.scores })
                );
            }
        }
    }
    Ok(s)
}

fn cmd_eval(o: &GlobalOpts, input: &Path) -> Outcome {
    let config = o.pipeline()?;
    let set = trajectories(&load(input)?)?;
    let cv = cross_validate(&set, o.folds, &config)?;
    Ok(match o.format {
        OutputFormat::Text => {
            let mut s = describe(&config);
            let _ = writeln!(s, "sequences {}", set.len());
            s.push_str(&cv.report.to_text());
            for (f, (t, c)) in cv.thresholds.iter().zip(&cv.chosen_c).enumerate() {
                let _ = write!(s, "fold {f}: thresholds {}", thresholds_text(t));
                if let Some(c) = c {
                    let _ = write!(s, ", C {c}");
                }
                s.push('\n');
            }
            s
        }
        OutputFormat::Machine => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({ "config": config, "folds": o.folds, "cv": cv }))
                .expect("report serializes")
        ),
    })
}

fn cmd_synth(o: &GlobalOpts, spec: &SynthSpec, output: &Path) -> Outcome {
    let records = synth_generate(spec)?;
    write_atomic(output, &encode(&records, output)?)?;
    Ok(match o.format {
        OutputFormat::Text => format!(
            "wrote {} sequences to {}\n",
            records.len(),
            output.display()
        ),
        OutputFormat::Machine => {
            format!("{}\n", json!({ "spec": spec, "sequences": records.len() }))
        }
    })
}

fn random_points(n: usize, count: usize, seed: u64) -> Result<Vec<PsdPoint>, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = MatrixXx2::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        if let Ok(p) = point_from_landmarks(&z) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Mean seconds per pair of `f` over all consecutive pairs.
fn time_pairs(
    points: &[PsdPoint],
    mut f: impl FnMut(&PsdPoint, &PsdPoint) -> gramtraj::Result<f64>,
) -> Result<f64, Failure> {
    let pairs = points.len() / 2;
    let start = Instant::now();
    let mut sink = 0.0;
    for p in points.chunks_exact(2) {
        sink += f(&p[0], &p[1])?;
    }
    std::hint::black_box(sink);
    Ok(start.elapsed().as_secs_f64() / pairs as f64)
}

pub struct BenchTimes {
    pub closeness: f64,
    pub flat: f64,
    pub spd_reg: f64,
}

/// Mean per-pair seconds of the three frame distances over `pairs` random
/// pairs of `n` landmarks.
pub fn bench_times(
    n: usize,
    pairs: usize,
    k: f64,
    epsilon: Option<f64>,
    seed: u64,
) -> Result<BenchTimes, Failure> {
    if n < 3 || pairs == 0 {
        return Err(Failure::usage("bench needs n ≥ 3 and at least one pair"));
    }
    let points = random_points(n, 2 * pairs, seed)?;
    // Warm caches and the allocator once before timing.
    let warm = &points[..2 * pairs.min(20)];
    time_pairs(warm, |a, b| closeness(a, b, k))?;
    let closeness_t = time_pairs(&points, |a, b| closeness(a, b, k))?;
    let flat_t = time_pairs(&points, flat_distance)?;
    let spd_t = time_pairs(&points, |a, b| {
        regularized_spd_distance(a, b, epsilon.unwrap_or_else(|| default_epsilon(a, b)))
    })?;
    Ok(BenchTimes {
        closeness: closeness_t,
        flat: flat_t,
        spd_reg: spd_t,
    })
}

fn cmd_bench(o: &GlobalOpts, n: usize, pairs: usize) -> Outcome {
    let t = bench_times(n, pairs, o.k, o.epsilon, o.seed)?;
    let ratio = t.spd_reg / t.closeness;
    Ok(match o.format {
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "n {n}, {pairs} pairs, mean time per pair");
            let _ = writeln!(s, "{:<10} {:>14}", "distance", "microseconds");
            for (name, v) in [
                ("closeness", t.closeness),
                ("flat", t.flat),
                ("spd-reg", t.spd_reg),
            ] {
                let _ = writeln!(s, "{name:<10} {:>14.3}", v * 1e6);
            }
            let _ = writeln!(s, "spd-reg / closeness {ratio:.2}");
            let _ = writeln!(s, "closeness / flat {:.2}", t.closeness / t.flat);
            s
        }
        OutputFormat::Machine => format!(
            "{}\n",
            json!({
                "n": n,
                "pairs": pairs,
                "seconds_per_pair": { "closeness": t.closeness, "flat": t.flat, "spd_reg": t.spd_reg },
                "spd_reg_over_closeness": ratio,
            })
        ),
    })
}

fn cmd_convert(input: &Path, output: &Path) -> Outcome {
    let records = load(input)?;
    write_atomic(output, &encode(&records, output)?)?;
    Ok(format!(
        "wrote {} sequences to {}\n",
        records.len(),
        output.display()
    ))
}
