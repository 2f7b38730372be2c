//! Command-line front end.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use image::{GrayImage, Luma};

use crate::config::{Overrides, TrackerConfig};
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::linker::{attach_detections, Tracker};
use crate::metrics::{evaluate, EvalOptions};
use crate::mot_io::{format_mot_table, group_by_frame, parse_mot_table, parse_seqinfo, read_map, map_to_raster, DetectionRow};
use crate::par::{with_threads, Execution};
use crate::pipeline::{run_sequence, CorpusSource};
use crate::response_map::LabelParams;
use crate::synth::{emit_labels, export_scene, generate_scene, CorpusLayout, SceneSpec};

/// Environment variable naming the default corpus directory for `track`.
pub const CORPUS_ENV: &str = "RESPMOT_CORPUS";

#[derive(Debug, Parser)]
#[command(name = "respmot", version, about = "Multi-object tracking on global response maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus from a scene spec.
    Synth(SynthArgs),
    /// Track one or more corpora.
    Track(TrackArgs),
    /// Score a result file against ground truth.
    Eval(EvalArgs),
    /// Rasterize a map file or draw result boxes.
    Render(RenderArgs),
}

/// Tracker settings; each overrides the config file and built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct TuneArgs {
    /// TOML file with tracker settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Presence window length.
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub nms_kernel: Option<usize>,
    #[arg(long)]
    pub score_min: Option<f64>,
    #[arg(long)]
    pub max_peaks: Option<usize>,
    #[arg(long)]
    pub roi_size: Option<usize>,
    #[arg(long)]
    pub iou_min: Option<f64>,
    #[arg(long)]
    pub max_age: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub init_w: Option<f64>,
    #[arg(long)]
    pub init_h: Option<f64>,
    /// Estimate box size change from the flow.
    #[arg(long)]
    pub estimate_scale: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl TuneArgs {
    pub fn resolve(&self) -> Result<TrackerConfig> {
        let mut cfg = TrackerConfig::default();
        if let Some(path) = &self.config {
            cfg.apply(&Overrides::load(path)?);
        }
        cfg.apply(&Overrides {
            l: self.l,
            beta: self.beta,
            nms_kernel: self.nms_kernel,
            score_min: self.score_min,
            max_peaks: self.max_peaks,
            roi_size: self.roi_size,
            iou_min: self.iou_min,
            max_age: self.max_age,
            alpha: self.alpha,
            init_w: self.init_w,
            init_h: self.init_h,
            vis_min: None,
            estimate_scale: self.estimate_scale.then_some(true),
        });
        cfg.validate()?;
        if self.jobs == Some(0) {
            return Err(Error::config("--jobs must be >= 1"));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scene spec (TOML).
    pub spec: PathBuf,
    /// Output corpus directory.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Replace the spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub tune: TuneArgs,
}

#[derive(Debug, Args)]
pub struct TrackArgs {
    /// Corpus directory; repeat to track several sequences.
    #[arg(long, env = CORPUS_ENV, required = true, num_args = 1)]
    pub corpus: Vec<PathBuf>,
    /// Result file, or a directory when several corpora are given.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Detections to map the responses onto (single corpus only).
    #[arg(long)]
    pub dets: Option<PathBuf>,
    /// Largest center distance for mapping a response onto a detection.
    #[arg(long, default_value_t = 20.0)]
    pub gate_px: f64,
    #[command(flatten)]
    pub tune: TuneArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub gt: PathBuf,
    pub result: PathBuf,
    /// Ignore ground-truth boxes below this visibility.
    #[arg(long)]
    pub min_visibility: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Map file to rasterize.
    #[arg(long, conflicts_with_all = ["result", "seqinfo", "frame"])]
    pub map: Option<PathBuf>,
    /// Result file whose boxes are drawn.
    #[arg(long, requires_all = ["seqinfo", "frame"])]
    pub result: Option<PathBuf>,
    #[arg(long)]
    pub seqinfo: Option<PathBuf>,
    #[arg(long)]
    pub frame: Option<u32>,
    /// Output PNG.
    #[arg(long, short)]
    pub out: PathBuf,
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(e) if e.kind() != std::io::ErrorKind::NotFound => 1,
        _ => 2,
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Track(a) => cmd_track(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Render(a) => cmd_render(&a),
    }
}

/// Prints a line to stdout; a closed pipe (`respmot eval ... | head`) is not an error.
fn say(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn in_pool<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    with_threads(jobs, f).map_err(Error::Config)?
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let cfg = a.tune.resolve()?;
    let mut spec = SceneSpec::load(&a.spec).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", a.spec.display())),
        other => other,
    })?;
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let truth = generate_scene(&spec)?;
    let params = LabelParams { window: cfg.window, beta: cfg.beta, vis_min: cfg.vis_min };
    let labels = emit_labels(&truth, &params, cfg.alpha)?;
    let summary = in_pool(a.tune.jobs, || export_scene(&truth, &labels, &a.out, Execution::default()))?;
    say(&format!(
        "synth: {} objects, {} frames, {} files -> {}",
        summary.objects,
        summary.frames,
        summary.files,
        a.out.display()
    ))
}

/// Tracks one corpus, writing and flushing rows frame by frame.
fn track_corpus(root: &Path, out: &Path, cfg: &TrackerConfig, dets: Option<(&[DetectionRow], f64)>) -> Result<usize> {
    let layout = CorpusLayout::new(root);
    let info = layout.read_seqinfo()?;
    let by_frame = dets.map(|(rows, gate)| (group_by_frame(rows), gate));
    let source = CorpusSource::new(layout, cfg.nms);
    let mut tracker = Tracker::new(*cfg)?;
    let mut w = BufWriter::new(File::create(out)?);
    let mut count = 0;
    let result = run_sequence(&source, &mut tracker, 1, info.seq_length, |f, rows| {
        let mut rows = rows.to_vec();
        if let Some((frames, gate)) = &by_frame {
            let frame_dets: Vec<BBox> = frames.get(&f).map_or_else(Vec::new, |d| d.iter().map(DetectionRow::bbox).collect());
            let responses: Vec<BBox> = rows.iter().map(DetectionRow::bbox).collect();
            for (r, d) in attach_detections(&responses, &frame_dets, *gate)?.pairs {
                let id = rows[r].id;
                rows[r] = DetectionRow::from_bbox(f, id, &frame_dets[d], rows[r].conf);
            }
        }
        count += rows.len();
        w.write_all(format_mot_table(&rows)?.as_bytes())?;
        w.flush()?;
        Ok(())
    });
    w.flush()?;
    result.map(|_| count)
}

fn cmd_track(a: &TrackArgs) -> Result<()> {
    let cfg = a.tune.resolve()?;
    if !(a.gate_px > 0.0) {
        return Err(Error::config("--gate-px must be positive"));
    }
    let dets = match &a.dets {
        Some(path) => {
            if a.corpus.len() > 1 {
                return Err(Error::config("--dets needs exactly one --corpus"));
            }
            Some(parse_mot_table(BufReader::new(File::open(path)?))?.rows)
        }
        None => None,
    };
    let dets = dets.as_deref().map(|d| (d, a.gate_px));
    if a.corpus.len() == 1 {
        let n = track_corpus(&a.corpus[0], &a.out, &cfg, dets)?;
        return say(&format!("track: {n} rows -> {}", a.out.display()));
    }
    fs::create_dir_all(&a.out)?;
    let jobs: Vec<(PathBuf, PathBuf)> = a
        .corpus
        .iter()
        .map(|root| {
            let name = CorpusLayout::new(root).read_seqinfo()?.name;
            Ok((root.clone(), a.out.join(format!("{name}.txt"))))
        })
        .collect::<Result<_>>()?;
    let mut names: Vec<&PathBuf> = jobs.iter().map(|j| &j.1).collect();
    names.sort();
    names.dedup();
    if names.len() != jobs.len() {
        return Err(Error::config("corpora must have distinct sequence names"));
    }
    let counts = in_pool(a.tune.jobs, || {
        Execution::default()
            .map_slice(&jobs, |(root, out)| track_corpus(root, out, &cfg, None))
            .into_iter()
            .collect::<Result<Vec<_>>>()
    })?;
    for ((_, out), n) in jobs.iter().zip(counts) {
        say(&format!("track: {n} rows -> {}", out.display()))?;
    }
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let opts = EvalOptions { min_visibility: a.min_visibility, ..EvalOptions::default() };
    let report = evaluate(&a.gt, &a.result, &opts)?;
    say(&format!("{}\n{report}", report.key_values()))
}

/// Gray level used to draw a track id; never black.
pub fn id_gray(id: i64) -> u8 {
    (64 + id.rem_euclid(192)) as u8
}

fn draw_outline(img: &mut GrayImage, b: &BBox, value: u8) {
    let (w, h) = (i64::from(img.width()), i64::from(img.height()));
    let l = b.left().round() as i64;
    let t = b.top().round() as i64;
    let r = b.right().round() as i64 - 1;
    let btm = b.bottom().round() as i64 - 1;
    let mut put = |x: i64, y: i64| {
        if (0..w).contains(&x) && (0..h).contains(&y) {
            img.put_pixel(x as u32, y as u32, Luma([value]));
        }
    };
    for x in l..=r {
        put(x, t);
        put(x, btm);
    }
    for y in t..=btm {
        put(l, y);
        put(r, y);
    }
}

fn save_png(img: &GrayImage, out: &Path) -> Result<()> {
    img.save_with_format(out, image::ImageFormat::Png)
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

fn cmd_render(a: &RenderArgs) -> Result<()> {
    if let Some(map) = &a.map {
        save_png(&map_to_raster(&read_map(map)?), &a.out)?;
    } else if let (Some(result), Some(seqinfo), Some(frame)) = (&a.result, &a.seqinfo, a.frame) {
        let info = parse_seqinfo(BufReader::new(File::open(seqinfo)?))?;
        let rows = parse_mot_table(BufReader::new(File::open(result)?))?.rows;
        let mut img = GrayImage::new(info.im_width, info.im_height);
        for r in rows.iter().filter(|r| r.frame == frame) {
            draw_outline(&mut img, &r.bbox(), id_gray(r.id));
        }
        save_png(&img, &a.out)?;
    } else {
        return Err(Error::config("render needs --map, or --result with --seqinfo and --frame"));
    }
    say(&format!("render: {}", a.out.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(&path, "l = 9\nbeta = 0.8\n").unwrap();
        let tune = TuneArgs { config: Some(path), beta: Some(0.5), ..TuneArgs::default() };
        let cfg = tune.resolve().unwrap();
        assert_eq!(cfg.window, 9);
        assert_eq!(cfg.beta, 0.5);
        assert_eq!(cfg.linker.max_age, 30);
    }

    #[test]
    fn bad_flag_value_is_config_error() {
        let tune = TuneArgs { nms_kernel: Some(2), ..TuneArgs::default() };
        assert_eq!(exit_code(&tune.resolve().unwrap_err()), 2);
    }

    #[test]
    fn gray_levels_are_visible() {
        for id in -5..500 {
            assert!(id_gray(id) >= 64);
        }
        assert_ne!(id_gray(0), id_gray(1));
    }
}
