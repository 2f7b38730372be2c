//! Per-frame observation sources and the tracking loop that consumes them.

use crate::config::TrackerConfig;
use crate::error::Result;
use crate::linker::Tracker;
use crate::mot_io::{DetectionRow, FlowField};
use crate::par::Execution;
use crate::response_map::{extract_peaks_with, LabelParams, NmsConfig, Peak};
use crate::synth::{emit_labels, perturb_flow, perturb_peaks, CorpusLayout, LabelSet, NoiseSpec, SceneTruth};

/// Everything the tracker sees of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub peaks: Vec<Peak>,
    /// Flow from the previous frame to this one.
    pub flow: FlowField,
}

/// Supplies observations frame by frame.
pub trait FrameSource {
    fn observe(&self, frame: u32) -> Result<Observation>;
}

/// Reads maps and flow from an exported corpus.
#[derive(Debug, Clone)]
pub struct CorpusSource {
    layout: CorpusLayout,
    nms: NmsConfig,
    exec: Execution,
}

impl CorpusSource {
    pub fn new(layout: CorpusLayout, nms: NmsConfig) -> Self {
        Self { layout, nms, exec: Execution::default() }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

impl FrameSource for CorpusSource {
    fn observe(&self, frame: u32) -> Result<Observation> {
        let (map, flow) = self.layout.read_frame(frame)?;
        Ok(Observation { peaks: extract_peaks_with(&map, &self.nms, self.exec), flow })
    }
}

/// Exact label maps and flow computed from a synthetic scene.
#[derive(Debug, Clone)]
pub struct OracleSource<'a> {
    truth: &'a SceneTruth,
    labels: LabelSet,
    nms: NmsConfig,
    exec: Execution,
}

impl<'a> OracleSource<'a> {
    pub fn new(truth: &'a SceneTruth, cfg: &TrackerConfig) -> Result<Self> {
        let params = LabelParams { window: cfg.window, beta: cfg.beta, vis_min: cfg.vis_min };
        Ok(Self {
            truth,
            labels: emit_labels(truth, &params, cfg.alpha)?,
            nms: cfg.nms,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }
}

impl FrameSource for OracleSource<'_> {
    fn observe(&self, frame: u32) -> Result<Observation> {
        let map = self.labels.map(frame)?.map;
        Ok(Observation {
            peaks: extract_peaks_with(&map, &self.nms, self.exec),
            flow: self.truth.flow(frame)?,
        })
    }
}

/// Oracle observations with dropped and spurious peaks and noisy flow.
#[derive(Debug, Clone)]
pub struct PerturbedSource<'a> {
    inner: OracleSource<'a>,
    noise: NoiseSpec,
    seed: u64,
}

impl<'a> PerturbedSource<'a> {
    pub fn new(inner: OracleSource<'a>, noise: NoiseSpec, seed: u64) -> Result<Self> {
        noise.validate()?;
        Ok(Self { inner, noise, seed })
    }
}

impl FrameSource for PerturbedSource<'_> {
    fn observe(&self, frame: u32) -> Result<Observation> {
        let clean = self.inner.observe(frame)?;
        let size = (self.inner.truth.width(), self.inner.truth.height());
        Ok(Observation {
            peaks: perturb_peaks(&clean.peaks, frame, &self.noise, self.seed, size, &self.inner.nms)?,
            flow: perturb_flow(&clean.flow, frame, &self.noise, self.seed)?,
        })
    }
}

/// Tracks frames `first..=last`, handing each frame's rows to `sink` as
/// soon as they exist. Returns all rows.
pub fn run_sequence<S: FrameSource + ?Sized>(
    source: &S,
    tracker: &mut Tracker,
    first: u32,
    last: u32,
    mut sink: impl FnMut(u32, &[DetectionRow]) -> Result<()>,
) -> Result<Vec<DetectionRow>> {
    let mut all = Vec::new();
    for f in first..=last {
        let obs = source.observe(f)?;
        let rows = tracker.step(f, &obs.peaks, &obs.flow)?;
        sink(f, &rows)?;
        all.extend(rows);
    }
    Ok(all)
}

/// Runs a fresh tracker over a whole synthetic scene.
pub fn track_scene<S: FrameSource + ?Sized>(source: &S, frames: u32, cfg: &TrackerConfig) -> Result<Vec<DetectionRow>> {
    let mut tracker = Tracker::new(*cfg)?;
    run_sequence(source, &mut tracker, 1, frames, |_, _| Ok(()))
}
