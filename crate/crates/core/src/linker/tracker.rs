use super::associate::{associate_frame, matching_cascade, peak_box, CascadeTrack, LinkerConfig};
use crate::config::TrackerConfig;
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::mot_io::{DetectionRow, FlowField};
use crate::motion::{aggregate_displacement, aggregate_displacement_scaled, predict_location, sample_roi, Displacement};
use crate::par::Execution;
use crate::response_map::{infer_state, Peak, PresenceHistory};

/// Confidence written for tracker output rows.
pub const OUTPUT_CONF: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    /// Matched to a peak this frame.
    Active,
    /// Unmatched, but inferred present; advanced by predicted motion.
    Coasting,
    /// Inferred absent. Kept for the matching cascade until it grows too old.
    Terminated,
}

/// State of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackState {
    pub id: u64,
    pub bbox: BBox,
    /// Observed peak presence, most recent last.
    pub history: PresenceHistory,
    /// Inferred presence.
    pub present: bool,
    pub last_match_frame: u32,
    pub status: TrackStatus,
}

impl TrackState {
    pub fn age(&self, frame: u32) -> u32 {
        frame.saturating_sub(self.last_match_frame)
    }

    pub fn is_output(&self) -> bool {
        matches!(self.status, TrackStatus::Active | TrackStatus::Coasting)
    }
}

/// On-line tracker advancing one frame at a time.
#[derive(Debug, Clone)]
pub struct Tracker {
    cfg: TrackerConfig,
    tracks: Vec<TrackState>,
    next_id: u64,
    last_frame: Option<u32>,
    exec: Execution,
}

impl Tracker {
    pub fn new(cfg: TrackerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            tracks: Vec::new(),
            next_id: 0,
            last_frame: None,
            exec: Execution::default(),
        })
    }

    /// Sets how per-track motion estimation is scheduled.
    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    /// Tracks still eligible for output or revival, in id order.
    pub fn tracks(&self) -> &[TrackState] {
        &self.tracks
    }

    /// Number of tracks ever started.
    pub fn births(&self) -> u64 {
        self.next_id
    }

    fn linker(&self) -> &LinkerConfig {
        &self.cfg.linker
    }

    /// Displacement of the flow around a box center, which is clamped into
    /// the field first.
    fn displacement_at(&self, flow: &FlowField, b: &BBox) -> Result<Displacement> {
        let x = (b.cx.round() as i64).clamp(0, i64::from(flow.width()) - 1);
        let y = (b.cy.round() as i64).clamp(0, i64::from(flow.height()) - 1);
        let patch = sample_roi(flow, x, y, self.cfg.roi_size)?;
        if self.cfg.estimate_scale {
            aggregate_displacement_scaled(&patch, b.w, b.h)
        } else {
            aggregate_displacement(&patch)
        }
    }

    /// Advances the tracker to `frame` given its peaks and the flow from the
    /// previous frame. Returns one output row per active or coasting track,
    /// sorted by id.
    pub fn step(&mut self, frame: u32, peaks: &[Peak], flow: &FlowField) -> Result<Vec<DetectionRow>> {
        if let Some(last) = self.last_frame {
            if frame <= last {
                return Err(Error::domain(format!("frame {frame} does not follow frame {last}")));
            }
        }
        self.last_frame = Some(frame);
        let cfg = *self.linker();

        // motion prediction for every track still in the pool
        let predicted: Vec<BBox> = self
            .exec
            .try_map_range(self.tracks.len(), |i| {
                let b = &self.tracks[i].bbox;
                self.displacement_at(flow, b).map(|d| predict_location(b, &d))
            })?;

        let live: Vec<usize> = (0..self.tracks.len()).filter(|&i| self.tracks[i].is_output()).collect();
        let live_prev: Vec<BBox> = live.iter().map(|&i| self.tracks[i].bbox).collect();
        let live_pred: Vec<BBox> = live.iter().map(|&i| predicted[i]).collect();
        let first = associate_frame(&live_prev, &live_pred, peaks, &cfg)?;

        let mut match_of: Vec<Option<usize>> = vec![None; self.tracks.len()];
        for &(t, p) in &first.pairs {
            match_of[live[t]] = Some(p);
        }

        let pool: Vec<usize> = (0..self.tracks.len())
            .filter(|&i| match_of[i].is_none())
            .filter(|&i| (1..=cfg.max_age).contains(&self.tracks[i].age(frame)))
            .collect();
        let cascade_tracks: Vec<CascadeTrack> = pool
            .iter()
            .map(|&i| CascadeTrack {
                age: self.tracks[i].age(frame),
                prev: self.tracks[i].bbox,
                predicted: predicted[i],
            })
            .collect();
        for (t, p) in matching_cascade(&cascade_tracks, peaks, &first.unmatched_cols, &cfg)? {
            match_of[pool[t]] = Some(p);
        }

        let mut peak_used = vec![false; peaks.len()];
        for (i, track) in self.tracks.iter_mut().enumerate() {
            let pred = predicted[i];
            match match_of[i] {
                Some(p) => {
                    peak_used[p] = true;
                    track.bbox = peak_box(&peaks[p], pred.w, pred.h);
                    track.history.push(true);
                    track.present = true;
                    track.last_match_frame = frame;
                    track.status = TrackStatus::Active;
                }
                None => {
                    let z = infer_state(&track.history, self.cfg.window, self.cfg.beta)?;
                    track.history.push(false);
                    track.bbox = pred;
                    track.present = z;
                    track.status = if z { TrackStatus::Coasting } else { TrackStatus::Terminated };
                }
            }
        }
        self.tracks.retain(|t| t.age(frame) <= cfg.max_age);

        for (p, peak) in peaks.iter().enumerate() {
            if peak_used[p] {
                continue;
            }
            let mut history = PresenceHistory::new(self.cfg.window);
            history.push(true);
            self.tracks.push(TrackState {
                id: self.next_id,
                bbox: peak_box(peak, cfg.init_w, cfg.init_h),
                history,
                present: true,
                last_match_frame: frame,
                status: TrackStatus::Active,
            });
            self.next_id += 1;
        }

        Ok(self
            .tracks
            .iter()
            .filter(|t| t.is_output())
            .map(|t| DetectionRow::from_bbox(frame, t.id as i64, &t.bbox, OUTPUT_CONF))
            .collect())
    }
}
