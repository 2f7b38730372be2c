use super::hungarian::{hungarian, Assignment, CostMatrix, FORBIDDEN};
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::response_map::Peak;

/// Data-linking parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkerConfig {
    /// Pairs need IOU strictly above this.
    pub iou_min: f64,
    /// Frames a track may stay unmatched and still be revived.
    pub max_age: u32,
    /// Size given to tracks born from a bare peak.
    pub init_w: f64,
    pub init_h: f64,
}

impl Default for LinkerConfig {
    fn default() -> Self {
        Self {
            iou_min: 0.7,
            max_age: 30,
            init_w: 40.0,
            init_h: 100.0,
        }
    }
}

impl LinkerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.iou_min > 0.0 && self.iou_min < 1.0) {
            return Err(Error::config(format!("iou_min must lie in (0,1), got {}", self.iou_min)));
        }
        if self.max_age < 1 {
            return Err(Error::config("max_age must be >= 1"));
        }
        if !(self.init_w > 0.0 && self.init_h > 0.0) {
            return Err(Error::config("initial box size must be positive"));
        }
        Ok(())
    }
}

/// Box of the given size centered on a peak.
pub fn peak_box(peak: &Peak, w: f64, h: f64) -> BBox {
    BBox::new(f64::from(peak.x), f64::from(peak.y), w, h)
}

fn peak_distance(b: &BBox, p: &Peak) -> f64 {
    (b.cx - f64::from(p.x)).hypot(b.cy - f64::from(p.y))
}

/// Gated IOU assignment between tracks and a subset of peaks.
///
/// The cost of pairing track `i` with peak `j` is `1 - IOU(prev[i], box_j)`
/// where `box_j` is the peak carrying track `i`'s predicted size. Pairs at
/// or below `iou_min` are forbidden. Returned pairs hold `(track, peak)`
/// indices into the full lists.
fn gated_assignment(
    tracks: &[usize],
    prev: &[BBox],
    predicted: &[BBox],
    peak_ids: &[usize],
    peaks: &[Peak],
    iou_min: f64,
) -> Result<Vec<(usize, usize)>> {
    let cost = CostMatrix::from_fn(tracks.len(), peak_ids.len(), |r, c| {
        let t = tracks[r];
        let candidate = peak_box(&peaks[peak_ids[c]], predicted[t].w, predicted[t].h);
        let iou = prev[t].iou_unchecked(&candidate);
        if iou > iou_min {
            1.0 - iou
        } else {
            FORBIDDEN
        }
    });
    let a = hungarian(&cost)?;
    Ok(a.pairs.into_iter().map(|(r, c)| (tracks[r], peak_ids[c])).collect())
}

/// Two-stage association of live tracks with this frame's peaks.
///
/// Stage one tests each track's nearest peak (by center distance to the
/// predicted box) and keeps it as a candidate when its IOU with the
/// prediction exceeds `iou_min`. Stage two solves a gated assignment
/// between all tracks and the candidates, comparing each track's previous
/// box with the candidate boxes.
pub fn associate_frame(prev: &[BBox], predicted: &[BBox], peaks: &[Peak], cfg: &LinkerConfig) -> Result<Assignment> {
    if prev.len() != predicted.len() {
        return Err(Error::domain("previous and predicted box lists differ in length"));
    }
    let mut is_candidate = vec![false; peaks.len()];
    for pred in predicted {
        let nearest = peaks
            .iter()
            .enumerate()
            .min_by(|a, b| peak_distance(pred, a.1).total_cmp(&peak_distance(pred, b.1)));
        if let Some((j, p)) = nearest {
            if pred.iou_unchecked(&peak_box(p, pred.w, pred.h)) > cfg.iou_min {
                is_candidate[j] = true;
            }
        }
    }
    let candidates: Vec<usize> = (0..peaks.len()).filter(|&j| is_candidate[j]).collect();
    let tracks: Vec<usize> = (0..prev.len()).collect();
    let pairs = gated_assignment(&tracks, prev, predicted, &candidates, peaks, cfg.iou_min)?;

    let mut track_used = vec![false; prev.len()];
    let mut peak_used = vec![false; peaks.len()];
    for &(t, p) in &pairs {
        track_used[t] = true;
        peak_used[p] = true;
    }
    Ok(Assignment {
        pairs,
        unmatched_rows: (0..prev.len()).filter(|&t| !track_used[t]).collect(),
        unmatched_cols: (0..peaks.len()).filter(|&p| !peak_used[p]).collect(),
    })
}

/// A track offered to the matching cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeTrack {
    /// Frames since the track's last match.
    pub age: u32,
    /// Box at the previous frame (coasted if unmatched).
    pub prev: BBox,
    /// Box predicted for this frame.
    pub predicted: BBox,
}

/// Age-ordered re-matching of leftover peaks against unmatched tracks.
///
/// For each age from 1 to `max_age`, runs the same gated assignment as
/// [`associate_frame`]'s second stage between the still-unmatched peaks and
/// the tracks of exactly that age. Returns `(track, peak)` index pairs.
pub fn matching_cascade(
    tracks: &[CascadeTrack],
    peaks: &[Peak],
    unmatched_peaks: &[usize],
    cfg: &LinkerConfig,
) -> Result<Vec<(usize, usize)>> {
    let prev: Vec<BBox> = tracks.iter().map(|t| t.prev).collect();
    let predicted: Vec<BBox> = tracks.iter().map(|t| t.predicted).collect();
    let mut free: Vec<usize> = unmatched_peaks.to_vec();
    let mut out = Vec::new();
    for age in 1..=cfg.max_age {
        if free.is_empty() {
            break;
        }
        let of_age: Vec<usize> = (0..tracks.len()).filter(|&i| tracks[i].age == age).collect();
        if of_age.is_empty() {
            continue;
        }
        let pairs = gated_assignment(&of_age, &prev, &predicted, &free, peaks, cfg.iou_min)?;
        free.retain(|p| !pairs.iter().any(|&(_, q)| q == *p));
        out.extend(pairs);
    }
    Ok(out)
}

/// Result of mapping response points onto detection boxes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Attachment {
    /// `(response, detection)` pairs sorted by response.
    pub pairs: Vec<(usize, usize)>,
    /// Detections left unassigned.
    pub false_alarms: Vec<usize>,
    /// Responses left unassigned; they keep their own boxes.
    pub unattached: Vec<usize>,
}

/// Maps responses to detections by minimum total center distance; pairs
/// farther apart than `gate_px` are forbidden.
pub fn attach_detections(responses: &[BBox], detections: &[BBox], gate_px: f64) -> Result<Attachment> {
    if !(gate_px > 0.0) {
        return Err(Error::domain(format!("gate must be positive, got {gate_px}")));
    }
    let cost = CostMatrix::from_fn(responses.len(), detections.len(), |i, j| {
        let d = responses[i].center_distance(&detections[j]);
        if d > gate_px {
            FORBIDDEN
        } else {
            d
        }
    });
    let a = hungarian(&cost)?;
    Ok(Attachment {
        pairs: a.pairs,
        false_alarms: a.unmatched_cols,
        unattached: a.unmatched_rows,
    })
}
