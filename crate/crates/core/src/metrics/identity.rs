use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::linker::{hungarian_unordered, CostMatrix};
use crate::mot_io::{group_by_frame, DetectionRow};

/// Trajectory-level identity scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityScores {
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
    /// Boxes correctly identified under the optimal trajectory pairing.
    pub idtp: usize,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Identity precision, recall and F1.
///
/// Whole ground-truth trajectories are paired one-to-one with hypothesis
/// trajectories so that the number of frames in which the paired boxes
/// overlap with IOU of at least `iou_match` is maximal.
pub fn identity_metrics(gt: &[DetectionRow], hyp: &[DetectionRow], iou_match: f64) -> Result<IdentityScores> {
    if gt.is_empty() {
        return Err(Error::domain("ground truth is empty; identity metrics are undefined"));
    }
    gt.iter().chain(hyp).try_for_each(DetectionRow::validate)?;

    let index = |rows: &[DetectionRow]| -> BTreeMap<i64, usize> {
        let mut ids: Vec<i64> = rows.iter().map(|r| r.id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter().enumerate().map(|(i, id)| (id, i)).collect()
    };
    let gt_ids = index(gt);
    let hyp_ids = index(hyp);

    let mut co: HashMap<(usize, usize), usize> = HashMap::new();
    let hyp_frames = group_by_frame(hyp);
    for (f, g_rows) in group_by_frame(gt) {
        let Some(h_rows) = hyp_frames.get(&f) else { continue };
        for g in &g_rows {
            let gb = g.bbox();
            for h in h_rows {
                if gb.iou_unchecked(&h.bbox()) >= iou_match {
                    *co.entry((gt_ids[&g.id], hyp_ids[&h.id])).or_default() += 1;
                }
            }
        }
    }

    let idtp = if co.is_empty() {
        0
    } else {
        let cost = CostMatrix::from_fn(gt_ids.len(), hyp_ids.len(), |i, j| {
            -(co.get(&(i, j)).copied().unwrap_or(0) as f64)
        });
        let a = hungarian_unordered(&cost)?;
        a.pairs.iter().map(|p| co.get(p).copied().unwrap_or(0)).sum()
    };
    let t = idtp as f64;
    let (g, h) = (gt.len() as f64, hyp.len() as f64);
    Ok(IdentityScores {
        idf1: ratio(2.0 * t, g + h),
        idp: ratio(t, h),
        idr: ratio(t, g),
        idtp,
    })
}
