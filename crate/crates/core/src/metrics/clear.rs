use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::linker::{hungarian, CostMatrix, FORBIDDEN};
use crate::mot_io::{group_by_frame, DetectionRow};

/// Default IOU needed for a ground-truth box and a hypothesis to correspond.
pub const IOU_MATCH: f64 = 0.5;

/// One ground-truth/hypothesis correspondence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchPair {
    pub gt_id: i64,
    pub hyp_id: i64,
    pub iou: f64,
}

/// Correspondences of every evaluated frame, sorted by ground-truth id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameMatching {
    pub frames: BTreeMap<u32, Vec<MatchPair>>,
}

impl FrameMatching {
    pub fn match_count(&self) -> usize {
        self.frames.values().map(Vec::len).sum()
    }
}

/// CLEAR-MOT counts and scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearMot {
    pub mota: f64,
    pub motp: f64,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub id_switches: usize,
    pub fragmentations: usize,
    pub gt_count: usize,
    pub hyp_count: usize,
    pub matching: FrameMatching,
}

/// Boxes of one frame in canonical row order, so matching ties do not
/// depend on the order rows were read in.
fn frame_boxes(rows: Option<&Vec<DetectionRow>>) -> Vec<(i64, BBox)> {
    let mut rows = rows.cloned().unwrap_or_default();
    rows.sort_by(DetectionRow::canonical_cmp);
    rows.iter().map(|d| (d.id, d.bbox())).collect()
}

fn check_boxes(rows: &[DetectionRow]) -> Result<()> {
    rows.iter().try_for_each(DetectionRow::validate)
}

/// Per-frame CLEAR-MOT matching.
///
/// Pairs that corresponded in the previous frame are kept while their IOU
/// stays at or above `iou_match`. The remaining boxes are matched by a
/// minimum-cost assignment on `1 - IOU`, restricted to pairs reaching the
/// same threshold.
pub fn clear_mot(gt: &[DetectionRow], hyp: &[DetectionRow], iou_match: f64) -> Result<ClearMot> {
    if gt.is_empty() {
        return Err(Error::domain("ground truth is empty; MOTA is undefined"));
    }
    if !(iou_match > 0.0 && iou_match <= 1.0) {
        return Err(Error::domain(format!("match threshold must lie in (0,1], got {iou_match}")));
    }
    check_boxes(gt)?;
    check_boxes(hyp)?;
    let gt_frames = group_by_frame(gt);
    let hyp_frames = group_by_frame(hyp);
    let mut frames: Vec<u32> = gt_frames.keys().chain(hyp_frames.keys()).copied().collect();
    frames.sort_unstable();
    frames.dedup();

    let mut prev: HashMap<i64, i64> = HashMap::new();
    let mut last_hyp: HashMap<i64, i64> = HashMap::new();
    let mut tracked: BTreeMap<i64, Vec<bool>> = BTreeMap::new();
    let mut matching = FrameMatching::default();
    let (mut fp, mut fn_, mut idsw) = (0usize, 0usize, 0usize);
    let mut iou_sum = 0.0;

    for f in frames {
        let g = frame_boxes(gt_frames.get(&f));
        let h = frame_boxes(hyp_frames.get(&f));
        let mut g_used = vec![false; g.len()];
        let mut h_used = vec![false; h.len()];
        let mut pairs: Vec<(usize, usize, f64)> = Vec::new();

        for (i, (gid, gb)) in g.iter().enumerate() {
            let Some(&hid) = prev.get(gid) else { continue };
            if let Some(j) = (0..h.len()).find(|&j| !h_used[j] && h[j].0 == hid) {
                let v = gb.iou_unchecked(&h[j].1);
                if v >= iou_match {
                    g_used[i] = true;
                    h_used[j] = true;
                    pairs.push((i, j, v));
                }
            }
        }

        let gi: Vec<usize> = (0..g.len()).filter(|&i| !g_used[i]).collect();
        let hj: Vec<usize> = (0..h.len()).filter(|&j| !h_used[j]).collect();
        if !gi.is_empty() && !hj.is_empty() {
            let cost = CostMatrix::from_fn(gi.len(), hj.len(), |a, b| {
                let v = g[gi[a]].1.iou_unchecked(&h[hj[b]].1);
                if v >= iou_match {
                    1.0 - v
                } else {
                    FORBIDDEN
                }
            });
            for (a, b) in hungarian(&cost)?.pairs {
                pairs.push((gi[a], hj[b], 1.0 - cost.get(a, b)));
            }
        }

        let mut matched_gt = vec![false; g.len()];
        let mut frame_pairs = Vec::with_capacity(pairs.len());
        prev.clear();
        for &(i, j, v) in &pairs {
            let (gid, hid) = (g[i].0, h[j].0);
            matched_gt[i] = true;
            if let Some(&old) = last_hyp.get(&gid) {
                if old != hid {
                    idsw += 1;
                }
            }
            last_hyp.insert(gid, hid);
            prev.insert(gid, hid);
            iou_sum += v;
            frame_pairs.push(MatchPair { gt_id: gid, hyp_id: hid, iou: v });
        }
        for (i, (gid, _)) in g.iter().enumerate() {
            tracked.entry(*gid).or_default().push(matched_gt[i]);
        }
        fn_ += g.len() - pairs.len();
        fp += h.len() - pairs.len();
        frame_pairs.sort_by_key(|p| (p.gt_id, p.hyp_id));
        if !g.is_empty() || !h.is_empty() {
            matching.frames.insert(f, frame_pairs);
        }
    }

    let frag = tracked.values().map(|s| matched_runs(s).saturating_sub(1)).sum();
    let matches = matching.match_count();
    Ok(ClearMot {
        mota: 1.0 - (fp + fn_ + idsw) as f64 / gt.len() as f64,
        motp: if matches == 0 { 0.0 } else { iou_sum / matches as f64 },
        false_positives: fp,
        false_negatives: fn_,
        id_switches: idsw,
        fragmentations: frag,
        gt_count: gt.len(),
        hyp_count: hyp.len(),
        matching,
    })
}

/// Number of maximal runs of `true`.
pub(crate) fn matched_runs(seq: &[bool]) -> usize {
    seq.iter().zip(std::iter::once(&false).chain(seq)).filter(|(&cur, &before)| cur && !before).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(frame: u32, id: i64, left: f64) -> DetectionRow {
        DetectionRow::from_bbox(frame, id, &BBox::from_ltwh(left, 0.0, 10.0, 10.0), 1.0)
    }

    #[test]
    fn identical_is_perfect() {
        let gt = vec![row(1, 1, 0.0), row(1, 2, 50.0), row(2, 1, 2.0), row(2, 2, 52.0)];
        let r = clear_mot(&gt, &gt, IOU_MATCH).unwrap();
        assert_eq!(r.mota, 1.0);
        assert_eq!(r.motp, 1.0);
        assert_eq!((r.false_positives, r.false_negatives, r.id_switches, r.fragmentations), (0, 0, 0, 0));
    }

    #[test]
    fn empty_hypothesis_misses_everything() {
        let gt = vec![row(1, 1, 0.0), row(2, 1, 0.0)];
        let r = clear_mot(&gt, &[], IOU_MATCH).unwrap();
        assert_eq!(r.false_negatives, 2);
        assert_eq!(r.mota, 0.0);
        assert_eq!(r.motp, 0.0);
    }

    #[test]
    fn empty_ground_truth_is_an_error() {
        assert!(clear_mot(&[], &[row(1, 1, 0.0)], IOU_MATCH).is_err());
    }

    #[test]
    fn persisted_pair_beats_better_newcomer() {
        // hyp 8 keeps gt 1 in frame 2 even though hyp 9 overlaps it perfectly
        let gt = vec![row(1, 1, 0.0), row(2, 1, 0.0)];
        let hyp = vec![row(1, 8, 0.0), row(2, 8, 2.0), row(2, 9, 0.0)];
        let r = clear_mot(&gt, &hyp, IOU_MATCH).unwrap();
        assert_eq!(r.id_switches, 0);
        assert_eq!(r.false_positives, 1);
    }

    #[test]
    fn fragmentation_counts_interruptions() {
        let gt: Vec<_> = (1..=5).map(|f| row(f, 1, 0.0)).collect();
        let hyp = vec![row(1, 7, 0.0), row(3, 7, 0.0), row(5, 7, 0.0)];
        let r = clear_mot(&gt, &hyp, IOU_MATCH).unwrap();
        assert_eq!(r.fragmentations, 2);
        assert_eq!(r.id_switches, 0);
        assert_eq!(r.false_negatives, 2);
    }

    #[test]
    fn runs() {
        assert_eq!(matched_runs(&[]), 0);
        assert_eq!(matched_runs(&[true, true, false, true]), 2);
        assert_eq!(matched_runs(&[false, false]), 0);
    }
}
