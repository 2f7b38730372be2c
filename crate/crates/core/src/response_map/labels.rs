use std::collections::BTreeMap;

use super::{infer_state, PresenceHistory};
use crate::error::Result;
use crate::geometry::BBox;
use crate::mot_io::DetectionRow;

/// Default visibility cut for a positive ground-truth observation.
pub const DEFAULT_VIS_MIN: f64 = 0.5;

/// Presence label for one object in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Label {
    pub id: i64,
    /// Ground-truth box; its center is the unrounded object center.
    pub bbox: BBox,
    /// Nearest-integer center column.
    pub cx: f64,
    /// Nearest-integer center row.
    pub cy: f64,
    pub present: bool,
}

/// Parameters of the presence labelling rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelParams {
    pub window: usize,
    pub beta: f64,
    pub vis_min: f64,
}

impl Default for LabelParams {
    fn default() -> Self {
        Self {
            window: super::DEFAULT_WINDOW,
            beta: super::DEFAULT_BETA,
            vis_min: DEFAULT_VIS_MIN,
        }
    }
}

/// Per-frame presence labels from ground-truth rows carrying visibility.
///
/// A row is a positive observation when its visibility reaches `vis_min`.
/// The label is positive when the current observation is positive or the
/// presence rule holds over the preceding window. Frames a track skips
/// between two of its rows count as negative observations.
pub fn generate_labels(rows: &[DetectionRow], params: &LabelParams) -> Result<BTreeMap<u32, Vec<Label>>> {
    let mut tracks: BTreeMap<i64, Vec<&DetectionRow>> = BTreeMap::new();
    for row in rows {
        tracks.entry(row.id).or_default().push(row);
    }
    let mut out: BTreeMap<u32, Vec<Label>> = BTreeMap::new();
    for (id, mut track) in tracks {
        track.sort_by_key(|r| r.frame);
        let mut history = PresenceHistory::new(params.window);
        let mut prev_frame: Option<u32> = None;
        for row in track {
            if let Some(prev) = prev_frame {
                for _ in prev + 1..row.frame {
                    history.push(false);
                }
                if row.frame == prev {
                    // duplicate row for the same frame: keep the first
                    continue;
                }
            }
            let observed = row.visibility >= params.vis_min;
            let inferred = !history.is_empty() && infer_state(&history, params.window, params.beta)?;
            let bbox = row.bbox();
            out.entry(row.frame).or_default().push(Label {
                id,
                bbox,
                cx: bbox.cx.round(),
                cy: bbox.cy.round(),
                present: observed || inferred,
            });
            history.push(observed);
            prev_frame = Some(row.frame);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(vis: &[f64]) -> Vec<DetectionRow> {
        vis.iter()
            .enumerate()
            .map(|(i, &v)| DetectionRow {
                frame: i as u32 + 1,
                id: 7,
                bb_left: 10.0,
                bb_top: 10.0,
                bb_width: 20.0,
                bb_height: 40.0,
                conf: 1.0,
                visibility: v,
            })
            .collect()
    }

    fn z_sequence(vis: &[f64]) -> Vec<bool> {
        let labels = generate_labels(&rows(vis), &LabelParams::default()).unwrap();
        labels.values().map(|l| l[0].present).collect()
    }

    #[test]
    fn fully_visible_track() {
        assert!(z_sequence(&[1.0; 10]).into_iter().all(|z| z));
    }

    #[test]
    fn occlusion_after_four_of_five() {
        let z = z_sequence(&[0.0, 1.0, 1.0, 1.0, 1.0, 0.0]);
        assert_eq!(z, vec![false, true, true, true, true, true]);
    }

    #[test]
    fn visible_only_first_frame() {
        let z = z_sequence(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(z, vec![true, true, false, false, false]);
    }

    #[test]
    fn centers_are_rounded_box_centers() {
        let mut r = rows(&[1.0]);
        r[0].bb_left = 10.3;
        let l = generate_labels(&r, &LabelParams::default()).unwrap();
        let label = l[&1][0];
        assert_eq!((label.cx, label.cy), (20.0, 30.0));
        assert!((label.bbox.cx - 20.3).abs() < 1e-12);
    }

    #[test]
    fn skipped_frames_count_as_negative() {
        let mut r = rows(&[1.0, 1.0, 0.0]);
        // frames 1, 2, then 6 with nothing in between
        r[2].frame = 6;
        let l = generate_labels(&r, &LabelParams::default()).unwrap();
        assert!(!l[&6][0].present);
    }
}
