use std::collections::BTreeMap;

use super::SceneTruth;
use crate::error::Result;
use crate::mot_io::DetectionRow;
use crate::response_map::{gaussian_radius, generate_labels, render, Label, LabelParams, Rendered, Splat};

/// Presence labels of a scene, rendered to maps on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSet {
    labels: BTreeMap<u32, Vec<Label>>,
    alpha: f64,
    width: u32,
    height: u32,
}

/// Labels every ground-truth box of `truth` with its inferred presence.
pub fn emit_labels(truth: &SceneTruth, params: &LabelParams, alpha: f64) -> Result<LabelSet> {
    gaussian_radius(1.0, 1.0, alpha)?;
    Ok(LabelSet {
        labels: generate_labels(truth.gt_rows(), params)?,
        alpha,
        width: truth.width(),
        height: truth.height(),
    })
}

impl LabelSet {
    pub fn frame(&self, frame: u32) -> &[Label] {
        self.labels.get(&frame).map_or(&[], Vec::as_slice)
    }

    /// Label map of one frame; absent objects leave no trace.
    pub fn map(&self, frame: u32) -> Result<Rendered> {
        let splats = self
            .frame(frame)
            .iter()
            .map(|l| {
                Ok(Splat {
                    cx: l.cx,
                    cy: l.cy,
                    kernel: gaussian_radius(l.bbox.w, l.bbox.h, self.alpha)?,
                    present: l.present,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        render(&splats, self.width, self.height)
    }

    /// Labels as MOT rows with the presence flag in the confidence column.
    pub fn rows(&self) -> Vec<DetectionRow> {
        self.labels
            .iter()
            .flat_map(|(&f, ls)| {
                ls.iter().map(move |l| {
                    DetectionRow::from_bbox(f, l.id, &l.bbox, f64::from(u8::from(l.present)))
                })
            })
            .collect()
    }
}
