//! Flow-driven motion: sample a window of the flow field around a point,
//! reduce it to one displacement, and advance boxes by it.

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::mot_io::FlowField;

/// Default ROI side in pixels.
pub const DEFAULT_ROI_SIZE: usize = 20;

/// Per-frame motion of one object: center shift and size change, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Displacement {
    pub dcx: f64,
    pub dcy: f64,
    pub dw: f64,
    pub dh: f64,
}

impl Displacement {
    pub const ZERO: Displacement = Displacement {
        dcx: 0.0,
        dcy: 0.0,
        dw: 0.0,
        dh: 0.0,
    };

    pub fn new(dcx: f64, dcy: f64, dw: f64, dh: f64) -> Self {
        Self { dcx, dcy, dw, dh }
    }

    pub fn translation(dcx: f64, dcy: f64) -> Self {
        Self::new(dcx, dcy, 0.0, 0.0)
    }

    fn components(&self) -> [f64; 4] {
        [self.dcx, self.dcy, self.dw, self.dh]
    }
}

/// Square window of flow vectors; cells outside the field are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiPatch {
    side: usize,
    cells: Vec<Option<[f32; 2]>>,
}

impl RoiPatch {
    pub fn side(&self) -> usize {
        self.side
    }

    /// Cell at window offset `(col, row)`, `None` when it fell outside.
    pub fn cell(&self, col: usize, row: usize) -> Option<[f32; 2]> {
        self.cells[row * self.side + col]
    }

    pub fn valid_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn valid_mask(&self) -> Vec<bool> {
        self.cells.iter().map(Option::is_some).collect()
    }

    /// Valid cells as `(col, row, [u, v])`.
    pub fn valid_cells(&self) -> impl Iterator<Item = (usize, usize, [f32; 2])> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| c.map(|uv| (i % self.side, i / self.side, uv)))
    }

    /// Builds a patch directly from cells, row-major.
    pub fn from_cells(side: usize, cells: Vec<Option<[f32; 2]>>) -> Result<Self> {
        if side == 0 || cells.len() != side * side {
            return Err(Error::domain(format!(
                "patch of side {side} needs {} cells, got {}",
                side * side,
                cells.len()
            )));
        }
        Ok(Self { side, cells })
    }
}

/// Samples the `side x side` window whose top-left corner sits `side / 2`
/// pixels up and left of `(x, y)`. Cells outside the field are invalid.
pub fn sample_roi(flow: &FlowField, x: i64, y: i64, side: usize) -> Result<RoiPatch> {
    if side == 0 {
        return Err(Error::domain("ROI side must be >= 1"));
    }
    if !flow.contains(x, y) {
        return Err(Error::domain(format!(
            "ROI center ({x},{y}) outside {}x{} flow",
            flow.width(),
            flow.height()
        )));
    }
    let half = (side / 2) as i64;
    let mut cells = Vec::with_capacity(side * side);
    for row in 0..side as i64 {
        let fy = y - half + row;
        for col in 0..side as i64 {
            let fx = x - half + col;
            cells.push(if flow.contains(fx, fy) {
                Some(flow.get(fx as u32, fy as u32))
            } else {
                None
            });
        }
    }
    Ok(RoiPatch { side, cells })
}

/// Lower median; `values` must be non-empty.
fn lower_median(values: &mut [f64]) -> f64 {
    let mid = (values.len() - 1) / 2;
    let (_, m, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

/// Median of the valid `u` and `v` components; size change is zero.
pub fn aggregate_displacement(patch: &RoiPatch) -> Result<Displacement> {
    let (mut us, mut vs): (Vec<f64>, Vec<f64>) = patch
        .valid_cells()
        .map(|(_, _, [u, v])| (f64::from(u), f64::from(v)))
        .unzip();
    if us.is_empty() {
        return Err(Error::domain("ROI patch has no valid cells"));
    }
    Ok(Displacement::translation(lower_median(&mut us), lower_median(&mut vs)))
}

/// Like [`aggregate_displacement`], additionally fitting a least-squares
/// similarity transform to the valid cells and converting its scale change
/// into size rates for a `w x h` box.
pub fn aggregate_displacement_scaled(patch: &RoiPatch, w: f64, h: f64) -> Result<Displacement> {
    let mut d = aggregate_displacement(patch)?;
    let scale = similarity_scale(patch);
    d.dw = (scale - 1.0) * w;
    d.dh = (scale - 1.0) * h;
    Ok(d)
}

/// Scale factor of the best similarity mapping cell positions `p` onto
/// `p + flow(p)`. Returns 1 when the cells have no spatial spread.
pub fn similarity_scale(patch: &RoiPatch) -> f64 {
    let pts: Vec<([f64; 2], [f64; 2])> = patch
        .valid_cells()
        .map(|(c, r, [u, v])| {
            let p = [c as f64, r as f64];
            (p, [p[0] + f64::from(u), p[1] + f64::from(v)])
        })
        .collect();
    let n = pts.len() as f64;
    if pts.is_empty() {
        return 1.0;
    }
    let mean = |sel: fn(&([f64; 2], [f64; 2])) -> [f64; 2]| {
        let s = pts.iter().map(sel).fold([0.0, 0.0], |a, b| [a[0] + b[0], a[1] + b[1]]);
        [s[0] / n, s[1] / n]
    };
    let pm = mean(|t| t.0);
    let qm = mean(|t| t.1);
    let (mut dot, mut cross, mut norm) = (0.0, 0.0, 0.0);
    for (p, q) in &pts {
        let (px, py) = (p[0] - pm[0], p[1] - pm[1]);
        let (qx, qy) = (q[0] - qm[0], q[1] - qm[1]);
        dot += px * qx + py * qy;
        cross += px * qy - py * qx;
        norm += px * px + py * py;
    }
    if norm == 0.0 {
        return 1.0;
    }
    (dot * dot + cross * cross).sqrt() / norm
}

/// Advances a box by a displacement; sizes never drop below one pixel.
pub fn predict_location(prev: &BBox, d: &Displacement) -> BBox {
    BBox::new(
        prev.cx + d.dcx,
        prev.cy + d.dcy,
        (prev.w + d.dw).max(1.0),
        (prev.h + d.dh).max(1.0),
    )
}

/// Smooth-L1 penalty of one residual.
pub fn smooth_l1_term(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        0.5 * x * x
    } else {
        a - 0.5
    }
}

/// Mean smooth-L1 penalty over the four displacement components.
pub fn smooth_l1(pred: &Displacement, gt: &Displacement) -> f64 {
    let p = pred.components();
    let g = gt.components();
    p.iter().zip(g).map(|(a, b)| smooth_l1_term(a - b)).sum::<f64>() / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_interior() {
        let f = FlowField::constant(64, 64, 3.0, -2.0).unwrap();
        let p = sample_roi(&f, 30, 30, 20).unwrap();
        assert_eq!(p.valid_count(), 400);
        assert!(p.valid_cells().all(|(_, _, uv)| uv == [3.0, -2.0]));
        assert_eq!(aggregate_displacement(&p).unwrap(), Displacement::new(3.0, -2.0, 0.0, 0.0));
    }

    #[test]
    fn corner_roi_mask() {
        let f = FlowField::zeros(64, 48).unwrap();
        let p = sample_roi(&f, 0, 0, 20).unwrap();
        // offsets -10..=9 intersected with [0, size)
        let mask = p.valid_mask();
        for row in 0..20 {
            for col in 0..20 {
                assert_eq!(mask[row * 20 + col], row >= 10 && col >= 10, "({col},{row})");
            }
        }
        assert_eq!(p.valid_count(), 100);
    }

    #[test]
    fn unit_roi_is_the_vector_at_the_point() {
        let mut f = FlowField::zeros(8, 8).unwrap();
        f.data_mut()[3 * 8 + 5] = [0.25, -7.0];
        let p = sample_roi(&f, 5, 3, 1).unwrap();
        assert_eq!(p.cell(0, 0), Some([0.25, -7.0]));
        assert_eq!(aggregate_displacement(&p).unwrap(), Displacement::translation(0.25, -7.0));
    }

    #[test]
    fn outside_point_is_an_error() {
        let f = FlowField::zeros(8, 8).unwrap();
        assert!(sample_roi(&f, 8, 0, 3).is_err());
        assert!(sample_roi(&f, 0, -1, 3).is_err());
    }

    #[test]
    fn median_ignores_outlier() {
        let mut cells = vec![Some([1.0f32, 1.0]); 25];
        cells[12] = Some([50.0, 50.0]);
        let p = RoiPatch::from_cells(5, cells).unwrap();
        assert_eq!(aggregate_displacement(&p).unwrap(), Displacement::translation(1.0, 1.0));
    }

    #[test]
    fn even_count_takes_lower_median() {
        let cells = vec![Some([1.0, 4.0]), Some([3.0, 2.0]), None, None];
        let p = RoiPatch::from_cells(2, cells).unwrap();
        assert_eq!(aggregate_displacement(&p).unwrap(), Displacement::translation(1.0, 2.0));
    }

    #[test]
    fn empty_patch_is_an_error() {
        let p = RoiPatch::from_cells(2, vec![None; 4]).unwrap();
        assert!(aggregate_displacement(&p).is_err());
    }

    #[test]
    fn similarity_fit_recovers_zoom() {
        // flow of a 10% zoom about the window center plus a shift
        let side = 9;
        let c = 4.0;
        let cells = (0..side * side)
            .map(|i| {
                let (x, y) = ((i % side) as f64, (i / side) as f64);
                Some([(0.1 * (x - c) + 2.0) as f32, (0.1 * (y - c) - 1.0) as f32])
            })
            .collect();
        let p = RoiPatch::from_cells(side, cells).unwrap();
        assert!((similarity_scale(&p) - 1.1).abs() < 1e-6);
        let d = aggregate_displacement_scaled(&p, 40.0, 100.0).unwrap();
        assert!((d.dcx - 2.0).abs() < 1e-6 && (d.dcy + 1.0).abs() < 1e-6);
        assert!((d.dw - 4.0).abs() < 1e-4 && (d.dh - 10.0).abs() < 1e-4);
    }

    #[test]
    fn prediction() {
        let b = BBox::new(10.0, 10.0, 4.0, 8.0);
        assert_eq!(predict_location(&b, &Displacement::translation(2.0, -1.0)), BBox::new(12.0, 9.0, 4.0, 8.0));
        assert_eq!(predict_location(&b, &Displacement::ZERO), b);
        assert_eq!(
            predict_location(&b, &Displacement::new(0.0, 0.0, -10.0, 0.0)),
            BBox::new(10.0, 10.0, 1.0, 8.0)
        );
    }

    #[test]
    fn smooth_l1_values() {
        let z = Displacement::ZERO;
        assert_eq!(smooth_l1(&z, &z), 0.0);
        assert_eq!(smooth_l1(&Displacement::translation(0.5, 0.0), &z), 0.03125);
        assert_eq!(smooth_l1(&Displacement::new(2.0, 2.0, 2.0, 2.0), &z), 1.5);
        let lo = smooth_l1_term(1.0 - 1e-9);
        let hi = smooth_l1_term(1.0 + 1e-9);
        assert!((lo - 0.5).abs() < 1e-8 && (hi - 0.5).abs() < 1e-8);
    }
}
