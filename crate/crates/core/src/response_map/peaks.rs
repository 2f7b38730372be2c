use std::cmp::Ordering;

use super::ResponseMap;
use crate::error::{Error, Result};
use crate::par::Execution;

/// Local-maximum suppression settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmsConfig {
    /// Odd window side in pixels.
    pub kernel: usize,
    /// Peaks must score strictly above this.
    pub score_min: f64,
    /// Maximum number of peaks returned.
    pub max_peaks: usize,
}

impl Default for NmsConfig {
    fn default() -> Self {
        Self {
            kernel: 3,
            score_min: 0.05,
            max_peaks: 60,
        }
    }
}

impl NmsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kernel == 0 || self.kernel % 2 == 0 {
            return Err(Error::config(format!(
                "NMS kernel must be odd and >= 1, got {}",
                self.kernel
            )));
        }
        if !(self.score_min > 0.0 && self.score_min < 1.0) {
            return Err(Error::config(format!(
                "score threshold must lie in (0,1), got {}",
                self.score_min
            )));
        }
        if self.max_peaks == 0 {
            return Err(Error::config("max peak count must be >= 1"));
        }
        Ok(())
    }
}

/// Local maximum of a response map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub x: u32,
    pub y: u32,
    pub score: f32,
}

impl Peak {
    pub fn new(x: u32, y: u32, score: f32) -> Self {
        Self { x, y, score }
    }
}

/// Local NMS peak extraction using the default execution strategy.
pub fn extract_peaks(map: &ResponseMap, cfg: &NmsConfig) -> Vec<Peak> {
    extract_peaks_with(map, cfg, Execution::default())
}

/// Local NMS peak extraction.
///
/// A pixel is kept when its value exceeds `score_min` and no pixel in its
/// `kernel x kernel` window (truncated at the border) is larger. Among equal
/// values inside a window only the smallest `(y, x)` survives. Results are
/// sorted by descending score, then `(y, x)`, and truncated to `max_peaks`.
pub fn extract_peaks_with(map: &ResponseMap, cfg: &NmsConfig, exec: Execution) -> Vec<Peak> {
    let half = (cfg.kernel / 2) as i64;
    let (w, h) = (map.width() as i64, map.height() as i64);
    let rows = exec.map_range(h as usize, |y| {
        let row = map.row(y);
        let y = y as i64;
        let mut found = Vec::new();
        for (x, &v) in row.iter().enumerate() {
            if v <= cfg.score_min as f32 {
                continue;
            }
            let x = x as i64;
            if is_local_max(map, x, y, v, half, w, h) {
                found.push(Peak::new(x as u32, y as u32, v));
            }
        }
        found
    });
    let mut peaks: Vec<Peak> = rows.into_iter().flatten().collect();
    peaks.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then((a.y, a.x).cmp(&(b.y, b.x)))
    });
    peaks.truncate(cfg.max_peaks);
    peaks
}

fn is_local_max(map: &ResponseMap, x: i64, y: i64, v: f32, half: i64, w: i64, h: i64) -> bool {
    for qy in (y - half).max(0)..=(y + half).min(h - 1) {
        let row = map.row(qy as usize);
        for qx in (x - half).max(0)..=(x + half).min(w - 1) {
            let q = row[qx as usize];
            if q > v || (q == v && (qy, qx) < (y, x)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response_map::{gaussian_radius, render, Splat};

    fn map_from(width: u32, height: u32, cells: &[(u32, u32, f32)]) -> ResponseMap {
        let mut v = vec![0.0; (width * height) as usize];
        for &(x, y, s) in cells {
            v[(y * width + x) as usize] = s;
        }
        ResponseMap::from_values(width, height, v).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(NmsConfig::default().validate().is_ok());
        let bad = NmsConfig { kernel: 4, ..NmsConfig::default() };
        assert!(bad.validate().is_err());
        let bad = NmsConfig { score_min: 1.0, ..NmsConfig::default() };
        assert!(bad.validate().is_err());
        let bad = NmsConfig { max_peaks: 0, ..NmsConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rendered_object_gives_one_peak() {
        let kernel = gaussian_radius(40.0, 100.0, 0.7).unwrap();
        let splat = Splat { cx: 30.0, cy: 40.0, kernel, present: true };
        let out = render(&[splat], 96, 96).unwrap();
        let peaks = extract_peaks(&out.map, &NmsConfig::default());
        assert_eq!(peaks, vec![Peak::new(30, 40, 1.0)]);
    }

    #[test]
    fn zero_map_has_no_peaks() {
        let map = ResponseMap::zeros(20, 10).unwrap();
        assert!(extract_peaks(&map, &NmsConfig::default()).is_empty());
    }

    #[test]
    fn threshold_is_strict() {
        let map = map_from(5, 5, &[(2, 2, 0.05)]);
        assert!(extract_peaks(&map, &NmsConfig::default()).is_empty());
        let map = map_from(5, 5, &[(2, 2, 0.06)]);
        assert_eq!(extract_peaks(&map, &NmsConfig::default()).len(), 1);
    }

    #[test]
    fn plateau_keeps_smallest_row_then_column() {
        let map = map_from(6, 6, &[(2, 2, 0.5), (3, 2, 0.5), (1, 3, 0.5), (2, 3, 0.5)]);
        let peaks = extract_peaks(&map, &NmsConfig::default());
        assert_eq!(peaks, vec![Peak::new(2, 2, 0.5)]);
    }

    #[test]
    fn border_pixels_can_be_peaks() {
        let map = map_from(4, 4, &[(0, 0, 0.9), (3, 3, 0.7)]);
        let peaks = extract_peaks(&map, &NmsConfig::default());
        assert_eq!(peaks, vec![Peak::new(0, 0, 0.9), Peak::new(3, 3, 0.7)]);
    }

    #[test]
    fn sorted_by_score_and_truncated() {
        let map = map_from(10, 1, &[(0, 0, 0.2), (3, 0, 0.9), (6, 0, 0.5), (9, 0, 0.9)]);
        let cfg = NmsConfig { max_peaks: 3, ..NmsConfig::default() };
        let peaks = extract_peaks(&map, &cfg);
        assert_eq!(
            peaks,
            vec![Peak::new(3, 0, 0.9), Peak::new(9, 0, 0.9), Peak::new(6, 0, 0.5)]
        );
    }

    #[test]
    fn seventy_unit_peaks_capped_at_sixty() {
        let kernel = gaussian_radius(10.0, 10.0, 0.7).unwrap();
        let spacing = 2 * kernel.disc_radius() as u32 + 2;
        let splats: Vec<Splat> = (0..70)
            .map(|i| Splat {
                cx: f64::from(spacing * (i % 10) + spacing),
                cy: f64::from(spacing * (i / 10) + spacing),
                kernel,
                present: true,
            })
            .collect();
        let out = render(&splats, spacing * 12, spacing * 9).unwrap();
        let peaks = extract_peaks(&out.map, &NmsConfig::default());
        assert_eq!(peaks.len(), 60);
        assert!(peaks.iter().all(|p| p.score == 1.0));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let kernel = gaussian_radius(20.0, 30.0, 0.7).unwrap();
        let splats: Vec<Splat> = (0..25)
            .map(|i| Splat {
                cx: f64::from(17 * i % 190),
                cy: f64::from(29 * i % 110),
                kernel,
                present: true,
            })
            .collect();
        let out = render(&splats, 200, 120).unwrap();
        let cfg = NmsConfig::default();
        assert_eq!(
            extract_peaks_with(&out.map, &cfg, Execution::Sequential),
            extract_peaks_with(&out.map, &cfg, Execution::Parallel)
        );
    }
}
