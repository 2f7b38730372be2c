use super::{GaussianKernel, ResponseMap};
use crate::error::Result;

/// One object to splat onto a response map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Splat {
    pub cx: f64,
    pub cy: f64,
    pub kernel: GaussianKernel,
    /// Inferred presence; absent objects contribute nothing.
    pub present: bool,
}

/// Rendered map plus the number of objects skipped for lying outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub map: ResponseMap,
    pub skipped: usize,
}

/// Renders unit-peak Gaussian bumps at the rounded object centers.
///
/// Overlapping bumps merge by elementwise maximum.
pub fn render(objects: &[Splat], width: u32, height: u32) -> Result<Rendered> {
    let mut map = ResponseMap::zeros(width, height)?;
    let mut skipped = 0;
    let (w, h) = (width as i64, height as i64);
    for obj in objects.iter().filter(|o| o.present) {
        let x0 = obj.cx.round();
        let y0 = obj.cy.round();
        if !(x0 >= 0.0 && y0 >= 0.0 && x0 < w as f64 && y0 < h as f64) {
            skipped += 1;
            continue;
        }
        let (x0, y0) = (x0 as i64, y0 as i64);
        let rad = obj.kernel.disc_radius();
        let two_sigma_sq = 2.0 * obj.kernel.sigma * obj.kernel.sigma;
        let values = map.values_mut();
        for y in (y0 - rad).max(0)..=(y0 + rad).min(h - 1) {
            let dy = y - y0;
            for x in (x0 - rad).max(0)..=(x0 + rad).min(w - 1) {
                let dx = x - x0;
                let d2 = dx * dx + dy * dy;
                if d2 > rad * rad {
                    continue;
                }
                let g = (-(d2 as f64) / two_sigma_sq).exp() as f32;
                let cell = &mut values[(y * w + x) as usize];
                if g > *cell {
                    *cell = g;
                }
            }
        }
    }
    Ok(Rendered { map, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response_map::DEFAULT_ALPHA;

    fn kernel(radius: f64) -> GaussianKernel {
        GaussianKernel {
            radius,
            sigma: radius / 3.0,
            alpha: DEFAULT_ALPHA,
        }
    }

    fn splat(cx: f64, cy: f64, r: f64) -> Splat {
        Splat {
            cx,
            cy,
            kernel: kernel(r),
            present: true,
        }
    }

    #[test]
    fn empty_list_gives_zero_map() {
        let out = render(&[], 8, 6).unwrap();
        assert!(out.map.values().iter().all(|&v| v == 0.0));
        assert_eq!(out.skipped, 0);
    }

    #[test]
    fn single_bump_closed_form() {
        let out = render(&[splat(30.0, 40.0, 6.0)], 64, 64).unwrap();
        assert_eq!(out.map.get(30, 40), 1.0);
        let sigma = 2.0f64;
        let expected = (-9.0 / (2.0 * sigma * sigma)).exp() as f32;
        assert_eq!(out.map.get(33, 40), expected);
        // outside the disc of radius 6
        assert_eq!(out.map.get(35, 44), 0.0);
        assert_eq!(out.map.get(36, 40), ((-36.0 / 8.0f64).exp()) as f32);
        assert_eq!(out.map.get(37, 40), 0.0);
    }

    #[test]
    fn max_merge_is_idempotent() {
        let one = render(&[splat(10.0, 10.0, 4.0)], 32, 32).unwrap();
        let two = render(&[splat(10.0, 10.0, 4.0), splat(10.0, 10.0, 4.0)], 32, 32).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn absent_and_outside_objects() {
        let mut hidden = splat(5.0, 5.0, 3.0);
        hidden.present = false;
        let out = render(&[hidden, splat(-3.0, 2.0, 3.0), splat(2.0, 40.0, 3.0)], 16, 16).unwrap();
        assert!(out.map.values().iter().all(|&v| v == 0.0));
        assert_eq!(out.skipped, 2);
    }

    #[test]
    fn centers_round_to_nearest_pixel() {
        let out = render(&[splat(4.6, 7.4, 2.0)], 16, 16).unwrap();
        assert_eq!(out.map.get(5, 7), 1.0);
    }
}
