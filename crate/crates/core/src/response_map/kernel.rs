use crate::error::{Error, Result};

/// Default shape parameter for the radius formula.
pub const DEFAULT_ALPHA: f64 = 0.7;

/// Size-adaptive Gaussian kernel used to splat one object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel {
    /// Radius in pixels, never below one.
    pub radius: f64,
    /// Always `radius / 3`.
    pub sigma: f64,
    pub alpha: f64,
}

impl GaussianKernel {
    /// Integer radius of the splat disc.
    pub fn disc_radius(&self) -> i64 {
        self.radius.ceil() as i64
    }
}

/// The three candidate radii for a `w` x `h` box; the kernel uses the smallest.
///
/// Each candidate is `|(a + sqrt(a^2 - b)) / 2|` with
/// `a = (h+w), 2(h+w), -2(h+w)` and
/// `b = 4hw(1-alpha)/(1+alpha), 16hw(1-alpha), 16hw*alpha(alpha-1)`.
pub fn candidate_radii(w: f64, h: f64, alpha: f64) -> [f64; 3] {
    let s = h + w;
    let p = h * w;
    let coeffs = [
        (s, 4.0 * p * (1.0 - alpha) / (1.0 + alpha)),
        (2.0 * s, 16.0 * p * (1.0 - alpha)),
        (-2.0 * s, 16.0 * p * alpha * (alpha - 1.0)),
    ];
    coeffs.map(|(a, b)| {
        // nonnegative in exact arithmetic for alpha in (0,1)
        let disc = (a * a - b).max(0.0);
        ((a + disc.sqrt()) / 2.0).abs()
    })
}

/// Kernel radius and sigma for a box of the given size.
pub fn gaussian_radius(w: f64, h: f64, alpha: f64) -> Result<GaussianKernel> {
    if !(w > 0.0 && h > 0.0) {
        return Err(Error::domain(format!("box size must be positive, got {w}x{h}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let raw = candidate_radii(w, h, alpha)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let radius = raw.max(1.0);
    Ok(GaussianKernel {
        radius,
        sigma: radius / 3.0,
        alpha,
    })
}
