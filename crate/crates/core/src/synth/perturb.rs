use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal, Poisson};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::NoiseSpec;
use crate::error::{Error, Result};
use crate::mot_io::FlowField;
use crate::response_map::{NmsConfig, Peak};

const PEAK_SALT: u64 = 0x7065_616b_7370_6c74;
const FLOW_SALT: u64 = 0x666c_6f77_6e6f_6973;

/// Random stream for one frame, independent of every other frame.
///
/// The generator is xoshiro256++ seeded (through SplitMix64) with
/// `seed ^ frame * 0x9E3779B97F4A7C15 ^ salt`.
pub fn frame_rng(seed: u64, frame: u32, salt: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed ^ u64::from(frame).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
}

/// Drops true peaks and adds spurious ones.
///
/// Spurious peaks are placed uniformly over the map with scores drawn
/// uniformly in `(score_min, 1)`. The result is ordered like
/// `extract_peaks` output and capped at `max_peaks`.
pub fn perturb_peaks(
    peaks: &[Peak],
    frame: u32,
    noise: &NoiseSpec,
    seed: u64,
    size: (u32, u32),
    nms: &NmsConfig,
) -> Result<Vec<Peak>> {
    noise.validate()?;
    let mut rng = frame_rng(seed, frame, PEAK_SALT);
    let mut out: Vec<Peak> = peaks.iter().copied().filter(|_| !rng.random_bool(noise.drop_prob)).collect();
    if noise.spurious_rate > 0.0 {
        let poisson = Poisson::new(noise.spurious_rate).map_err(|e| Error::config(e.to_string()))?;
        let n = poisson.sample(&mut rng) as usize;
        for _ in 0..n {
            let x = rng.random_range(0..size.0);
            let y = rng.random_range(0..size.1);
            let score = loop {
                let s = rng.random_range(nms.score_min..1.0) as f32;
                if s > nms.score_min as f32 && s < 1.0 {
                    break s;
                }
            };
            out.push(Peak::new(x, y, score));
        }
        out.sort_by(|a, b| b.score.total_cmp(&a.score).then((a.y, a.x).cmp(&(b.y, b.x))));
    }
    out.truncate(nms.max_peaks);
    Ok(out)
}

/// Adds zero-mean normal noise to every flow component.
pub fn perturb_flow(flow: &FlowField, frame: u32, noise: &NoiseSpec, seed: u64) -> Result<FlowField> {
    noise.validate()?;
    let mut out = flow.clone();
    if noise.flow_sigma == 0.0 {
        return Ok(out);
    }
    let normal = Normal::new(0.0, noise.flow_sigma).map_err(|e| Error::config(e.to_string()))?;
    let mut rng = frame_rng(seed, frame, FLOW_SALT);
    for cell in out.data_mut() {
        for c in cell.iter_mut() {
            *c = (f64::from(*c) + normal.sample(&mut rng)) as f32;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn peaks() -> Vec<Peak> {
        (0..20).map(|i| Peak::new(i * 10, 5, 1.0)).collect()
    }

    fn noise(drop_prob: f64, spurious_rate: f64, flow_sigma: f64) -> NoiseSpec {
        NoiseSpec { drop_prob, spurious_rate, flow_sigma }
    }

    #[test]
    fn zero_noise_is_identity() {
        let nms = NmsConfig::default();
        let p = perturb_peaks(&peaks(), 4, &NoiseSpec::default(), 9, (300, 20), &nms).unwrap();
        assert_eq!(p, peaks());
        let f = FlowField::constant(8, 8, 1.5, -2.0).unwrap();
        assert_eq!(perturb_flow(&f, 4, &NoiseSpec::default(), 9).unwrap(), f);
    }

    #[test]
    fn full_drop_removes_all_true_peaks() {
        let p = perturb_peaks(&peaks(), 1, &noise(1.0, 0.0, 0.0), 1, (300, 20), &NmsConfig::default()).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn spurious_peaks_respect_bounds_and_scores() {
        let nms = NmsConfig::default();
        for f in 1..50 {
            let p = perturb_peaks(&[], f, &noise(0.0, 3.0, 0.0), 7, (64, 32), &nms).unwrap();
            for q in p {
                assert!(q.x < 64 && q.y < 32);
                assert!(q.score > nms.score_min as f32 && q.score < 1.0);
            }
        }
    }

    #[test]
    fn flow_noise_has_requested_spread() {
        let f = FlowField::zeros(100, 100).unwrap();
        let g = perturb_flow(&f, 2, &noise(0.0, 0.0, 1.0), 42).unwrap();
        for k in 0..2 {
            let v: Vec<f64> = g.data().iter().map(|c| f64::from(c[k])).collect();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
            assert!((0.95..=1.05).contains(&sd), "sd {sd}");
        }
    }

    #[test]
    fn streams_are_reproducible_and_frame_specific() {
        let n = noise(0.5, 2.0, 0.0);
        let nms = NmsConfig::default();
        let a = perturb_peaks(&peaks(), 3, &n, 11, (300, 20), &nms).unwrap();
        let b = perturb_peaks(&peaks(), 3, &n, 11, (300, 20), &nms).unwrap();
        let c = perturb_peaks(&peaks(), 4, &n, 11, (300, 20), &nms).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
