use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sinusoidal offset perpendicular to an object's velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lateral {
    pub amplitude: f64,
    /// Frames per full oscillation.
    pub period: f64,
}

/// One moving object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    /// First frame the object exists (1-based).
    pub birth: u32,
    /// Last frame the object exists.
    pub death: u32,
    /// Box at birth as `[left, top, width, height]`.
    pub bbox: [f64; 4],
    /// Pixels per frame.
    #[serde(default)]
    pub velocity: [f64; 2],
    #[serde(default)]
    pub lateral: Option<Lateral>,
}

/// Static axis-aligned occluding rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Occluder {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

/// Corruption applied to oracle observations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    /// Probability of dropping each true peak.
    #[serde(default)]
    pub drop_prob: f64,
    /// Mean number of spurious peaks per frame.
    #[serde(default)]
    pub spurious_rate: f64,
    /// Standard deviation of additive flow noise, pixels.
    #[serde(default)]
    pub flow_sigma: f64,
}

impl NoiseSpec {
    pub fn is_zero(&self) -> bool {
        self.drop_prob == 0.0 && self.spurious_rate == 0.0 && self.flow_sigma == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.drop_prob) {
            return Err(Error::config(format!("noise: drop_prob must lie in [0,1], got {}", self.drop_prob)));
        }
        if !(self.spurious_rate >= 0.0 && self.spurious_rate.is_finite()) {
            return Err(Error::config("noise: spurious_rate must be finite and >= 0"));
        }
        if !(self.flow_sigma >= 0.0 && self.flow_sigma.is_finite()) {
            return Err(Error::config("noise: flow_sigma must be finite and >= 0"));
        }
        Ok(())
    }
}

fn default_name() -> String {
    "synthetic".to_string()
}

fn default_frame_rate() -> f64 {
    30.0
}

/// Complete description of a synthetic sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    #[serde(default = "default_name")]
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub frames: u32,
    #[serde(default = "default_frame_rate")]
    pub frame_rate: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub occluders: Vec<Occluder>,
    #[serde(default)]
    pub noise: NoiseSpec,
}

impl SceneSpec {
    pub fn new(width: u32, height: u32, frames: u32) -> Self {
        Self {
            name: default_name(),
            width,
            height,
            frames,
            frame_rate: default_frame_rate(),
            seed: 0,
            objects: Vec::new(),
            occluders: Vec::new(),
            noise: NoiseSpec::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scene spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 1 || self.height < 1 || self.frames < 1 {
            return Err(Error::config("scene width, height and frames must be >= 1"));
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return Err(Error::config("frame_rate must be positive"));
        }
        self.noise.validate()?;
        for (i, o) in self.objects.iter().enumerate() {
            let bad = |msg: String| Err(Error::config(format!("object {i}: {msg}")));
            if o.birth < 1 || o.birth >= o.death || o.death > self.frames {
                return bad(format!(
                    "need 1 <= birth < death <= {}, got birth {} death {}",
                    self.frames, o.birth, o.death
                ));
            }
            let [l, t, w, h] = o.bbox;
            if !o.bbox.iter().chain(&o.velocity).all(|v| v.is_finite()) {
                return bad("box and velocity must be finite".into());
            }
            if !(w > 0.0 && h > 0.0) {
                return bad("box size must be positive".into());
            }
            if l < 0.0 || t < 0.0 || l + w > f64::from(self.width) || t + h > f64::from(self.height) {
                return bad("box lies outside the image at birth".into());
            }
            if let Some(lat) = o.lateral {
                if !(lat.amplitude.is_finite() && lat.period > 0.0 && lat.period.is_finite()) {
                    return bad("lateral motion needs a finite amplitude and positive period".into());
                }
            }
        }
        for (i, r) in self.occluders.iter().enumerate() {
            let v = [r.left, r.top, r.width, r.height];
            if !v.iter().all(|x| x.is_finite()) || r.width <= 0.0 || r.height <= 0.0 {
                return Err(Error::config(format!("occluder {i}: needs finite position and positive size")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEMO: &str = r#"
width = 200
height = 100
frames = 10
seed = 3

[[objects]]
birth = 1
death = 10
bbox = [10.0, 10.0, 20.0, 40.0]
velocity = [2.0, 0.0]

[[occluders]]
left = 100.0
top = 0.0
width = 20.0
height = 100.0
"#;

    #[test]
    fn parses_and_round_trips() {
        let s = SceneSpec::from_toml(DEMO).unwrap();
        assert_eq!(s.objects.len(), 1);
        assert_eq!(s.name, "synthetic");
        assert_eq!(SceneSpec::from_toml(&s.to_toml()).unwrap(), s);
    }

    #[test]
    fn birth_after_death_names_object() {
        let bad = DEMO.replace("death = 10", "death = 1");
        let err = SceneSpec::from_toml(&bad).unwrap_err().to_string();
        assert!(err.contains("object 0"), "{err}");
    }

    #[test]
    fn box_outside_rejected() {
        let bad = DEMO.replace("[10.0, 10.0, 20.0, 40.0]", "[190.0, 10.0, 20.0, 40.0]");
        assert!(SceneSpec::from_toml(&bad).is_err());
    }

    #[test]
    fn probability_checked() {
        let mut s = SceneSpec::from_toml(DEMO).unwrap();
        s.noise.drop_prob = 1.5;
        assert!(s.validate().is_err());
    }
}
