//! Tracker configuration and TOML overrides.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linker::LinkerConfig;
use crate::motion::DEFAULT_ROI_SIZE;
use crate::response_map::{NmsConfig, DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_VIS_MIN, DEFAULT_WINDOW};

/// Every tunable of the tracking pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerConfig {
    /// Presence window length `l`.
    pub window: usize,
    /// Fraction of positive states that keeps an object present.
    pub beta: f64,
    pub nms: NmsConfig,
    /// Side of the flow window sampled around each track.
    pub roi_size: usize,
    pub linker: LinkerConfig,
    /// Kernel shape parameter used when rendering maps.
    pub alpha: f64,
    /// Visibility at which a ground-truth box counts as observed.
    pub vis_min: f64,
    /// Also estimate box size change from the flow.
    pub estimate_scale: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            beta: DEFAULT_BETA,
            nms: NmsConfig::default(),
            roi_size: DEFAULT_ROI_SIZE,
            linker: LinkerConfig::default(),
            alpha: DEFAULT_ALPHA,
            vis_min: DEFAULT_VIS_MIN,
            estimate_scale: false,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 1 {
            return Err(Error::config("window length must be >= 1"));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::config(format!("beta must lie in (0,1], got {}", self.beta)));
        }
        if self.roi_size < 1 {
            return Err(Error::config("ROI size must be >= 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.vis_min) {
            return Err(Error::config(format!("vis_min must lie in [0,1], got {}", self.vis_min)));
        }
        self.nms.validate()?;
        self.linker.validate()
    }

    /// Applies every field set in `o`, leaving the rest untouched.
    pub fn apply(&mut self, o: &Overrides) {
        fn set<T: Copy>(dst: &mut T, src: Option<T>) {
            if let Some(v) = src {
                *dst = v;
            }
        }
        set(&mut self.window, o.l);
        set(&mut self.beta, o.beta);
        set(&mut self.nms.kernel, o.nms_kernel);
        set(&mut self.nms.score_min, o.score_min);
        set(&mut self.nms.max_peaks, o.max_peaks);
        set(&mut self.roi_size, o.roi_size);
        set(&mut self.linker.iou_min, o.iou_min);
        set(&mut self.linker.max_age, o.max_age);
        set(&mut self.linker.init_w, o.init_w);
        set(&mut self.linker.init_h, o.init_h);
        set(&mut self.alpha, o.alpha);
        set(&mut self.vis_min, o.vis_min);
        set(&mut self.estimate_scale, o.estimate_scale);
    }
}

/// Partial configuration, as read from a TOML file or gathered from flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    pub l: Option<usize>,
    pub beta: Option<f64>,
    pub nms_kernel: Option<usize>,
    pub score_min: Option<f64>,
    pub max_peaks: Option<usize>,
    pub roi_size: Option<usize>,
    pub iou_min: Option<f64>,
    pub max_age: Option<u32>,
    pub alpha: Option<f64>,
    pub init_w: Option<f64>,
    pub init_h: Option<f64>,
    pub vis_min: Option<f64>,
    pub estimate_scale: Option<bool>,
}

impl Overrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }
}
