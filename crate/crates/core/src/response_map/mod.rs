//! Gaussian center-map representation of tracked objects.
//!
//! Objects are splatted as unit-peak bumps whose radius follows the box
//! size, presence is inferred over a short window of past observations,
//! and peaks are read back with a local maximum filter.

mod bce;
mod kernel;
mod labels;
mod map;
mod peaks;
mod presence;
mod render;

pub use bce::{bce_score, BCE_EPS};
pub use kernel::{candidate_radii, gaussian_radius, GaussianKernel, DEFAULT_ALPHA};
pub use labels::{generate_labels, Label, LabelParams, DEFAULT_VIS_MIN};
pub use map::ResponseMap;
pub use peaks::{extract_peaks, extract_peaks_with, NmsConfig, Peak};
pub use presence::{infer_state, PresenceHistory, DEFAULT_BETA, DEFAULT_WINDOW};
pub use render::{render, Rendered, Splat};
