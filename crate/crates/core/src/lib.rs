//! Multi-object tracking on global response maps.
//!
//! Objects are represented as Gaussian bumps on a single-channel map. Peaks
//! of the map are linked into trajectories using displacements aggregated
//! from a dense flow field, IOU gating, optimal assignment and an
//! age-ordered matching cascade. A synthetic scene generator provides exact
//! maps and flow so the whole pipeline can be run and scored without
//! learned models.

pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod linker;
pub mod metrics;
pub mod mot_io;
pub mod motion;
pub mod par;
pub mod pipeline;
pub mod response_map;
pub mod synth;

pub use config::{Overrides, TrackerConfig};
pub use error::{Error, Result};
pub use geometry::{iou, BBox};
pub use linker::{TrackState, TrackStatus, Tracker};
pub use par::Execution;
