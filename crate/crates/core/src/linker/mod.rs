//! Data linking: IOU gating, optimal assignment, the age-ordered matching
//! cascade and the track lifecycle.

mod associate;
mod hungarian;
mod tracker;

pub use associate::{
    associate_frame, attach_detections, matching_cascade, peak_box, Attachment, CascadeTrack, LinkerConfig,
};
pub use hungarian::{hungarian, hungarian_unordered, Assignment, CostMatrix, FORBIDDEN};
pub use tracker::{TrackState, TrackStatus, Tracker, OUTPUT_CONF};
