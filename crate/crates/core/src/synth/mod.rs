//! Synthetic scenes with exact ground truth, flow and label maps, plus
//! seeded corruption of the observations derived from them.

mod export;
mod labels;
mod perturb;
mod scene;
mod spec;

pub use export::{export_scene, CorpusLayout, ExportSummary};
pub use labels::{emit_labels, LabelSet};
pub use perturb::{frame_rng, perturb_flow, perturb_peaks};
pub use scene::{generate_scene, visibility, ObjectTrack, SceneTruth};
pub use spec::{Lateral, NoiseSpec, ObjectSpec, Occluder, SceneSpec};
