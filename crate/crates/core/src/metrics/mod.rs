//! CLEAR-MOT, identity and trajectory coverage metrics.

mod clear;
mod identity;
mod report;

pub use clear::{clear_mot, ClearMot, FrameMatching, MatchPair, IOU_MATCH};
pub use identity::{identity_metrics, IdentityScores};
pub use report::{evaluate, evaluate_rows, trajectory_stats, EvalOptions, MetricsReport, TrajectoryStats};
