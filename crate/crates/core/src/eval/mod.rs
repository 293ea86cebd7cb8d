//! Synthetic scenes with known ground truth, and the metrics used to score
//! tracker output against them.

pub mod metrics;
pub mod synth;

pub use metrics::{evaluate, idf1, mota, ClearMetrics, Labeled};
pub use synth::{generate, AgentSpec, CameraScript, GroundTruth, JumpEvent, Scene, SceneSpec};
