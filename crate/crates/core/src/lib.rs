//! Online multi-object tracking with joint ground-plane and homography
//! estimation.
//!
//! Every track carries a 13-dimensional state (ground position and velocity
//! plus the nine entries of its image-to-ground homography) filtered by a
//! two-model interacting multiple model EKF: one model assumes a static
//! camera, the other propagates the homography with a per-frame affine
//! camera-motion estimate. Measurement and homography process noise are
//! estimated online from innovations. Association runs in three cascaded
//! stages mixing a buffered-IoU image score with a chi-squared probability
//! of the ground-plane Mahalanobis distance.

pub mod association;
pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod ground_imm;
pub mod image_filter;
pub mod io;
pub mod linalg;
pub mod noise;
pub mod tracker;
pub mod tuner;

pub use config::TrackerConfig;
pub use error::{Error, Result};
pub use geometry::{AffineMotion, GroundPoint, Homography, ImagePoint};
pub use image_filter::BBox;
pub use tracker::{Detection, FrameResult, OutputRow, Tracker};

