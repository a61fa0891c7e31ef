//! Object kinematic sequence machines (OKSMs) for multi-joint articulated
//! objects.
//!
//! - [`geometry`]: rigid transforms, Kabsch registration, screw decomposition.
//! - [`model`]: the OKSM chain and its document format.
//! - [`synth`]: labelled point-cloud demonstrations from box templates.
//! - [`estimate`]: geometric recovery of an OKSM from a demonstration.
//! - [`metrics`]: axis errors, order/DoF/state accuracy, dataset reports.
//! - [`planner`]: end-effector waypoints that actuate each joint in order.
//! - [`cli`]: the `oksm` command-line workflows.
//!
//! Runnable walkthroughs live in this crate's `examples/` directory.

pub mod cli;
pub mod estimate;
pub mod geometry;
pub mod metrics;
pub mod model;
pub mod planner;
pub mod synth;

pub use estimate::{estimate_oksm, EstimateError, EstimatorConfig, SegmentMode};
pub use geometry::{RigidTransform, ScrewParams, Vec3};
pub use model::{load_oksm, save_oksm, JointNode, JointType, Oksm, OksmError};
pub use synth::DemoSequence;
