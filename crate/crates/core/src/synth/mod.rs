//! Deterministic synthetic demonstrations of articulated objects.
//!
//! Objects are built from boxes ([`template`]), sampled into labelled point
//! sets, animated by a sequential [`MotionScript`] and observed from a random
//! camera ([`render`]). Samples are stored in the `OKSMPC v1` format ([`io`])
//! and grouped into datasets with a manifest ([`dataset`]).

use std::path::Path;

use thiserror::Error;

pub mod dataset;
pub mod io;
pub mod render;
pub mod template;

pub use dataset::{
    generate_dataset, generate_sample, load_manifest, plan_dataset, sample_path, DatasetConfig,
    DatasetManifest, SampleConfig, SampleEntry, Split,
};
pub use io::{decode_sample, encode_sample, read_sample, write_sample};
pub use render::{
    random_script, render_sequence, sample_camera_pose, sample_surface, Actuation, DemoSequence,
    LabeledPoints, MotionScript, RenderParams, DEFAULT_FRAMES, DEFAULT_NOISE_SIGMA,
    DEFAULT_POINTS_PER_LINK,
};
pub use template::{make_template, ArticulatedTemplate, BoxShape, LinkTemplate, CATEGORIES};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
    #[error("invalid motion script: {0}")]
    InvalidScript(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed sample data: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl SynthError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        SynthError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
