//! Object kinematic sequence machines and their document form.
//!
//! An [`Oksm`] is a chain of joints; the node order is the manipulation order.
//! Every node carries the joint type, an undirected axis (unit direction plus
//! a point on it), the per-frame joint state and an optional contact pose.
//!
//! Nodes are treated as independent joints on a common base. The contact pose
//! is a single pose here rather than a set of admissible poses.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{canonicalize_direction, min_norm_point, PoseDoc, RigidTransform, Vec3};

pub const DOCUMENT_VERSION: u32 = 1;

/// Tolerance on stored unit vectors and rotations.
pub const UNIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointType {
    Revolute,
    Prismatic,
}

impl fmt::Display for JointType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JointType::Revolute => f.write_str("revolute"),
            JointType::Prismatic => f.write_str("prismatic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointNode {
    pub joint_type: JointType,
    /// Unit axis direction, canonical sign.
    pub direction: Vec3,
    /// Point on the axis (revolute: closest to origin; prismatic: reference point on the link).
    pub position: Vec3,
    /// Radians or meters, `states[0] == 0`.
    pub states: Vec<f64>,
    pub contact_pose: Option<RigidTransform>,
}

impl JointNode {
    /// Builds a node with canonical axis sign. Flipping the direction negates
    /// the states so motion keeps its physical sense. Revolute positions are
    /// reduced to the on-axis point closest to the origin.
    pub fn canonical(
        joint_type: JointType,
        direction: Vec3,
        position: Vec3,
        states: Vec<f64>,
    ) -> Self {
        let (direction, flipped) = canonicalize_direction(&direction.normalize());
        let states = if flipped {
            states.into_iter().map(|s| -s + 0.0).collect()
        } else {
            states
        };
        let position = match joint_type {
            JointType::Revolute => min_norm_point(&direction, &position),
            JointType::Prismatic => position,
        };
        Self {
            joint_type,
            direction,
            position,
            states,
            contact_pose: None,
        }
    }

    pub fn with_contact_pose(mut self, pose: RigidTransform) -> Self {
        self.contact_pose = Some(pose);
        self
    }

    pub fn final_state(&self) -> f64 {
        self.states.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Oksm {
    pub nodes: Vec<JointNode>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OksmError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid OKSM: {0}")]
    Validation(String),
}

impl Oksm {
    pub fn new(nodes: Vec<JointNode>) -> Result<Self, OksmError> {
        let o = Oksm { nodes };
        o.validate()?;
        Ok(o)
    }

    pub fn dof(&self) -> usize {
        self.nodes.len()
    }

    pub fn validate(&self) -> Result<(), OksmError> {
        if self.nodes.is_empty() {
            return Err(OksmError::Validation("node list is empty".into()));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let bad = |what: &str| Err(OksmError::Validation(format!("node {i}: {what}")));
            let finite = n.direction.iter().chain(n.position.iter()).all(|v| v.is_finite())
                && n.states.iter().all(|v| v.is_finite());
            if !finite {
                return bad("non-finite value");
            }
            if (n.direction.norm() - 1.0).abs() > UNIT_TOL {
                return bad("direction is not unit length");
            }
            if canonicalize_direction(&n.direction).1 {
                return bad("direction is not in canonical sign");
            }
            if let Some(s0) = n.states.first() {
                if *s0 != 0.0 {
                    return bad("states[0] must be 0");
                }
            }
            if let Some(pose) = &n.contact_pose {
                if !pose.is_valid(UNIT_TOL) {
                    return bad("contact pose rotation is not proper orthogonal");
                }
            }
        }
        Ok(())
    }

    pub fn to_document(&self) -> OksmDoc {
        OksmDoc {
            version: DOCUMENT_VERSION,
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDoc {
                    joint_type: n.joint_type,
                    direction: n.direction.into(),
                    position: n.position.into(),
                    states: n.states.clone(),
                    contact_pose: n.contact_pose.as_ref().map(PoseDoc::from),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &OksmDoc) -> Result<Self, OksmError> {
        if doc.version != DOCUMENT_VERSION {
            return Err(OksmError::Validation(format!(
                "unsupported version {}",
                doc.version
            )));
        }
        let nodes = doc
            .nodes
            .iter()
            .map(|n| JointNode {
                joint_type: n.joint_type,
                direction: Vec3::from(n.direction),
                position: Vec3::from(n.position),
                states: n.states.clone(),
                contact_pose: n.contact_pose.as_ref().map(RigidTransform::from),
            })
            .collect();
        Oksm::new(nodes)
    }
}

/// Serialized form of an [`Oksm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OksmDoc {
    pub version: u32,
    pub nodes: Vec<NodeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    #[serde(rename = "type")]
    pub joint_type: JointType,
    pub direction: [f64; 3],
    pub position: [f64; 3],
    pub states: Vec<f64>,
    pub contact_pose: Option<PoseDoc>,
}

/// Canonical UTF-8 text for an OKSM. Floats use shortest round-trip
/// formatting, so `load_oksm(&save_oksm(o)) == o` bit for bit.
pub fn save_oksm(o: &Oksm) -> String {
    let mut s = serde_json::to_string_pretty(&o.to_document()).expect("OKSM serializes");
    s.push('\n');
    s
}

pub fn load_oksm(doc: &str) -> Result<Oksm, OksmError> {
    let parsed: OksmDoc = serde_json::from_str(doc).map_err(|e| OksmError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Oksm::from_document(&parsed)
}
