//! End-effector waypoints for actuating OKSM joints: arcs about revolute
//! axes, straight lines along prismatic directions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{point_line_distance, rotation_about, Mat3, PoseDoc, RigidTransform, Vec3};
use crate::model::{JointNode, JointType, Oksm};

/// One degree, in radians.
pub const DEFAULT_ANGLE_STEP: f64 = std::f64::consts::PI / 180.0;
/// One centimeter, in meters.
pub const DEFAULT_LINEAR_STEP: f64 = 0.01;
/// Grasps closer than this to a revolute axis cannot turn it.
pub const MIN_LEVER: f64 = 0.01;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("grasp is {lever:.4} m from the axis (minimum {MIN_LEVER} m)")]
    GraspOnAxis { lever: f64 },
    #[error("delta is zero")]
    ZeroDelta,
    #[error("step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("{nodes} nodes but {grasps} grasps and {deltas} deltas")]
    ArityMismatch {
        nodes: usize,
        grasps: usize,
        deltas: usize,
    },
    #[error("node {index}: {source}")]
    Node {
        index: usize,
        #[source]
        source: Box<PlanError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Open,
    Close,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Waypoint {
    pub position: Vec3,
    pub rotation: Mat3,
}

impl Waypoint {
    pub fn pose(&self) -> RigidTransform {
        RigidTransform::new(self.rotation, self.position)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaypointPlan {
    pub joint_index: usize,
    pub joint_type: JointType,
    /// Excludes the starting grasp; the last entry is the exact target.
    pub waypoints: Vec<Waypoint>,
    /// Radians per step (revolute) or meters per step (prismatic).
    pub step: f64,
    pub direction: Direction,
}

impl WaypointPlan {
    pub fn final_position(&self) -> Vec3 {
        self.waypoints.last().map(|w| w.position).unwrap_or_default()
    }

    /// One `{"position":[x,y,z],"rotation":[9 row-major]}` object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for w in &self.waypoints {
            let doc = PoseDoc::from(&w.pose());
            let line = serde_json::json!({ "position": doc.translation, "rotation": doc.rotation });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanSteps {
    pub angular: f64,
    pub linear: f64,
}

impl Default for PlanSteps {
    fn default() -> Self {
        Self {
            angular: DEFAULT_ANGLE_STEP,
            linear: DEFAULT_LINEAR_STEP,
        }
    }
}

/// Signed parameters `k·step` for k = 1..n, then `delta` itself if the last
/// full step falls short of it.
fn increments(delta: f64, step: f64) -> Vec<f64> {
    let n_full = (delta.abs() / step + 1e-9).floor() as usize;
    let sign = delta.signum();
    let mut out: Vec<f64> = (1..=n_full).map(|k| sign * k as f64 * step).collect();
    match out.last_mut() {
        Some(last) if (delta - *last).abs() <= 1e-9 * step => *last = delta,
        _ => out.push(delta),
    }
    out
}

/// Plans a change of `delta` in the joint state (radians or meters) starting
/// from `grasp`. The tool starts at the node's contact orientation, or the
/// identity when the node has none.
pub fn plan_joint(node: &JointNode, grasp: &Vec3, delta: f64, step: f64) -> Result<WaypointPlan, PlanError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(PlanError::InvalidStep(step));
    }
    if delta == 0.0 || !delta.is_finite() {
        return Err(PlanError::ZeroDelta);
    }
    let initial = node.contact_pose.map(|p| p.rotation).unwrap_or_else(Mat3::identity);
    let waypoints = match node.joint_type {
        JointType::Revolute => {
            let lever = point_line_distance(grasp, &node.direction, &node.position);
            if lever < MIN_LEVER {
                return Err(PlanError::GraspOnAxis { lever });
            }
            let arm = grasp - node.position;
            increments(delta, step)
                .into_iter()
                .map(|angle| {
                    let r = rotation_about(&node.direction, angle);
                    Waypoint {
                        position: node.position + r * arm,
                        rotation: r * initial,
                    }
                })
                .collect()
        }
        JointType::Prismatic => increments(delta, step)
            .into_iter()
            .map(|s| Waypoint {
                position: grasp + node.direction * s,
                rotation: initial,
            })
            .collect(),
    };
    Ok(WaypointPlan {
        joint_index: 0,
        joint_type: node.joint_type,
        waypoints,
        step,
        direction: if delta > 0.0 { Direction::Open } else { Direction::Close },
    })
}

/// One plan per node, in node (manipulation) order.
pub fn plan_sequence(
    oksm: &Oksm,
    grasps: &[Vec3],
    deltas: &[f64],
    steps: PlanSteps,
) -> Result<Vec<WaypointPlan>, PlanError> {
    if grasps.len() != oksm.nodes.len() || deltas.len() != oksm.nodes.len() {
        return Err(PlanError::ArityMismatch {
            nodes: oksm.nodes.len(),
            grasps: grasps.len(),
            deltas: deltas.len(),
        });
    }
    oksm.nodes
        .iter()
        .zip(grasps.iter().zip(deltas))
        .enumerate()
        .map(|(index, (node, (grasp, &delta)))| {
            let step = match node.joint_type {
                JointType::Revolute => steps.angular,
                JointType::Prismatic => steps.linear,
            };
            plan_joint(node, grasp, delta, step)
                .map(|plan| WaypointPlan { joint_index: index, ..plan })
                .map_err(|e| PlanError::Node {
                    index,
                    source: Box::new(e),
                })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn door() -> JointNode {
        JointNode::canonical(JointType::Revolute, Vec3::z(), Vec3::new(0.3, -0.2, 1.0), vec![0.0, 1.0])
    }

    fn drawer() -> JointNode {
        JointNode::canonical(JointType::Prismatic, Vec3::new(0.0, 0.6, 0.8), Vec3::zeros(), vec![0.0, 0.2])
    }

    #[test]
    fn ninety_degree_arc() {
        let grasp = Vec3::new(0.8, 0.1, 1.3);
        let plan = plan_joint(&door(), &grasp, 90f64.to_radians(), DEFAULT_ANGLE_STEP).unwrap();
        assert_eq!(plan.waypoints.len(), 90);
        assert_eq!(plan.direction, Direction::Open);
        let n = door();
        let lever = point_line_distance(&grasp, &n.direction, &n.position);
        let axial = grasp.dot(&n.direction);
        let mut prev = grasp;
        for w in &plan.waypoints {
            assert!((point_line_distance(&w.position, &n.direction, &n.position) - lever).abs() < 1e-9);
            assert!((w.position.dot(&n.direction) - axial).abs() < 1e-9);
            let (a, b) = (prev - n.position, w.position - n.position);
            let a = a - n.direction * a.dot(&n.direction);
            let b = b - n.direction * b.dot(&n.direction);
            let angle = a.cross(&b).dot(&n.direction).atan2(a.dot(&b));
            assert!((angle - DEFAULT_ANGLE_STEP).abs() < 1e-9);
            prev = w.position;
        }
        // Tool frame turns with the door.
        let last = plan.waypoints.last().unwrap();
        assert!((last.rotation - rotation_about(&n.direction, 90f64.to_radians())).norm() < 1e-12);
    }

    #[test]
    fn five_centimeter_line() {
        let grasp = Vec3::new(0.1, 0.2, 0.3);
        let plan = plan_joint(&drawer(), &grasp, 0.05, DEFAULT_LINEAR_STEP).unwrap();
        assert_eq!(plan.waypoints.len(), 5);
        let d = drawer().direction;
        let mut prev = grasp;
        for w in &plan.waypoints {
            let v = w.position - grasp;
            assert!((v - d * v.dot(&d)).norm() < 1e-9);
            assert!(((w.position - prev).norm() - 0.01).abs() < 1e-9);
            assert_eq!(w.rotation, Mat3::identity());
            prev = w.position;
        }
    }

    #[test]
    fn partial_final_step_hits_target() {
        let plan = plan_joint(&drawer(), &Vec3::zeros(), -0.035, 0.01).unwrap();
        assert_eq!(plan.waypoints.len(), 4);
        assert_eq!(plan.direction, Direction::Close);
        let end = plan.final_position();
        assert!((end - drawer().direction * -0.035).norm() < 1e-12);
    }

    #[test]
    fn reversible_and_refinable() {
        let grasp = Vec3::new(0.5, 0.4, 0.9);
        let fwd = plan_joint(&door(), &grasp, 1.234, DEFAULT_ANGLE_STEP).unwrap();
        let back = plan_joint(&door(), &fwd.final_position(), -1.234, DEFAULT_ANGLE_STEP).unwrap();
        assert!((back.final_position() - grasp).norm() < 1e-9);

        let fine = plan_joint(&door(), &grasp, 1.234, DEFAULT_ANGLE_STEP / 2.0).unwrap();
        let (n, m) = (fwd.waypoints.len() as i64, fine.waypoints.len() as i64);
        assert!((m - 2 * n).abs() <= 1, "{n} {m}");
        assert!(fine.waypoints.last().unwrap().pose().compose(&fwd.waypoints.last().unwrap().pose().inverse()).translation.norm() < 1e-9);
    }

    #[test]
    fn errors() {
        let n = door();
        assert_eq!(plan_joint(&n, &Vec3::new(0.5, 0.0, 0.0), 0.0, DEFAULT_ANGLE_STEP), Err(PlanError::ZeroDelta));
        assert!(matches!(
            plan_joint(&n, &(n.position + Vec3::new(0.005, 0.0, 0.4)), 1.0, DEFAULT_ANGLE_STEP),
            Err(PlanError::GraspOnAxis { .. })
        ));
        let o = Oksm::new(vec![door(), drawer()]).unwrap();
        assert!(matches!(
            plan_sequence(&o, &[], &[], PlanSteps::default()),
            Err(PlanError::ArityMismatch { nodes: 2, .. })
        ));
        let err = plan_sequence(&o, &[Vec3::new(1.0, 0.0, 0.0); 2], &[1.0, 0.0], PlanSteps::default()).unwrap_err();
        assert!(matches!(err, PlanError::Node { index: 1, .. }));
    }

    #[test]
    fn sequence_keeps_node_order() {
        let o = Oksm::new(vec![door(), drawer()]).unwrap();
        let grasps = [Vec3::new(0.8, 0.0, 1.0), Vec3::zeros()];
        let plans = plan_sequence(&o, &grasps, &[0.5, 0.1], PlanSteps::default()).unwrap();
        assert_eq!(plans.iter().map(|p| p.joint_index).collect::<Vec<_>>(), [0, 1]);
        assert_eq!(plans[1].waypoints.len(), 10);
        let single = plan_joint(&o.nodes[0], &grasps[0], 0.5, DEFAULT_ANGLE_STEP).unwrap();
        assert_eq!(plans[0], single);
    }

    #[test]
    fn jsonl_export() {
        let plan = plan_joint(&drawer(), &Vec3::zeros(), 0.02, 0.01).unwrap();
        let text = plan.to_jsonl();
        let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0]["rotation"].as_array().unwrap().len(), 9);
        assert_eq!(lines[1]["position"].as_array().unwrap().len(), 3);
    }
}
