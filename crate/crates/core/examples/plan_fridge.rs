//! Estimate a fridge OKSM and plan end-effector waypoints for every joint
//! in the demonstrated order.

use oksm::geometry::Vec3;
use oksm::planner::{plan_sequence, PlanSteps};
use oksm::synth::{generate_sample, SampleConfig};
use oksm::{estimate_oksm, EstimatorConfig, JointType, SegmentMode};

fn main() {
    let seq = generate_sample("fridge", 11, &SampleConfig::default()).unwrap();
    let est = estimate_oksm(&seq, SegmentMode::Labeled, &EstimatorConfig::default()).unwrap();

    // Grasp where the demonstration touched each link and repeat the
    // demonstrated motion: doors 80 degrees, the drawer 20 cm.
    let grasps: Vec<Vec3> = seq
        .ground_truth
        .nodes
        .iter()
        .map(|n| n.contact_pose.expect("synthetic ground truth has contact poses").translation)
        .collect();
    let deltas: Vec<f64> = est
        .nodes
        .iter()
        .map(|e| {
            let sign = e.final_state().signum();
            match e.joint_type {
                JointType::Revolute => sign * 80f64.to_radians(),
                JointType::Prismatic => sign * 0.20,
            }
        })
        .collect();

    let plans = plan_sequence(&est, &grasps, &deltas, PlanSteps::default()).unwrap();
    for p in &plans {
        let first = &p.waypoints[0].position;
        let last = p.final_position();
        println!(
            "joint {} ({}, {:?}): {} waypoints from [{:.3}, {:.3}, {:.3}] to [{:.3}, {:.3}, {:.3}]",
            p.joint_index,
            p.joint_type,
            p.direction,
            p.waypoints.len(),
            first.x,
            first.y,
            first.z,
            last.x,
            last.y,
            last.z
        );
    }
    print!("first waypoints of joint 0:\n{}", plans[0].to_jsonl().lines().take(2).collect::<Vec<_>>().join("\n"));
    println!();
}
