//! Recover the OKSM of a noisy fridge demonstration: two doors and a drawer.

use oksm::metrics::{axis_direction_error, node_position_error, node_state_error};
use oksm::synth::{generate_sample, SampleConfig};
use oksm::{estimate_oksm, EstimatorConfig, SegmentMode};

fn main() {
    let seq = generate_sample("fridge", 3, &SampleConfig::default()).unwrap();
    for mode in [SegmentMode::Labeled, SegmentMode::Motion] {
        let est = estimate_oksm(&seq, mode, &EstimatorConfig::default()).unwrap();
        println!("{mode:?} segmentation:");
        for (e, g) in est.nodes.iter().zip(&seq.ground_truth.nodes) {
            println!(
                "  {:9} direction error {:.3} deg, position error {:.3} cm, final state {:.4} (truth {:.4}, error {:.1e})",
                e.joint_type.to_string(),
                axis_direction_error(&e.direction, &g.direction).unwrap(),
                node_position_error(e, g),
                e.final_state(),
                g.final_state(),
                node_state_error(e, g)
            );
        }
    }
}
