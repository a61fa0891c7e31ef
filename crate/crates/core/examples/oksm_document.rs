//! Build a two-joint OKSM, write it as a document and read it back.

use oksm::geometry::{RigidTransform, Vec3};
use oksm::{load_oksm, save_oksm, JointNode, JointType, Oksm};

fn main() {
    let door = JointNode::canonical(
        JointType::Revolute,
        Vec3::new(0.0, 0.0, -1.0),
        Vec3::new(-0.4, 0.2, 1.0),
        vec![0.0, 0.3, 0.9, 1.4],
    )
    .with_contact_pose(RigidTransform::from_translation(Vec3::new(0.3, 0.2, 1.0)));
    let drawer = JointNode::canonical(
        JointType::Prismatic,
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, -0.3, 0.9),
        vec![0.0, 0.0, 0.1, 0.25],
    );
    let o = Oksm::new(vec![door, drawer]).unwrap();

    let text = save_oksm(&o);
    println!("{text}");
    let back = load_oksm(&text).unwrap();
    assert_eq!(back, o);
    println!(
        "{} joints; the door direction was flipped to {:?} and its states negated",
        back.dof(),
        back.nodes[0].direction.as_slice()
    );

    match load_oksm("{\"version\": 1, \"nodes\": []}") {
        Err(e) => println!("empty chain rejected: {e}"),
        Ok(_) => unreachable!(),
    }
}
