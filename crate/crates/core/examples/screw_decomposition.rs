//! Decompose rigid motions into screw axes and rebuild them.

use oksm::geometry::{
    kabsch_fit, rotation_about, screw_from_transform, transform_from_screw, RigidTransform, Vec3,
};

fn main() {
    // A door turning 30 degrees about a vertical hinge at x = 0.4.
    let hinge = Vec3::new(0.4, 0.0, 0.0);
    let r = rotation_about(&Vec3::z(), 30f64.to_radians());
    let door = RigidTransform::new(r, hinge - r * hinge);
    let s = screw_from_transform(&door).unwrap();
    println!(
        "door:   direction {:?}, point {:?}, angle {:.1} deg, slide {:.3} m",
        s.direction.as_slice(),
        s.point.as_slice(),
        s.angle.to_degrees(),
        s.slide
    );

    // A drawer sliding 5 cm: pure translation.
    let drawer = RigidTransform::from_translation(Vec3::new(0.0, 0.05, 0.0));
    let s = screw_from_transform(&drawer).unwrap();
    println!("drawer: direction {:?}, slide {:.3} m", s.direction.as_slice(), s.slide);

    // The same door motion recovered from corresponding points.
    let src: Vec<Vec3> = (0..8)
        .map(|i| Vec3::new(0.4 + 0.05 * i as f64, 0.1 * (i % 3) as f64, 0.2 * (i % 2) as f64))
        .collect();
    let dst: Vec<Vec3> = src.iter().map(|p| door.apply(p)).collect();
    let fit = kabsch_fit(&src, &dst).unwrap();
    let back = transform_from_screw(&screw_from_transform(&fit).unwrap());
    println!(
        "kabsch: rotation error {:.1e}, translation error {:.1e}",
        (back.rotation - door.rotation).amax(),
        (back.translation - door.translation).amax()
    );
}
