//! Parametric articulated-object templates built from axis-aligned boxes.
//!
//! Object frame: z up, the front face of the base looks toward -y, the base
//! rests on z = 0 centred on the z axis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SynthError;
use crate::geometry::Vec3;
use crate::model::JointType;

pub const CATEGORIES: [&str; 8] = [
    "microwave",
    "laptop",
    "washing_machine",
    "fridge",
    "drawer",
    "box",
    "dishwasher",
    "furniture",
];

/// Axis-aligned box in the object frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxShape {
    pub center: Vec3,
    pub extents: Vec3,
}

impl BoxShape {
    pub fn new(center: Vec3, extents: Vec3) -> Self {
        Self { center, extents }
    }

    /// Face areas ordered -x, +x, -y, +y, -z, +z.
    pub fn face_areas(&self) -> [f64; 6] {
        let e = self.extents;
        let (yz, xz, xy) = (e.y * e.z, e.x * e.z, e.x * e.y);
        [yz, yz, xz, xz, xy, xy]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkTemplate {
    pub shape: BoxShape,
    pub joint_type: JointType,
    /// Unit axis direction; positive state opens the link.
    pub direction: Vec3,
    pub axis_point: Vec3,
    /// Radians or meters; the rest pose is state 0.
    pub range: (f64, f64),
    /// Grasp location on the link at rest.
    pub handle: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArticulatedTemplate {
    pub category: String,
    pub base: BoxShape,
    pub links: Vec<LinkTemplate>,
}

impl ArticulatedTemplate {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.links.is_empty() || self.links.len() > 3 {
            return Err(SynthError::InvalidTemplate(format!(
                "{} links; expected 1..=3",
                self.links.len()
            )));
        }
        for (i, l) in self.links.iter().enumerate() {
            let (lo, hi) = l.range;
            if lo >= hi {
                return Err(SynthError::InvalidTemplate(format!("link {i}: empty range")));
            }
            if l.joint_type == JointType::Revolute && hi - lo > std::f64::consts::PI {
                return Err(SynthError::InvalidTemplate(format!(
                    "link {i}: revolute range exceeds pi"
                )));
            }
            if (l.direction.norm() - 1.0).abs() > 1e-12 {
                return Err(SynthError::InvalidTemplate(format!(
                    "link {i}: direction not unit"
                )));
            }
        }
        Ok(())
    }

    pub fn joint_types(&self) -> Vec<JointType> {
        self.links.iter().map(|l| l.joint_type).collect()
    }
}

fn revolute(shape: BoxShape, direction: Vec3, axis_point: Vec3, hi: f64, handle: Vec3) -> LinkTemplate {
    LinkTemplate {
        shape,
        joint_type: JointType::Revolute,
        direction,
        axis_point,
        range: (0.0, hi.min(std::f64::consts::PI)),
        handle,
    }
}

fn prismatic(shape: BoxShape, direction: Vec3, hi: f64, handle: Vec3) -> LinkTemplate {
    LinkTemplate {
        shape,
        joint_type: JointType::Prismatic,
        direction,
        axis_point: shape.center,
        range: (0.0, hi),
        handle,
    }
}

/// Template for `category` with dimensions, joint placements and motion
/// ranges jittered uniformly within ±25% of the category defaults.
pub fn make_template(category: &str, rng_seed: u64) -> Result<ArticulatedTemplate, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut jitter = move || rng.random_range(0.75..=1.25);
    let v = Vec3::new;
    let deg = f64::to_radians;

    let defaults = match category {
        "microwave" => v(0.5, 0.35, 0.3),
        "laptop" => v(0.33, 0.23, 0.02),
        "washing_machine" => v(0.6, 0.6, 0.85),
        "fridge" => v(0.8, 0.7, 1.8),
        "drawer" => v(0.5, 0.5, 0.3),
        "box" => v(0.4, 0.3, 0.25),
        "dishwasher" => v(0.6, 0.6, 0.85),
        "furniture" => v(0.8, 0.45, 0.9),
        other => return Err(SynthError::UnknownCategory(other.to_string())),
    };
    let (w, d, h) = (
        defaults.x * jitter(),
        defaults.y * jitter(),
        defaults.z * jitter(),
    );
    let base = BoxShape::new(v(0.0, 0.0, h / 2.0), v(w, d, h));
    let front = -d / 2.0;

    let links = match category {
        "microwave" => {
            let t = 0.02 * jitter();
            let dw = 0.75 * w;
            let dh = 0.9 * h;
            vec![revolute(
                BoxShape::new(v(-w / 2.0 + dw / 2.0, front - t / 2.0, h / 2.0), v(dw, t, dh)),
                v(0.0, 0.0, -1.0),
                v(-w / 2.0, front - t, 0.0),
                deg(100.0) * jitter(),
                v(-w / 2.0 + 0.9 * dw, front - t, h / 2.0),
            )]
        }
        "laptop" => {
            let t = 0.008 * jitter();
            vec![revolute(
                BoxShape::new(v(0.0, 0.0, h + t / 2.0), v(w, d, t)),
                v(-1.0, 0.0, 0.0),
                v(0.0, d / 2.0, h),
                deg(120.0) * jitter(),
                v(0.0, -d / 2.0, h + t),
            )]
        }
        "washing_machine" => {
            let t = 0.04 * jitter();
            let side = 0.65 * w.min(h);
            let zc = 0.55 * h;
            vec![revolute(
                BoxShape::new(v(0.0, front - t / 2.0, zc), v(side, t, side)),
                v(0.0, 0.0, -1.0),
                v(-side / 2.0, front - t, 0.0),
                deg(90.0) * jitter(),
                v(0.45 * side, front - t, zc),
            )]
        }
        "fridge" => {
            let t = 0.05 * jitter();
            let dh = 0.65 * h;
            let zc = h - dh / 2.0;
            let drawer_h = 0.3 * h;
            let drawer_d = 0.8 * d;
            let drawer_c = v(0.0, front + drawer_d / 2.0, 0.17 * h);
            vec![
                revolute(
                    BoxShape::new(v(-w / 4.0, front - t / 2.0, zc), v(w / 2.0, t, dh)),
                    v(0.0, 0.0, -1.0),
                    v(-w / 2.0, front - t, 0.0),
                    deg(110.0) * jitter(),
                    v(-0.05 * w, front - t, zc),
                ),
                revolute(
                    BoxShape::new(v(w / 4.0, front - t / 2.0, zc), v(w / 2.0, t, dh)),
                    v(0.0, 0.0, 1.0),
                    v(w / 2.0, front - t, 0.0),
                    deg(110.0) * jitter(),
                    v(0.05 * w, front - t, zc),
                ),
                prismatic(
                    BoxShape::new(drawer_c, v(0.9 * w, drawer_d, drawer_h)),
                    v(0.0, -1.0, 0.0),
                    0.4 * jitter(),
                    v(0.0, front, drawer_c.z),
                ),
            ]
        }
        "drawer" => {
            let dd = 0.9 * d;
            let c = v(0.0, front + dd / 2.0, 0.5 * h);
            vec![prismatic(
                BoxShape::new(c, v(0.9 * w, dd, 0.7 * h)),
                v(0.0, -1.0, 0.0),
                0.35 * jitter(),
                v(0.0, front, c.z),
            )]
        }
        "box" => {
            let t = 0.005 * jitter();
            let z = h + t / 2.0;
            vec![
                revolute(
                    BoxShape::new(v(0.0, -d / 4.0, z), v(w, d / 2.0, t)),
                    v(1.0, 0.0, 0.0),
                    v(0.0, -d / 2.0, h),
                    deg(135.0) * jitter(),
                    v(0.0, -0.02 * d, h + t),
                ),
                revolute(
                    BoxShape::new(v(0.0, d / 4.0, z), v(w, d / 2.0, t)),
                    v(-1.0, 0.0, 0.0),
                    v(0.0, d / 2.0, h),
                    deg(135.0) * jitter(),
                    v(0.0, 0.02 * d, h + t),
                ),
            ]
        }
        "dishwasher" => {
            let t = 0.05 * jitter();
            let z0 = 0.1 * h;
            let dh = 0.85 * h;
            let rack_c = v(0.0, 0.0, 0.35 * h);
            vec![
                revolute(
                    BoxShape::new(v(0.0, front - t / 2.0, z0 + dh / 2.0), v(w, t, dh)),
                    v(1.0, 0.0, 0.0),
                    v(0.0, front - t, z0),
                    deg(90.0) * jitter(),
                    v(0.0, front - t, z0 + 0.95 * dh),
                ),
                prismatic(
                    BoxShape::new(rack_c, v(0.85 * w, 0.8 * d, 0.12 * h)),
                    v(0.0, -1.0, 0.0),
                    0.4 * jitter(),
                    v(0.0, -0.4 * d, rack_c.z),
                ),
            ]
        }
        "furniture" => {
            let t = 0.03 * jitter();
            let dh = 0.55 * h;
            let zc = h - dh / 2.0;
            let dd = 0.9 * d;
            let drawer_c = v(0.0, front + dd / 2.0, 0.2 * h);
            vec![
                revolute(
                    BoxShape::new(v(0.0, front - t / 2.0, zc), v(w, t, dh)),
                    v(0.0, 0.0, 1.0),
                    v(w / 2.0, front - t, 0.0),
                    deg(100.0) * jitter(),
                    v(-0.45 * w, front - t, zc),
                ),
                prismatic(
                    BoxShape::new(drawer_c, v(0.9 * w, dd, 0.3 * h)),
                    v(0.0, -1.0, 0.0),
                    0.3 * jitter(),
                    v(0.0, front, drawer_c.z),
                ),
            ]
        }
        _ => unreachable!(),
    };

    let tpl = ArticulatedTemplate {
        category: category.to_string(),
        base,
        links,
    };
    tpl.validate()?;
    Ok(tpl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use JointType::*;

    fn count(tpl: &ArticulatedTemplate, t: JointType) -> usize {
        tpl.links.iter().filter(|l| l.joint_type == t).count()
    }

    #[test]
    fn joint_inventories() {
        let m = make_template("microwave", 1).unwrap();
        assert_eq!(m.joint_types(), vec![Revolute]);
        let f = make_template("fridge", 1).unwrap();
        assert_eq!((count(&f, Revolute), count(&f, Prismatic)), (2, 1));
        let d = make_template("dishwasher", 1).unwrap();
        assert_eq!((count(&d, Revolute), count(&d, Prismatic)), (1, 1));
        assert_eq!(make_template("drawer", 1).unwrap().joint_types(), vec![Prismatic]);
    }

    #[test]
    fn unknown_category() {
        assert!(matches!(
            make_template("toaster", 0),
            Err(SynthError::UnknownCategory(_))
        ));
    }

    #[test]
    fn every_category_is_valid_across_seeds() {
        for c in CATEGORIES {
            for seed in 0..50 {
                let t = make_template(c, seed).unwrap();
                assert!(t.validate().is_ok());
                for e in t.base.extents.iter() {
                    assert!(*e > 0.0);
                }
            }
        }
    }

    #[test]
    fn jitter_stays_within_a_quarter_of_defaults() {
        for seed in 0..100 {
            let t = make_template("microwave", seed).unwrap();
            let e = t.base.extents;
            assert!(e.x >= 0.5 * 0.75 - 1e-12 && e.x <= 0.5 * 1.25 + 1e-12);
            let hi = t.links[0].range.1;
            assert!(hi >= 75f64.to_radians() - 1e-12 && hi <= 125f64.to_radians() + 1e-12);
        }
        assert_eq!(make_template("box", 9).unwrap(), make_template("box", 9).unwrap());
        assert_ne!(make_template("box", 9).unwrap(), make_template("box", 10).unwrap());
    }
}
