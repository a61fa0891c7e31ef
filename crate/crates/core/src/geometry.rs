//! Rigid-body geometry: transforms, least-squares registration and screw
//! decomposition of a single rigid step.

use nalgebra::{Matrix3, SymmetricEigen, Vector3, SVD};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Rotation angles at or below this are treated as pure translation.
pub const THETA_MIN: f64 = 1e-6;
/// Translations at or below this (meters) count as no translation.
pub const TRANSLATION_MIN: f64 = 1e-9;

const CANON_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    /// Fewer than three points, or all points collinear.
    #[error("degenerate point configuration: need at least 3 non-collinear points")]
    DegenerateConfiguration,
    /// Neither rotation nor translation above the decomposition floor.
    #[error("null motion: transform is the identity within tolerance")]
    NullMotion,
}

/// A proper rigid motion `p -> R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidTransform {
    pub fn new(rotation: Mat3, translation: Vec3) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Mat3::identity(), Vec3::zeros())
    }

    pub fn from_translation(translation: Vec3) -> Self {
        Self::new(Mat3::identity(), translation)
    }

    pub fn from_rotation(rotation: Mat3) -> Self {
        Self::new(rotation, Vec3::zeros())
    }

    #[inline]
    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    #[inline]
    pub fn apply_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform::new(
            self.rotation * other.rotation,
            self.rotation * other.translation + self.translation,
        )
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = self.rotation.transpose();
        RigidTransform::new(rt, -(rt * self.translation))
    }

    /// True when the rotation is proper orthogonal within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let orth = (self.rotation * self.rotation.transpose() - Mat3::identity()).abs().max();
        orth <= tol
            && (self.rotation.determinant() - 1.0).abs() <= tol
            && self.translation.iter().all(|v| v.is_finite())
    }

    /// Row-major rotation entries.
    pub fn rotation_row_major(&self) -> [f64; 9] {
        let r = &self.rotation;
        [
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
        ]
    }

    pub fn from_row_major(rotation: [f64; 9], translation: [f64; 3]) -> Self {
        Self::new(
            Mat3::from_row_slice(&rotation),
            Vec3::new(translation[0], translation[1], translation[2]),
        )
    }
}

/// Wire form shared by OKSM contact poses, camera poses and plan waypoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseDoc {
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
}

impl From<&RigidTransform> for PoseDoc {
    fn from(t: &RigidTransform) -> Self {
        PoseDoc {
            rotation: t.rotation_row_major(),
            translation: [t.translation.x, t.translation.y, t.translation.z],
        }
    }
}

impl From<&PoseDoc> for RigidTransform {
    fn from(d: &PoseDoc) -> Self {
        RigidTransform::from_row_major(d.rotation, d.translation)
    }
}

/// Screw decomposition of one rigid step: rotation by `angle` about the line
/// through `point` along `direction`, plus `slide` along `direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrewParams {
    pub direction: Vec3,
    /// Point on the axis closest to the origin.
    pub point: Vec3,
    pub angle: f64,
    pub slide: f64,
}

pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Rodrigues rotation by a signed `angle` about unit `axis`.
pub fn rotation_about(axis: &Vec3, angle: f64) -> Mat3 {
    let k = skew(axis);
    Mat3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

/// Flip `d` so its first component with magnitude above 1e-9 is positive.
/// Returns the canonical vector and whether a flip happened.
pub fn canonicalize_direction(d: &Vec3) -> (Vec3, bool) {
    match d.iter().find(|c| c.abs() > CANON_EPS) {
        // Adding 0.0 turns negated zeros into +0.0.
        Some(c) if *c < 0.0 => (-d + Vec3::zeros(), true),
        _ => (*d, false),
    }
}

/// Point on the line (`direction`, `point`) closest to the origin.
pub fn min_norm_point(direction: &Vec3, point: &Vec3) -> Vec3 {
    let d = direction.normalize();
    point - d * d.dot(point)
}

pub fn apply_transform(t: &RigidTransform, pts: &[Vec3]) -> Vec<Vec3> {
    pts.iter().map(|p| t.apply(p)).collect()
}

pub fn centroid(pts: &[Vec3]) -> Vec3 {
    if pts.is_empty() {
        return Vec3::zeros();
    }
    pts.iter().fold(Vec3::zeros(), |acc, p| acc + p) / pts.len() as f64
}

/// Least-squares rigid transform mapping `src` onto `dst` (Kabsch).
///
/// Reflections are excluded by flipping the singular vector paired with the
/// smallest singular value when `det(V Uᵀ) < 0`.
pub fn kabsch_fit(src: &[Vec3], dst: &[Vec3]) -> Result<RigidTransform, GeometryError> {
    if src.len() != dst.len() || src.len() < 3 {
        return Err(GeometryError::DegenerateConfiguration);
    }
    let cs = centroid(src);
    let cd = centroid(dst);

    let mut scatter = Mat3::zeros();
    let mut cov = Mat3::zeros();
    for (s, d) in src.iter().zip(dst) {
        let a = s - cs;
        let b = d - cd;
        scatter += a * a.transpose();
        cov += a * b.transpose();
    }

    let mut eig = SymmetricEigen::new(scatter).eigenvalues;
    eig.as_mut_slice()
        .sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    if eig[0].is_nan() || eig[0] <= 0.0 || eig[1] <= 1e-12 * eig[0] {
        return Err(GeometryError::DegenerateConfiguration);
    }

    let svd = SVD::new(cov, true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(GeometryError::DegenerateConfiguration),
    };
    let v = v_t.transpose();
    let mut correction = Mat3::identity();
    // nalgebra sorts singular values in descending order; index 2 is the smallest.
    if (v * u.transpose()).determinant() < 0.0 {
        correction[(2, 2)] = -1.0;
    }
    let rotation = v * correction * u.transpose();
    let translation = cd - rotation * cs;
    Ok(RigidTransform::new(rotation, translation))
}

/// Decompose a rigid transform into its screw parameters.
pub fn screw_from_transform(t: &RigidTransform) -> Result<ScrewParams, GeometryError> {
    let r = &t.rotation;
    let w = Vec3::new(
        r[(2, 1)] - r[(1, 2)],
        r[(0, 2)] - r[(2, 0)],
        r[(1, 0)] - r[(0, 1)],
    ) * 0.5;
    let cos = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let sin = w.norm();
    let angle = sin.atan2(cos).clamp(0.0, std::f64::consts::PI);

    if angle <= THETA_MIN {
        let len = t.translation.norm();
        if len <= TRANSLATION_MIN {
            return Err(GeometryError::NullMotion);
        }
        return Ok(ScrewParams {
            direction: t.translation / len,
            point: Vec3::zeros(),
            angle: 0.0,
            slide: len,
        });
    }

    let direction = if angle < 0.75 * std::f64::consts::PI {
        w / sin
    } else {
        // Skew part vanishes near pi; use kkᵀ = (sym(R) - cos I) / (1 - cos).
        let sym = (r + r.transpose()) * 0.5;
        let kkt = (sym - Mat3::identity() * cos) / (1.0 - cos);
        let i = (0..3)
            .max_by(|&a, &b| kkt[(a, a)].partial_cmp(&kkt[(b, b)]).unwrap())
            .unwrap();
        let k = kkt.column(i) / kkt[(i, i)].sqrt();
        let k = k.normalize();
        if k.dot(&w) < 0.0 {
            -k
        } else {
            k
        }
    };

    let slide = direction.dot(&t.translation);
    let t_perp = t.translation - direction * slide;
    // Minimum-norm solution of (I - R) p = t_perp with p ⟂ direction.
    let cot_half = 1.0 / (0.5 * angle).tan();
    let point = (t_perp + direction.cross(&t_perp) * cot_half) * 0.5;
    let point = point - direction * direction.dot(&point);

    Ok(ScrewParams {
        direction,
        point,
        angle,
        slide,
    })
}

/// Rigid transform realising a screw: points on the axis move only by
/// `slide · direction`. Accepts signed angles.
pub fn transform_from_screw(s: &ScrewParams) -> RigidTransform {
    let d = s.direction.normalize();
    let rotation = rotation_about(&d, s.angle);
    let translation = (Mat3::identity() - rotation) * s.point + d * s.slide;
    RigidTransform::new(rotation, translation)
}

/// Shortest distance from `p` to the infinite line (`direction`, `point`).
pub fn point_line_distance(p: &Vec3, direction: &Vec3, point: &Vec3) -> f64 {
    let d = direction.normalize();
    let v = p - point;
    (v - d * d.dot(&v)).norm()
}

/// Minimum distance between two infinite lines.
pub fn line_line_distance(d1: &Vec3, p1: &Vec3, d2: &Vec3, p2: &Vec3) -> f64 {
    let a = d1.normalize();
    let b = d2.normalize();
    let n = a.cross(&b);
    let nn = n.norm();
    let w = p2 - p1;
    // sin of the angle between lines; below this treat them as parallel.
    if nn < 1e-9 {
        return (w - a * a.dot(&w)).norm();
    }
    (w.dot(&n) / nn).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_unit(rng: &mut impl Rng) -> Vec3 {
        loop {
            let v = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                return v / n;
            }
        }
    }

    #[test]
    fn apply_identity_rotation_and_translation() {
        let p = [Vec3::new(1.0, 2.0, 3.0)];
        assert_eq!(apply_transform(&RigidTransform::identity(), &p), p.to_vec());

        let rz = RigidTransform::from_rotation(rotation_about(&Vec3::z(), PI / 2.0));
        let out = apply_transform(&rz, &[Vec3::x()]);
        assert!((out[0] - Vec3::y()).norm() < 1e-15);

        let tz = RigidTransform::from_translation(Vec3::new(0.0, 0.0, 0.05));
        assert_eq!(
            apply_transform(&tz, &[Vec3::zeros()])[0],
            Vec3::new(0.0, 0.0, 0.05)
        );
    }

    #[test]
    fn kabsch_identity_on_equal_sets() {
        let pts = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        let t = kabsch_fit(&pts, &pts).unwrap();
        assert!((t.rotation - Mat3::identity()).abs().max() < 1e-12);
        assert!(t.translation.norm() < 1e-12);
    }

    #[test]
    fn kabsch_rejects_collinear_and_short_inputs() {
        let line: Vec<Vec3> = (0..10).map(|i| Vec3::new(i as f64, 2.0 * i as f64, 0.5)).collect();
        assert_eq!(
            kabsch_fit(&line, &line),
            Err(GeometryError::DegenerateConfiguration)
        );
        let two = vec![Vec3::zeros(), Vec3::x()];
        assert_eq!(
            kabsch_fit(&two, &two),
            Err(GeometryError::DegenerateConfiguration)
        );
        let three = vec![Vec3::zeros(), Vec3::x(), Vec3::y()];
        assert_eq!(
            kabsch_fit(&three, &three[..2]),
            Err(GeometryError::DegenerateConfiguration)
        );
    }

    #[test]
    fn kabsch_recovers_known_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let truth = RigidTransform::new(
            rotation_about(&random_unit(&mut rng), 1.1),
            Vec3::new(0.3, -0.2, 1.5),
        );
        let src: Vec<Vec3> = (0..50)
            .map(|_| Vec3::new(rng.random(), rng.random(), rng.random()))
            .collect();
        let dst = apply_transform(&truth, &src);
        let t = kabsch_fit(&src, &dst).unwrap();
        assert!((t.rotation - truth.rotation).abs().max() < 1e-9);
        assert!((t.translation - truth.translation).norm() < 1e-9);
    }

    #[test]
    fn screw_pure_translation() {
        let t = RigidTransform::from_translation(Vec3::new(0.01, 0.0, 0.0));
        let s = screw_from_transform(&t).unwrap();
        assert_eq!(s.angle, 0.0);
        assert!((s.direction - Vec3::x()).norm() < 1e-15);
        assert!((s.slide - 0.01).abs() < 1e-15);
        assert_eq!(s.point, Vec3::zeros());
    }

    #[test]
    fn screw_null_motion_is_an_error() {
        assert_eq!(
            screw_from_transform(&RigidTransform::identity()),
            Err(GeometryError::NullMotion)
        );
    }

    #[test]
    fn screw_offset_revolute_round_trip() {
        let screw = ScrewParams {
            direction: Vec3::z(),
            point: Vec3::new(1.0, 0.0, 0.0),
            angle: 30f64.to_radians(),
            slide: 0.0,
        };
        let s = screw_from_transform(&transform_from_screw(&screw)).unwrap();
        assert!((s.angle - 30f64.to_radians()).abs() < 1e-12);
        assert!((s.direction - Vec3::z()).norm() < 1e-12);
        assert!(point_line_distance(&s.point, &Vec3::z(), &Vec3::x()) < 1e-9);
        assert!(s.slide.abs() < 1e-12);
    }

    #[test]
    fn screw_helical_round_trip() {
        let screw = ScrewParams {
            direction: Vec3::y(),
            point: Vec3::zeros(),
            angle: 10f64.to_radians(),
            slide: 0.02,
        };
        let s = screw_from_transform(&transform_from_screw(&screw)).unwrap();
        assert!((s.angle - 10f64.to_radians()).abs() < 1e-12);
        assert!((s.slide - 0.02).abs() < 1e-12);
    }

    #[test]
    fn screw_near_pi_uses_symmetric_part() {
        let d = Vec3::new(1.0, 2.0, -2.0).normalize();
        let screw = ScrewParams {
            direction: d,
            point: min_norm_point(&d, &Vec3::new(0.2, 0.1, 0.3)),
            angle: PI - 1e-4,
            slide: -0.1,
        };
        let s = screw_from_transform(&transform_from_screw(&screw)).unwrap();
        assert!((s.direction - d).norm() < 1e-9);
        assert!((s.point - screw.point).norm() < 1e-9);
        assert!((s.angle - screw.angle).abs() < 1e-9);
        assert!((s.slide - screw.slide).abs() < 1e-9);
    }

    #[test]
    fn transform_from_null_and_prismatic_screws() {
        let id = transform_from_screw(&ScrewParams {
            direction: Vec3::x(),
            point: Vec3::zeros(),
            angle: 0.0,
            slide: 0.0,
        });
        assert_eq!(id, RigidTransform::identity());
        let t = transform_from_screw(&ScrewParams {
            direction: Vec3::x(),
            point: Vec3::zeros(),
            angle: 0.0,
            slide: 0.03,
        });
        assert_eq!(t.rotation, Mat3::identity());
        assert!((t.translation - Vec3::new(0.03, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn canonicalization_is_sign_invariant() {
        let d = Vec3::new(-0.0, -0.6, 0.8);
        let (a, flipped) = canonicalize_direction(&d);
        assert!(flipped);
        assert_eq!(canonicalize_direction(&-d).0, a);
        assert_eq!(canonicalize_direction(&a).0, a);
        assert!(a.y > 0.0);
    }

    #[test]
    fn line_distances() {
        assert!((line_line_distance(&Vec3::z(), &Vec3::zeros(), &Vec3::z(), &Vec3::new(0.0, 0.1, 0.0)) - 0.1).abs() < 1e-15);
        assert!((line_line_distance(&Vec3::z(), &Vec3::zeros(), &Vec3::x(), &Vec3::new(0.0, 0.0, 0.07)) - 0.0).abs() < 1e-15);
        assert!((line_line_distance(&Vec3::z(), &Vec3::zeros(), &Vec3::x(), &Vec3::new(0.0, 0.07, 0.0)) - 0.07).abs() < 1e-15);
    }
}
