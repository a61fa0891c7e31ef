//! Geometric OKSM estimation from a demonstration.
//!
//! The pipeline segments the points into rigid links, registers each link
//! between consecutive frames with known correspondences, decomposes every
//! step into a screw, then classifies and fits one joint per moving link.
//! Joints are ordered by the frame at which their motion starts.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    centroid, kabsch_fit, min_norm_point, point_line_distance, screw_from_transform,
    GeometryError, Mat3, RigidTransform, ScrewParams, Vec3,
};
use crate::model::{JointNode, JointType, Oksm};
use crate::synth::DemoSequence;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Per-step rotation that counts as motion (radians).
    pub onset_angle: f64,
    /// Per-step translation that counts as motion (meters).
    pub onset_slide: f64,
    /// Net point displacement that marks a point as moving (meters).
    pub move_threshold: f64,
    /// Cosine distance below which two motion trajectories join a cluster.
    pub cluster_distance: f64,
    /// Below this total rotation a joint cannot be revolute (radians).
    pub revolute_floor: f64,
    /// Below this total translation (and the rotation floor) the joint is ambiguous.
    pub slide_floor: f64,
    /// Motion clusters smaller than this are folded into the base.
    pub min_cluster_points: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            onset_angle: 0.5f64.to_radians(),
            onset_slide: 0.002,
            move_threshold: 0.005,
            cluster_distance: 0.2,
            revolute_floor: 3f64.to_radians(),
            slide_floor: 0.005,
            min_cluster_points: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentMode {
    /// Use the per-point link labels.
    Labeled,
    /// Cluster points by their motion.
    Motion,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("no motion detected in the demonstration")]
    NoMotionDetected,
    #[error("link {link}: joint type is ambiguous (motion below both floors)")]
    AmbiguousJoint { link: u32 },
    #[error("link {link}: {source}")]
    Degenerate { link: u32, source: GeometryError },
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkGroup {
    pub link_id: u32,
    /// Sorted ascending.
    pub corr_ids: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub base: Vec<u32>,
    pub links: Vec<LinkGroup>,
}

/// Points of the sequence addressed by correspondence id.
struct PointIndex(HashMap<u32, usize>);

impl PointIndex {
    fn new(seq: &DemoSequence) -> Result<Self, EstimateError> {
        if seq.corr_ids.len() != seq.labels.len()
            || seq.frames.iter().any(|f| f.len() != seq.labels.len())
        {
            return Err(EstimateError::InvalidSequence(
                "frame sizes disagree with labels".into(),
            ));
        }
        if seq.frames.len() < 2 {
            return Err(EstimateError::InvalidSequence("need at least 2 frames".into()));
        }
        let map: HashMap<u32, usize> = seq.corr_ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        if map.len() != seq.corr_ids.len() {
            return Err(EstimateError::InvalidSequence("duplicate corr_ids".into()));
        }
        Ok(PointIndex(map))
    }

    fn gather(&self, frame: &[Vec3], ids: &[u32]) -> Vec<Vec3> {
        ids.iter().map(|c| frame[self.0[c]]).collect()
    }
}

pub fn segment_links(
    seq: &DemoSequence,
    mode: SegmentMode,
    cfg: &EstimatorConfig,
) -> Result<Segmentation, EstimateError> {
    PointIndex::new(seq)?;
    let mut order: Vec<usize> = (0..seq.corr_ids.len()).collect();
    order.sort_by_key(|&i| seq.corr_ids[i]);

    match mode {
        SegmentMode::Labeled => {
            let mut groups: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
            for &i in &order {
                groups.entry(seq.labels[i]).or_default().push(seq.corr_ids[i]);
            }
            let base = groups.remove(&0).unwrap_or_default();
            Ok(Segmentation {
                base,
                links: groups
                    .into_iter()
                    .map(|(link_id, corr_ids)| LinkGroup { link_id, corr_ids })
                    .collect(),
            })
        }
        SegmentMode::Motion => segment_by_motion(seq, &order, cfg),
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn segment_by_motion(
    seq: &DemoSequence,
    order: &[usize],
    cfg: &EstimatorConfig,
) -> Result<Segmentation, EstimateError> {
    let frames = &seq.frames;
    let t = frames.len();
    let mut base = Vec::new();
    let mut movers = Vec::new();
    let mut features: Vec<Vec<f64>> = Vec::new();
    for &i in order {
        let x0 = frames[0][i];
        let net = (1..t).map(|f| (frames[f][i] - x0).norm()).fold(0.0, f64::max);
        if net > cfg.move_threshold {
            let mut feat: Vec<f64> = (0..t - 1)
                .flat_map(|f| {
                    let d = frames[f + 1][i] - frames[f][i];
                    [d.x, d.y, d.z]
                })
                .collect();
            let norm = feat.iter().map(|v| v * v).sum::<f64>().sqrt();
            feat.iter_mut().for_each(|v| *v /= norm);
            movers.push(seq.corr_ids[i]);
            features.push(feat);
        } else {
            base.push(seq.corr_ids[i]);
        }
    }
    if movers.is_empty() {
        return Err(EstimateError::NoMotionDetected);
    }

    // Single-linkage agglomeration at a fixed cosine-distance cut.
    let m = movers.len();
    let mut parent: Vec<usize> = (0..m).collect();
    for a in 0..m {
        for b in a + 1..m {
            let cos: f64 = features[a].iter().zip(&features[b]).map(|(x, y)| x * y).sum();
            if 1.0 - cos < cfg.cluster_distance {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut clusters: std::collections::BTreeMap<usize, Vec<u32>> = Default::default();
    for (k, &c) in movers.iter().enumerate() {
        let root = find(&mut parent, k);
        clusters.entry(root).or_default().push(c);
    }
    let mut links = Vec::new();
    for ids in clusters.into_values() {
        if ids.len() < cfg.min_cluster_points {
            base.extend(ids);
        } else {
            links.push(ids);
        }
    }
    if links.is_empty() {
        return Err(EstimateError::NoMotionDetected);
    }
    base.sort_unstable();
    links.sort_by_key(|ids| ids[0]);
    Ok(Segmentation {
        base,
        links: links
            .into_iter()
            .enumerate()
            .map(|(k, corr_ids)| LinkGroup {
                link_id: k as u32 + 1,
                corr_ids,
            })
            .collect(),
    })
}

/// Per-link registration results across the sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTrack {
    pub link_id: u32,
    /// One per frame transition (T - 1).
    pub transforms: Vec<RigidTransform>,
    /// `None` for null-motion steps.
    pub screws: Vec<Option<ScrewParams>>,
    /// Displacement of the group centroid per transition.
    pub centroid_steps: Vec<Vec3>,
    /// Group points in the first frame.
    pub rest_points: Vec<Vec3>,
    /// First transition with significant motion.
    pub onset_frame: Option<usize>,
    /// RMS point displacement in the onset transition.
    pub onset_magnitude: f64,
    pub config: EstimatorConfig,
}

impl LinkTrack {
    /// Rotation of step `k` if it clears the onset threshold.
    pub fn significant_angle(&self, k: usize) -> f64 {
        match &self.screws[k] {
            Some(s) if s.angle > self.config.onset_angle => s.angle,
            _ => 0.0,
        }
    }

    /// Translation of step `k`: the screw slide for rotating steps, the
    /// centroid displacement otherwise.
    pub fn step_slide(&self, k: usize) -> f64 {
        match &self.screws[k] {
            Some(s) if s.angle > self.config.onset_angle => s.slide.abs(),
            _ => self.centroid_steps[k].norm(),
        }
    }

    pub fn is_moving(&self, k: usize) -> bool {
        self.significant_angle(k) > 0.0 || self.step_slide(k) > self.config.onset_slide
    }

    pub fn moving_steps(&self) -> Vec<usize> {
        (0..self.transforms.len()).filter(|&k| self.is_moving(k)).collect()
    }

    pub fn total_angle(&self) -> f64 {
        self.moving_steps().iter().map(|&k| self.significant_angle(k)).sum()
    }

    pub fn total_slide(&self) -> f64 {
        self.moving_steps().iter().map(|&k| self.step_slide(k)).sum()
    }
}

pub fn track_link(
    seq: &DemoSequence,
    group: &LinkGroup,
    cfg: &EstimatorConfig,
) -> Result<LinkTrack, EstimateError> {
    let index = PointIndex::new(seq)?;
    let degenerate = |source| EstimateError::Degenerate {
        link: group.link_id,
        source,
    };
    let mut ids = group.corr_ids.clone();
    ids.sort_unstable();
    let clouds: Vec<Vec<Vec3>> = seq.frames.iter().map(|f| index.gather(f, &ids)).collect();

    let mut transforms = Vec::with_capacity(clouds.len() - 1);
    let mut screws = Vec::with_capacity(clouds.len() - 1);
    let mut centroid_steps = Vec::with_capacity(clouds.len() - 1);
    for pair in clouds.windows(2) {
        let t = kabsch_fit(&pair[0], &pair[1]).map_err(degenerate)?;
        let screw = match screw_from_transform(&t) {
            Ok(s) => Some(s),
            Err(GeometryError::NullMotion) => None,
            Err(e) => return Err(degenerate(e)),
        };
        transforms.push(t);
        screws.push(screw);
        centroid_steps.push(centroid(&pair[1]) - centroid(&pair[0]));
    }

    let mut track = LinkTrack {
        link_id: group.link_id,
        transforms,
        screws,
        centroid_steps,
        rest_points: clouds[0].clone(),
        onset_frame: None,
        onset_magnitude: 0.0,
        config: *cfg,
    };
    track.onset_frame = (0..track.transforms.len()).find(|&k| track.is_moving(k));
    if let Some(k) = track.onset_frame {
        let ms: f64 = clouds[k]
            .iter()
            .zip(&clouds[k + 1])
            .map(|(a, b)| (b - a).norm_squared())
            .sum::<f64>()
            / ids.len() as f64;
        track.onset_magnitude = ms.sqrt();
    }
    Ok(track)
}

/// Joint axis, reference point and per-frame states fitted to a track.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFit {
    pub direction: Vec3,
    pub position: Vec3,
    pub states: Vec<f64>,
}

fn revolute_axis(track: &LinkTrack) -> Option<(Vec3, Vec3)> {
    let steps: Vec<(f64, &ScrewParams)> = track
        .moving_steps()
        .into_iter()
        .filter_map(|k| {
            let a = track.significant_angle(k);
            (a > 0.0).then(|| (a, track.screws[k].as_ref().unwrap()))
        })
        .collect();
    let reference = steps.first()?.1.direction;
    let sum = steps.iter().fold(Vec3::zeros(), |acc, (a, s)| {
        acc + s.direction * (*a * s.direction.dot(&reference).signum())
    });
    let (direction, _) = crate::geometry::canonicalize_direction(&sum.normalize());

    // Least-squares meeting point of the step axes, restricted to the plane
    // through the origin orthogonal to the fitted direction.
    let mut a = Mat3::zeros();
    let mut b = Vec3::zeros();
    for (angle, s) in &steps {
        let w = angle * angle;
        let proj = Mat3::identity() - s.direction * s.direction.transpose();
        a += proj * w;
        b += proj * s.point * w;
    }
    let u = direction.cross(&if direction.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() }).normalize();
    let v = direction.cross(&u);
    let m = nalgebra::Matrix2::new(
        u.dot(&(a * u)) + 1e-12,
        u.dot(&(a * v)),
        v.dot(&(a * u)),
        v.dot(&(a * v)) + 1e-12,
    );
    let rhs = nalgebra::Vector2::new(u.dot(&b), v.dot(&b));
    let xy = m.lu().solve(&rhs)?;
    let position = min_norm_point(&direction, &(u * xy.x + v * xy.y));
    Some((direction, position))
}

pub fn classify_joint(track: &LinkTrack) -> Result<JointType, EstimateError> {
    if track.moving_steps().is_empty() {
        return Err(EstimateError::NoMotionDetected);
    }
    let cfg = &track.config;
    let total_angle = track.total_angle();
    let total_slide = track.total_slide();
    if total_angle <= cfg.revolute_floor {
        if total_slide <= cfg.slide_floor {
            return Err(EstimateError::AmbiguousJoint {
                link: track.link_id,
            });
        }
        return Ok(JointType::Prismatic);
    }
    let (direction, position) = revolute_axis(track).ok_or(EstimateError::AmbiguousJoint {
        link: track.link_id,
    })?;
    let lever = track
        .rest_points
        .iter()
        .map(|p| point_line_distance(p, &direction, &position))
        .sum::<f64>()
        / track.rest_points.len() as f64;
    if total_angle * lever >= total_slide {
        Ok(JointType::Revolute)
    } else {
        Ok(JointType::Prismatic)
    }
}

pub fn fit_joint(track: &LinkTrack, joint_type: JointType) -> Result<JointFit, EstimateError> {
    let ambiguous = EstimateError::AmbiguousJoint {
        link: track.link_id,
    };
    let mut states = Vec::with_capacity(track.transforms.len() + 1);
    states.push(0.0);
    match joint_type {
        JointType::Revolute => {
            let (direction, position) = revolute_axis(track).ok_or(ambiguous)?;
            for s in &track.screws {
                let inc = match s {
                    Some(s) if s.angle > 0.0 => s.angle * s.direction.dot(&direction).signum(),
                    _ => 0.0,
                };
                states.push(states.last().unwrap() + inc);
            }
            Ok(JointFit {
                direction,
                position,
                states,
            })
        }
        JointType::Prismatic => {
            let moving = track.moving_steps();
            let reference = *track.centroid_steps.get(*moving.first().ok_or(ambiguous)?).unwrap();
            let sum = moving.iter().fold(Vec3::zeros(), |acc, &k| {
                let c = track.centroid_steps[k];
                acc + c * c.dot(&reference).signum()
            });
            let (direction, _) = crate::geometry::canonicalize_direction(&sum.normalize());
            for c in &track.centroid_steps {
                states.push(states.last().unwrap() + c.dot(&direction));
            }
            Ok(JointFit {
                direction,
                position: centroid(&track.rest_points),
                states,
            })
        }
    }
}

/// Full pipeline: segment, track, classify and fit each moving link; nodes
/// are ordered by onset frame, then larger onset motion, then link id.
pub fn estimate_oksm(
    seq: &DemoSequence,
    mode: SegmentMode,
    cfg: &EstimatorConfig,
) -> Result<Oksm, EstimateError> {
    let seg = segment_links(seq, mode, cfg)?;
    let mut found = Vec::new();
    for group in &seg.links {
        let track = track_link(seq, group, cfg)?;
        let Some(onset) = track.onset_frame else {
            continue;
        };
        let joint_type = classify_joint(&track)?;
        let fit = fit_joint(&track, joint_type)?;
        found.push((onset, track.onset_magnitude, group.link_id, joint_type, fit));
    }
    if found.is_empty() {
        return Err(EstimateError::NoMotionDetected);
    }
    found.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(b.1.total_cmp(&a.1))
            .then(a.2.cmp(&b.2))
    });
    let nodes = found
        .into_iter()
        .map(|(_, _, _, joint_type, fit)| JointNode {
            joint_type,
            direction: fit.direction,
            position: fit.position,
            states: fit.states,
            contact_pose: None,
        })
        .collect();
    Ok(Oksm { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rotation_about, transform_from_screw};
    use crate::synth::{make_template, render_sequence, Actuation, MotionScript, RenderParams};

    fn noiseless(seed: u64) -> RenderParams {
        RenderParams {
            points_per_link: 200,
            noise_sigma: 0.0,
            camera_seed: seed,
            rng_seed: seed,
        }
    }

    fn single(category: &str, start: usize, end: usize, target: f64) -> DemoSequence {
        let tpl = make_template(category, 5).unwrap();
        let script = MotionScript {
            order: vec![0],
            actuations: vec![Actuation { start, end, target }],
            frames: 12,
        };
        render_sequence(&tpl, &script, &noiseless(5)).unwrap()
    }

    /// Synthetic track built from explicit per-step transforms of a point set.
    fn track_from_steps(steps: &[RigidTransform]) -> LinkTrack {
        let mut pts: Vec<Vec3> = (0..40)
            .map(|i| {
                let f = i as f64;
                Vec3::new(0.3 + 0.01 * (f % 7.0), 0.02 * (f % 5.0), 0.05 * (f % 3.0))
            })
            .collect();
        let mut frames = vec![pts.clone()];
        for s in steps {
            pts = pts.iter().map(|p| s.apply(p)).collect();
            frames.push(pts.clone());
        }
        let n = frames[0].len();
        let seq = DemoSequence {
            frames,
            labels: vec![1; n],
            corr_ids: (0..n as u32).collect(),
            camera_pose: RigidTransform::identity(),
            ground_truth: Oksm { nodes: vec![] },
        };
        let group = LinkGroup {
            link_id: 1,
            corr_ids: (0..n as u32).collect(),
        };
        track_link(&seq, &group, &EstimatorConfig::default()).unwrap()
    }

    #[test]
    fn labeled_and_motion_partitions_agree_on_a_drawer() {
        let seq = single("drawer", 2, 10, 0.2);
        let cfg = EstimatorConfig::default();
        let labeled = segment_links(&seq, SegmentMode::Labeled, &cfg).unwrap();
        assert_eq!(labeled.links.len(), 1);
        assert_eq!(labeled.base.len(), 200);
        let motion = segment_links(&seq, SegmentMode::Motion, &cfg).unwrap();
        assert_eq!(motion, labeled);
    }

    #[test]
    fn static_sequence_has_no_motion() {
        let tpl = make_template("microwave", 1).unwrap();
        let seq = render_sequence(&tpl, &MotionScript::still(&tpl, 12), &noiseless(1)).unwrap();
        let cfg = EstimatorConfig::default();
        assert_eq!(
            segment_links(&seq, SegmentMode::Motion, &cfg),
            Err(EstimateError::NoMotionDetected)
        );
        assert_eq!(
            estimate_oksm(&seq, SegmentMode::Labeled, &cfg),
            Err(EstimateError::NoMotionDetected)
        );
        let seg = segment_links(&seq, SegmentMode::Labeled, &cfg).unwrap();
        let track = track_link(&seq, &seg.links[0], &cfg).unwrap();
        assert_eq!(track.onset_frame, None);
        assert!(track.screws.iter().all(Option::is_none));
    }

    #[test]
    fn door_steps_and_onset() {
        // 30 degrees over 6 transitions.
        let seq = single("microwave", 3, 9, 30f64.to_radians());
        let cfg = EstimatorConfig::default();
        let seg = segment_links(&seq, SegmentMode::Labeled, &cfg).unwrap();
        let track = track_link(&seq, &seg.links[0], &cfg).unwrap();
        assert_eq!(track.transforms.len(), 11);
        assert_eq!(track.onset_frame, Some(3));
        for k in 3..9 {
            assert!((track.screws[k].unwrap().angle - 5f64.to_radians()).abs() < 1e-9);
        }
        assert_eq!(classify_joint(&track), Ok(JointType::Revolute));
    }

    #[test]
    fn drawer_onset_type_and_final_state() {
        let seq = single("drawer", 4, 8, 0.2);
        let cfg = EstimatorConfig::default();
        let seg = segment_links(&seq, SegmentMode::Labeled, &cfg).unwrap();
        let track = track_link(&seq, &seg.links[0], &cfg).unwrap();
        assert_eq!(track.onset_frame, Some(4));
        assert_eq!(classify_joint(&track), Ok(JointType::Prismatic));
        let fit = fit_joint(&track, JointType::Prismatic).unwrap();
        assert!((fit.states.last().unwrap().abs() - 0.2).abs() < 1e-6);
        assert_eq!(fit.states.len(), 12);
        assert_eq!(fit.states[0], 0.0);
    }

    #[test]
    fn small_helical_step_is_ambiguous() {
        let step = transform_from_screw(&ScrewParams {
            direction: Vec3::z(),
            point: Vec3::zeros(),
            angle: 1f64.to_radians(),
            slide: 0.001,
        });
        let track = track_from_steps(&[step]);
        assert_eq!(
            classify_joint(&track),
            Err(EstimateError::AmbiguousJoint { link: 1 })
        );
    }

    #[test]
    fn single_step_states() {
        let step = RigidTransform::from_rotation(rotation_about(&Vec3::z(), 5f64.to_radians()));
        let track = track_from_steps(&[step]);
        let fit = fit_joint(&track, JointType::Revolute).unwrap();
        assert_eq!(fit.states.len(), 2);
        assert_eq!(fit.states[0], 0.0);
        assert!((fit.states[1] - 5f64.to_radians()).abs() < 1e-12);
        assert!((fit.direction - Vec3::z()).norm() < 1e-12);
        assert!(fit.position.norm() < 1e-9);
    }

    #[test]
    fn fridge_door_axis_recovery() {
        let tpl = make_template("fridge", 2).unwrap();
        let script = MotionScript {
            order: vec![0, 1, 2],
            actuations: vec![
                Actuation { start: 0, end: 3, target: 1.2 },
                Actuation { start: 4, end: 7, target: 1.0 },
                Actuation { start: 7, end: 11, target: 0.3 },
            ],
            frames: 12,
        };
        let seq = render_sequence(&tpl, &script, &noiseless(2)).unwrap();
        let est = estimate_oksm(&seq, SegmentMode::Labeled, &EstimatorConfig::default()).unwrap();
        assert_eq!(est.nodes.len(), 3);
        for (e, g) in est.nodes.iter().zip(&seq.ground_truth.nodes) {
            assert_eq!(e.joint_type, g.joint_type);
            assert!(e.direction.dot(&g.direction).abs().min(1.0).acos().to_degrees() < 0.1);
            assert!((e.final_state() - g.final_state()).abs() < 1e-4);
        }
        let door = &est.nodes[0];
        let gt = &seq.ground_truth.nodes[0];
        assert!(point_line_distance(&door.position, &gt.direction, &gt.position) < 1e-3);
    }

    #[test]
    fn node_order_follows_windows_not_labels() {
        let tpl = make_template("dishwasher", 4).unwrap();
        let script = MotionScript {
            order: vec![1, 0],
            actuations: vec![
                Actuation { start: 6, end: 10, target: 1.0 },
                Actuation { start: 2, end: 5, target: 0.25 },
            ],
            frames: 12,
        };
        let seq = render_sequence(&tpl, &script, &noiseless(4)).unwrap();
        let est = estimate_oksm(&seq, SegmentMode::Labeled, &EstimatorConfig::default()).unwrap();
        assert_eq!(
            est.nodes.iter().map(|n| n.joint_type).collect::<Vec<_>>(),
            vec![JointType::Prismatic, JointType::Revolute]
        );
    }

    #[test]
    fn motion_mode_matches_labeled_on_multi_link_objects() {
        let tpl = make_template("fridge", 6).unwrap();
        let script = MotionScript {
            order: vec![2, 0, 1],
            actuations: vec![
                Actuation { start: 4, end: 7, target: 1.4 },
                Actuation { start: 8, end: 11, target: 1.3 },
                Actuation { start: 0, end: 3, target: 0.3 },
            ],
            frames: 12,
        };
        let seq = render_sequence(&tpl, &script, &noiseless(6)).unwrap();
        let cfg = EstimatorConfig::default();
        let a = estimate_oksm(&seq, SegmentMode::Labeled, &cfg).unwrap();
        let b = estimate_oksm(&seq, SegmentMode::Motion, &cfg).unwrap();
        assert_eq!(a.nodes.len(), b.nodes.len());
        for (x, y) in a.nodes.iter().zip(&b.nodes) {
            assert_eq!(x.joint_type, y.joint_type);
            assert!(x.direction.dot(&y.direction) > 1.0 - 1e-9);
            assert!((x.final_state() - y.final_state()).abs() < 1e-6);
        }
    }
}
