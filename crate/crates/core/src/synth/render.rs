use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::template::{ArticulatedTemplate, BoxShape, LinkTemplate};
use super::SynthError;
use crate::geometry::{centroid, transform_from_screw, RigidTransform, ScrewParams, Vec3, Mat3};
use crate::model::{JointNode, JointType, Oksm};

pub const DEFAULT_FRAMES: usize = 12;
pub const DEFAULT_POINTS_PER_LINK: usize = 512;
pub const DEFAULT_NOISE_SIGMA: f64 = 0.002;
pub const MIN_POINTS_PER_LINK: usize = 50;

/// Rest-pose samples: link id per point (0 = base) and a stable id.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoints {
    pub points: Vec<Vec3>,
    pub labels: Vec<u32>,
    pub corr_ids: Vec<u32>,
}

/// One link's actuation: linear in state from frame `start` to frame `end`
/// (0-based, inclusive endpoints), reaching `target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Actuation {
    pub start: usize,
    pub end: usize,
    pub target: f64,
}

impl Actuation {
    pub fn state_at(&self, frame: usize) -> f64 {
        if frame <= self.start {
            0.0
        } else if frame >= self.end {
            self.target
        } else {
            self.target * (frame - self.start) as f64 / (self.end - self.start) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionScript {
    /// Permutation of link indices (0-based, base excluded).
    pub order: Vec<usize>,
    /// Indexed by link.
    pub actuations: Vec<Actuation>,
    pub frames: usize,
}

impl MotionScript {
    pub fn validate(&self, tpl: &ArticulatedTemplate) -> Result<(), SynthError> {
        let n = tpl.links.len();
        let bad = |m: String| Err(SynthError::InvalidScript(m));
        if self.actuations.len() != n {
            return bad(format!("{} actuations for {n} links", self.actuations.len()));
        }
        let mut seen = vec![false; n];
        for &i in &self.order {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return bad(format!("order {:?} is not a permutation", self.order));
            }
        }
        if self.order.len() != n {
            return bad(format!("order {:?} is not a permutation", self.order));
        }
        if self.frames < 2 {
            return bad("need at least 2 frames".into());
        }
        for (i, a) in self.actuations.iter().enumerate() {
            if a.start >= a.end || a.end > self.frames - 1 {
                return bad(format!("link {i}: window [{}, {}] invalid", a.start, a.end));
            }
            let (lo, hi) = tpl.links[i].range;
            if a.target < lo || a.target > hi {
                return bad(format!("link {i}: target {} outside range", a.target));
            }
        }
        // Windows share at most an endpoint frame and follow the script order.
        for pair in self.order.windows(2) {
            let (a, b) = (&self.actuations[pair[0]], &self.actuations[pair[1]]);
            if b.start < a.end {
                return bad(format!(
                    "windows of links {} and {} overlap or are out of order",
                    pair[0], pair[1]
                ));
            }
        }
        Ok(())
    }

    /// Script with every target zero.
    pub fn still(tpl: &ArticulatedTemplate, frames: usize) -> Self {
        let n = tpl.links.len();
        MotionScript {
            order: (0..n).collect(),
            actuations: (0..n)
                .map(|i| Actuation {
                    start: 2 * i,
                    end: 2 * i + 1,
                    target: 0.0,
                })
                .collect(),
            frames,
        }
    }
}

/// Random sequential script: shuffled order, windows of at least two
/// transitions each, slack spread over windows and gaps, and targets in the
/// upper half of each link's range.
pub fn random_script(
    tpl: &ArticulatedTemplate,
    frames: usize,
    rng: &mut impl Rng,
) -> Result<MotionScript, SynthError> {
    let n = tpl.links.len();
    let transitions = frames.saturating_sub(1);
    if transitions < 2 * n {
        return Err(SynthError::InvalidScript(format!(
            "{frames} frames cannot host {n} sequential actuations"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    // Buckets 0..n are windows, n..=2n are gaps (before, between, after).
    let mut lengths = vec![2usize; n];
    let mut gaps = vec![0usize; n + 1];
    for _ in 0..transitions - 2 * n {
        let b = rng.random_range(0..2 * n + 1);
        if b < n {
            lengths[b] += 1;
        } else {
            gaps[b - n] += 1;
        }
    }

    let mut actuations = vec![
        Actuation {
            start: 0,
            end: 0,
            target: 0.0
        };
        n
    ];
    let mut cursor = 0;
    for (k, &link) in order.iter().enumerate() {
        cursor += gaps[k];
        let (lo, hi) = tpl.links[link].range;
        let target = lo + (hi - lo) * rng.random_range(0.5..=1.0);
        actuations[link] = Actuation {
            start: cursor,
            end: cursor + lengths[k],
            target,
        };
        cursor += lengths[k];
    }
    let script = MotionScript {
        order,
        actuations,
        frames,
    };
    script.validate(tpl)?;
    Ok(script)
}

fn sample_box(shape: &BoxShape, n: usize, rng: &mut impl Rng) -> Vec<Vec3> {
    let faces = WeightedIndex::new(shape.face_areas()).expect("box has positive area");
    let half = shape.extents / 2.0;
    (0..n)
        .map(|_| {
            let f = faces.sample(rng);
            let axis = f / 2;
            let sign = if f % 2 == 0 { -1.0 } else { 1.0 };
            let mut p = Vec3::zeros();
            for k in 0..3 {
                p[k] = if k == axis {
                    sign * half[k]
                } else {
                    rng.random_range(-half[k]..=half[k])
                };
            }
            shape.center + p
        })
        .collect()
}

/// Area-weighted uniform samples on the base box and each link box.
pub fn sample_surface(
    tpl: &ArticulatedTemplate,
    points_per_link: usize,
    rng_seed: u64,
) -> Result<LabeledPoints, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_surface_with(tpl, points_per_link, &mut rng)
}

fn sample_surface_with(
    tpl: &ArticulatedTemplate,
    points_per_link: usize,
    rng: &mut impl Rng,
) -> Result<LabeledPoints, SynthError> {
    if points_per_link < MIN_POINTS_PER_LINK {
        return Err(SynthError::InvalidParameter(format!(
            "points_per_link must be at least {MIN_POINTS_PER_LINK}"
        )));
    }
    let shapes = std::iter::once(&tpl.base).chain(tpl.links.iter().map(|l| &l.shape));
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (label, shape) in shapes.enumerate() {
        points.extend(sample_box(shape, points_per_link, rng));
        labels.extend(std::iter::repeat_n(label as u32, points_per_link));
    }
    let corr_ids = (0..points.len() as u32).collect();
    Ok(LabeledPoints {
        points,
        labels,
        corr_ids,
    })
}

/// Look-at camera on the upper hemisphere around `target`, radius 1.5-2.5 m,
/// elevation 10-70 degrees. Returns the object-to-camera transform
/// (camera looks along +z, x right, y down).
pub fn sample_camera_pose(camera_seed: u64, target: &Vec3) -> RigidTransform {
    let mut rng = ChaCha8Rng::seed_from_u64(camera_seed);
    let radius = rng.random_range(1.5..=2.5);
    let azimuth = rng.random_range(0.0..std::f64::consts::TAU);
    let elevation = rng.random_range(10f64.to_radians()..=70f64.to_radians());
    let eye = target
        + Vec3::new(
            elevation.cos() * azimuth.cos(),
            elevation.cos() * azimuth.sin(),
            elevation.sin(),
        ) * radius;
    let z = (target - eye).normalize();
    let x = z.cross(&Vec3::z()).normalize();
    let y = z.cross(&x);
    let rotation = Mat3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]);
    RigidTransform::new(rotation, -(rotation * eye))
}

/// Object-frame motion of a link at joint state `state`.
pub fn joint_transform(link: &LinkTemplate, state: f64) -> RigidTransform {
    let (angle, slide) = match link.joint_type {
        JointType::Revolute => (state, 0.0),
        JointType::Prismatic => (0.0, state),
    };
    transform_from_screw(&ScrewParams {
        direction: link.direction,
        point: link.axis_point,
        angle,
        slide,
    })
}

/// T labelled point-cloud frames in the camera frame plus ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoSequence {
    /// `frames[f][i]` is point `i` of frame `f`.
    pub frames: Vec<Vec<Vec3>>,
    pub labels: Vec<u32>,
    pub corr_ids: Vec<u32>,
    pub camera_pose: RigidTransform,
    pub ground_truth: Oksm,
}

impl DemoSequence {
    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn point_count(&self) -> usize {
        self.labels.len()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let n = self.labels.len();
        if self.corr_ids.len() != n || self.frames.iter().any(|f| f.len() != n) {
            return Err(SynthError::Format("frame sizes disagree with labels".into()));
        }
        if self.frames.len() < 2 {
            return Err(SynthError::Format("need at least 2 frames".into()));
        }
        Ok(())
    }

    /// Applies `g` to every point and to the ground truth.
    pub fn transformed(&self, g: &RigidTransform) -> DemoSequence {
        let frames = self
            .frames
            .iter()
            .map(|f| f.iter().map(|p| g.apply(p)).collect())
            .collect();
        let nodes = self
            .ground_truth
            .nodes
            .iter()
            .map(|n| {
                let mut node = JointNode::canonical(
                    n.joint_type,
                    g.apply_vector(&n.direction),
                    g.apply(&n.position),
                    n.states.clone(),
                );
                node.contact_pose = n.contact_pose.map(|c| g.compose(&c));
                node
            })
            .collect();
        DemoSequence {
            frames,
            labels: self.labels.clone(),
            corr_ids: self.corr_ids.clone(),
            camera_pose: g.compose(&self.camera_pose),
            ground_truth: Oksm { nodes },
        }
    }

    /// Keeps the listed frames, re-basing ground-truth states on the first.
    pub fn subsequence(&self, frames: &[usize]) -> DemoSequence {
        let nodes = self
            .ground_truth
            .nodes
            .iter()
            .map(|n| {
                let base = n.states.get(frames[0]).copied().unwrap_or(0.0);
                let mut node = n.clone();
                node.states = frames
                    .iter()
                    .map(|&f| n.states.get(f).copied().unwrap_or(0.0) - base)
                    .collect();
                node
            })
            .collect();
        DemoSequence {
            frames: frames.iter().map(|&f| self.frames[f].clone()).collect(),
            labels: self.labels.clone(),
            corr_ids: self.corr_ids.clone(),
            camera_pose: self.camera_pose,
            ground_truth: Oksm { nodes },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderParams {
    pub points_per_link: usize,
    pub noise_sigma: f64,
    pub camera_seed: u64,
    pub rng_seed: u64,
}

impl Default for RenderParams {
    fn default() -> Self {
        Self {
            points_per_link: DEFAULT_POINTS_PER_LINK,
            noise_sigma: DEFAULT_NOISE_SIGMA,
            camera_seed: 0,
            rng_seed: 0,
        }
    }
}

/// Renders a demonstration: each link follows its script, every point is
/// mapped to the camera frame, then isotropic Gaussian noise is added.
pub fn render_sequence(
    tpl: &ArticulatedTemplate,
    script: &MotionScript,
    params: &RenderParams,
) -> Result<DemoSequence, SynthError> {
    tpl.validate()?;
    script.validate(tpl)?;
    if !params.noise_sigma.is_finite() || params.noise_sigma < 0.0 {
        return Err(SynthError::InvalidParameter("noise_sigma must be finite and >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let rest = sample_surface_with(tpl, params.points_per_link, &mut rng)?;
    let camera = sample_camera_pose(params.camera_seed, &tpl.base.center);

    let mut frames = Vec::with_capacity(script.frames);
    for f in 0..script.frames {
        // Per-label camera-frame motion at this frame; label 0 is the base.
        let mut motions = vec![camera];
        for (link, act) in tpl.links.iter().zip(&script.actuations) {
            motions.push(camera.compose(&joint_transform(link, act.state_at(f))));
        }
        let mut frame: Vec<Vec3> = rest
            .points
            .iter()
            .zip(&rest.labels)
            .map(|(p, &l)| motions[l as usize].apply(p))
            .collect();
        if params.noise_sigma > 0.0 {
            for p in frame.iter_mut() {
                for k in 0..3 {
                    let z: f64 = rng.sample(StandardNormal);
                    p[k] += params.noise_sigma * z;
                }
            }
        }
        frames.push(frame);
    }

    let nodes = script
        .order
        .iter()
        .map(|&i| {
            let link = &tpl.links[i];
            let act = &script.actuations[i];
            let states = (0..script.frames).map(|f| act.state_at(f)).collect();
            let position = match link.joint_type {
                JointType::Revolute => camera.apply(&link.axis_point),
                JointType::Prismatic => {
                    let pts: Vec<Vec3> = rest
                        .points
                        .iter()
                        .zip(&rest.labels)
                        .filter(|(_, &l)| l as usize == i + 1)
                        .map(|(p, _)| camera.apply(p))
                        .collect();
                    centroid(&pts)
                }
            };
            JointNode::canonical(
                link.joint_type,
                camera.apply_vector(&link.direction),
                position,
                states,
            )
            .with_contact_pose(camera.compose(&RigidTransform::from_translation(link.handle)))
        })
        .collect();

    Ok(DemoSequence {
        frames,
        labels: rest.labels,
        corr_ids: rest.corr_ids,
        camera_pose: camera,
        ground_truth: Oksm { nodes },
    })
}
