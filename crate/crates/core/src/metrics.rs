//! Error metrics between estimated and ground-truth OKSMs, and dataset
//! reports with 95% confidence intervals.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{line_line_distance, Vec3};
use crate::model::{load_oksm, JointNode, JointType, Oksm, OksmError, UNIT_TOL};
use crate::synth::{load_manifest, read_sample, sample_path, SampleEntry, Split, SynthError};

/// Normal-approximation z value for a two-sided 95% interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("direction is not unit length (norm {0})")]
    NonUnitInput(f64),
    #[error("missing prediction for sample {0}")]
    MissingPrediction(String),
    #[error("prediction {path}: {source}")]
    BadPrediction { path: String, source: OksmError },
    #[error(transparent)]
    Data(#[from] SynthError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Angle between two undirected axes, in degrees within [0, 90].
pub fn axis_direction_error(d_est: &Vec3, d_gt: &Vec3) -> Result<f64, MetricsError> {
    for d in [d_est, d_gt] {
        if (d.norm() - 1.0).abs() > UNIT_TOL {
            return Err(MetricsError::NonUnitInput(d.norm()));
        }
    }
    Ok(undirected_angle(d_est, d_gt).to_degrees())
}

/// atan2 form of arccos(|a·b|) for unit vectors; tolerates any nonzero norm.
fn undirected_angle(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b).abs())
}

/// Minimum distance between the two axis lines, in centimeters.
pub fn axis_position_error(est_dir: &Vec3, est_pos: &Vec3, gt_dir: &Vec3, gt_pos: &Vec3) -> f64 {
    line_line_distance(est_dir, est_pos, gt_dir, gt_pos) * 100.0
}

/// Prismatic reference points compared orthogonally to the true direction, in centimeters.
pub fn prismatic_position_error(est_pos: &Vec3, gt_dir: &Vec3, gt_pos: &Vec3) -> f64 {
    let d = gt_dir.normalize();
    let v = est_pos - gt_pos;
    (v - d * d.dot(&v)).norm() * 100.0
}

/// Position error chosen by the ground-truth joint type, in centimeters.
pub fn node_position_error(est: &JointNode, gt: &JointNode) -> f64 {
    match gt.joint_type {
        JointType::Revolute => {
            axis_position_error(&est.direction, &est.position, &gt.direction, &gt.position)
        }
        JointType::Prismatic => prismatic_position_error(&est.position, &gt.direction, &gt.position),
    }
}

fn state_sign(est: &JointNode, gt: &JointNode) -> f64 {
    if est.direction.dot(&gt.direction) < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Final-state error with the estimate's sign aligned to the ground-truth axis.
pub fn node_state_error(est: &JointNode, gt: &JointNode) -> f64 {
    (state_sign(est, gt) * est.final_state() - gt.final_state()).abs()
}

fn match_cost(est: &JointNode, gt: &JointNode) -> f64 {
    let type_penalty = if est.joint_type == gt.joint_type { 0.0 } else { 180.0 };
    undirected_angle(&est.direction, &gt.direction).to_degrees() + node_position_error(est, gt) + type_penalty
}

/// Greedy one-to-one matching of estimated to ground-truth nodes: the
/// globally cheapest pair is taken first. Cost is direction error (degrees)
/// plus position error (centimeters), with a large penalty for a type
/// mismatch. Returns `(est index, gt index)` pairs sorted by gt index.
pub fn match_nodes(est: &Oksm, gt: &Oksm) -> Vec<(usize, usize)> {
    let mut costs = Vec::with_capacity(est.nodes.len() * gt.nodes.len());
    for (i, e) in est.nodes.iter().enumerate() {
        for (j, g) in gt.nodes.iter().enumerate() {
            costs.push((match_cost(e, g), i, j));
        }
    }
    costs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_e = vec![false; est.nodes.len()];
    let mut used_g = vec![false; gt.nodes.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in costs {
        if !used_e[i] && !used_g[j] {
            used_e[i] = true;
            used_g[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_by_key(|p| p.1);
    pairs
}

pub fn dof_accuracy(est: &Oksm, gt: &Oksm) -> f64 {
    if est.nodes.len() == gt.nodes.len() {
        1.0
    } else {
        0.0
    }
}

pub fn order_accuracy(est: &Oksm, gt: &Oksm) -> f64 {
    if est.nodes.len() == gt.nodes.len() && match_nodes(est, gt).iter().all(|(i, j)| i == j) {
        1.0
    } else {
        0.0
    }
}

/// Mean absolute final-state error over matched nodes; `None` when the DoF differ.
pub fn state_error(est: &Oksm, gt: &Oksm) -> Option<f64> {
    if est.nodes.len() != gt.nodes.len() {
        return None;
    }
    let pairs = match_nodes(est, gt);
    let total: f64 = pairs
        .iter()
        .map(|&(i, j)| node_state_error(&est.nodes[i], &gt.nodes[j]))
        .sum();
    Some(total / pairs.len() as f64)
}

/// Per-term breakdown of [`composite_score`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreTerms {
    pub direction: f64,
    pub position: f64,
    pub order: f64,
    pub dof: f64,
    pub state: f64,
    pub norm: f64,
}

impl ScoreTerms {
    pub fn total(&self) -> f64 {
        self.direction + self.position + self.order + self.dof + self.state + self.norm
    }
}

pub fn score_terms(est: &Oksm, gt: &Oksm) -> ScoreTerms {
    let pairs = match_nodes(est, gt);
    let mut t = ScoreTerms {
        order: 1.0 - order_accuracy(est, gt),
        dof: 1.0 - dof_accuracy(est, gt),
        ..Default::default()
    };
    if pairs.is_empty() {
        return t;
    }
    for &(i, j) in &pairs {
        let (e, g) = (&est.nodes[i], &gt.nodes[j]);
        let cos = e.direction.dot(&g.direction) / (e.direction.norm() * g.direction.norm());
        t.direction += 1.0 - cos.abs().min(1.0);
        t.position += (node_position_error(e, g) / 100.0).powi(2);
        let sign = state_sign(e, g);
        t.state += if e.states.len() == g.states.len() && !g.states.is_empty() {
            e.states
                .iter()
                .zip(&g.states)
                .map(|(a, b)| (sign * a - b).powi(2))
                .sum::<f64>()
                / g.states.len() as f64
        } else {
            (sign * e.final_state() - g.final_state()).powi(2)
        };
        t.norm += (e.direction.norm() - 1.0).abs();
    }
    let n = pairs.len() as f64;
    t.direction /= n;
    t.position /= n;
    t.state /= n;
    t.norm /= n;
    t
}

/// Unit-weight sum of direction (1 − |cos|), squared position (m²), order
/// and DoF misclassification, mean squared state and unit-norm deviation.
pub fn composite_score(est: &Oksm, gt: &Oksm) -> f64 {
    score_terms(est, gt).total()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "method")]
pub enum CiMethod {
    /// 1.96 · s / √n.
    Normal,
    /// Half the width of the 2.5–97.5 percentile interval of resampled means.
    Bootstrap { resamples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Half-width of the 95% interval; absent for fewer than two values.
    pub ci: Option<f64>,
    pub n: usize,
}

pub fn summarize(values: &[f64], method: CiMethod) -> Option<Stat> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return Some(Stat { mean, ci: None, n });
    }
    let ci = match method {
        CiMethod::Normal => {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            Z_95 * var.sqrt() / (n as f64).sqrt()
        }
        CiMethod::Bootstrap { resamples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut means: Vec<f64> = (0..resamples.max(2))
                .map(|_| (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64)
                .collect();
            means.sort_by(f64::total_cmp);
            let q = |p: f64| means[((means.len() - 1) as f64 * p).round() as usize];
            (q(0.975) - q(0.025)) / 2.0
        }
    };
    Some(Stat {
        mean,
        ci: Some(ci),
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisRecord {
    /// Ground-truth node index (manipulation order), 0-based.
    pub axis: usize,
    pub joint_type: JointType,
    pub direction_deg: f64,
    pub position_cm: f64,
    pub state_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub path: String,
    pub category: String,
    pub dof_correct: bool,
    pub order_correct: bool,
    pub axes: Vec<AxisRecord>,
}

pub fn evaluate_sample(path: &str, category: &str, est: &Oksm, gt: &Oksm) -> SampleRecord {
    let axes = match_nodes(est, gt)
        .into_iter()
        .map(|(i, j)| {
            let (e, g) = (&est.nodes[i], &gt.nodes[j]);
            AxisRecord {
                axis: j,
                joint_type: g.joint_type,
                direction_deg: undirected_angle(&e.direction, &g.direction).to_degrees(),
                position_cm: node_position_error(e, g),
                state_error: node_state_error(e, g),
            }
        })
        .collect();
    SampleRecord {
        path: path.to_string(),
        category: category.to_string(),
        dof_correct: dof_accuracy(est, gt) == 1.0,
        order_correct: order_accuracy(est, gt) == 1.0,
        axes,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSummary {
    /// 1-based, as in report columns.
    pub axis: usize,
    pub direction_deg: Stat,
    pub position_cm: Stat,
    pub state_error: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryReport {
    pub category: String,
    pub samples: usize,
    pub order_accuracy: f64,
    pub dof_accuracy: f64,
    pub axes: Vec<AxisSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub split: Option<Split>,
    pub ci_method: CiMethod,
    pub categories: Vec<CategoryReport>,
    pub samples: Vec<SampleRecord>,
}

/// Groups records by category and axis. Categories are sorted by name.
pub fn aggregate(records: &[SampleRecord], ci: CiMethod) -> Vec<CategoryReport> {
    let mut by_cat: BTreeMap<&str, Vec<&SampleRecord>> = BTreeMap::new();
    for r in records {
        by_cat.entry(&r.category).or_default().push(r);
    }
    by_cat
        .into_iter()
        .map(|(category, recs)| {
            let n = recs.len() as f64;
            let mut per_axis: BTreeMap<usize, [Vec<f64>; 3]> = BTreeMap::new();
            for r in &recs {
                for a in &r.axes {
                    let e = per_axis.entry(a.axis).or_default();
                    e[0].push(a.direction_deg);
                    e[1].push(a.position_cm);
                    e[2].push(a.state_error);
                }
            }
            CategoryReport {
                category: category.to_string(),
                samples: recs.len(),
                order_accuracy: recs.iter().filter(|r| r.order_correct).count() as f64 / n,
                dof_accuracy: recs.iter().filter(|r| r.dof_correct).count() as f64 / n,
                axes: per_axis
                    .into_iter()
                    .map(|(axis, [d, p, s])| AxisSummary {
                        axis: axis + 1,
                        direction_deg: summarize(&d, ci).unwrap(),
                        position_cm: summarize(&p, ci).unwrap(),
                        state_error: summarize(&s, ci).unwrap(),
                    })
                    .collect(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// `None` evaluates every sample.
    pub split: Option<Split>,
    pub ci: CiMethod,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            split: Some(Split::Test),
            ci: CiMethod::Normal,
        }
    }
}

/// Prediction file for a sample: `<pred_dir>/<sample stem>.json`.
pub fn prediction_path(pred_dir: &Path, entry: &SampleEntry) -> PathBuf {
    let stem = Path::new(&entry.path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| entry.path.clone());
    pred_dir.join(format!("{stem}.json"))
}

pub fn evaluate_dataset(data_dir: &Path, pred_dir: &Path, opts: &EvalOptions) -> Result<EvalReport, MetricsError> {
    let manifest = load_manifest(data_dir)?;
    let mut entries: Vec<&SampleEntry> = manifest.split(opts.split).collect();
    entries.sort_by(|a, b| a.path.cmp(&b.path));

    let records = entries
        .par_iter()
        .map(|entry| {
            let pred_path = prediction_path(pred_dir, entry);
            if !pred_path.exists() {
                return Err(MetricsError::MissingPrediction(entry.path.clone()));
            }
            let text = std::fs::read_to_string(&pred_path).map_err(|source| MetricsError::Io {
                path: pred_path.display().to_string(),
                source,
            })?;
            let est = load_oksm(&text).map_err(|source| MetricsError::BadPrediction {
                path: pred_path.display().to_string(),
                source,
            })?;
            let gt = read_sample(&sample_path(data_dir, entry))?.ground_truth;
            Ok(evaluate_sample(&entry.path, &entry.category, &est, &gt))
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(EvalReport {
        split: opts.split,
        ci_method: opts.ci,
        categories: aggregate(&records, opts.ci),
        samples: records,
    })
}

fn cell(stat: Option<&Stat>) -> String {
    match stat {
        None => "-".to_string(),
        Some(Stat { mean, ci: Some(ci), .. }) => format!("{mean:.3} ± {ci:.3}"),
        Some(Stat { mean, ci: None, .. }) => format!("{mean:.3}"),
    }
}

impl EvalReport {
    /// Aligned table: axis 1..3 direction error (degrees), axis 1..3
    /// position error (centimeters), order and DoF accuracy.
    pub fn to_table(&self) -> String {
        let mut header = vec!["Object".to_string()];
        header.extend((1..=3).map(|k| format!("Axis {k} dir (deg)")));
        header.extend((1..=3).map(|k| format!("Axis {k} pos (cm)")));
        header.extend(["Order".into(), "DoF".into(), "n".into()]);

        let mut rows = vec![header];
        for c in &self.categories {
            let axis = |k: usize| c.axes.iter().find(|a| a.axis == k);
            let mut row = vec![c.category.clone()];
            row.extend((1..=3).map(|k| cell(axis(k).map(|a| &a.direction_deg))));
            row.extend((1..=3).map(|k| cell(axis(k).map(|a| &a.position_cm))));
            row.push(format!("{:.3}", c.order_accuracy));
            row.push(format!("{:.3}", c.dof_accuracy));
            row.push(c.samples.to_string());
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (n, row) in rows.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, w))| {
                    let pad = w - c.chars().count();
                    if i == 0 {
                        format!("{c}{}", " ".repeat(pad))
                    } else {
                        format!("{}{c}", " ".repeat(pad))
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(" | "));
            if n == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                let _ = writeln!(out, "{}", rule.join("-+-"));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
