use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::write_sample;
use super::render::{random_script, render_sequence, DemoSequence, RenderParams};
use super::template::{make_template, CATEGORIES};
use super::{SynthError, DEFAULT_FRAMES, DEFAULT_NOISE_SIGMA, DEFAULT_POINTS_PER_LINK};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SAMPLE_EXTENSION: &str = "oksmpc";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub frames: usize,
    pub points_per_link: usize,
    pub noise_sigma: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            frames: DEFAULT_FRAMES,
            points_per_link: DEFAULT_POINTS_PER_LINK,
            noise_sigma: DEFAULT_NOISE_SIGMA,
        }
    }
}

/// Template, script, camera and noise all derive from `seed` alone.
pub fn generate_sample(category: &str, seed: u64, cfg: &SampleConfig) -> Result<DemoSequence, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let template_seed = rng.next_u64();
    let camera_seed = rng.next_u64();
    let render_seed = rng.next_u64();
    let tpl = make_template(category, template_seed)?;
    let script = random_script(&tpl, cfg.frames, &mut rng)?;
    render_sequence(
        &tpl,
        &script,
        &RenderParams {
            points_per_link: cfg.points_per_link,
            noise_sigma: cfg.noise_sigma,
            camera_seed,
            rng_seed: render_seed,
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub categories: Vec<String>,
    pub samples_per_category: usize,
    /// Fraction of each non-held-out category assigned to train.
    pub train_fraction: f64,
    /// Categories that only appear in the test split.
    pub holdout: Vec<String>,
    pub seed: u64,
    pub sample: SampleConfig,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            categories: CATEGORIES.iter().map(|s| s.to_string()).collect(),
            samples_per_category: 10,
            train_fraction: 0.8,
            holdout: vec!["furniture".into()],
            seed: 0,
            sample: SampleConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEntry {
    pub category: String,
    /// Relative to the dataset directory.
    pub path: String,
    pub seed: u64,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    pub seed: u64,
    pub config: DatasetConfig,
    pub counts: BTreeMap<Split, usize>,
    pub samples: Vec<SampleEntry>,
}

impl DatasetManifest {
    pub fn split(&self, split: Option<Split>) -> impl Iterator<Item = &SampleEntry> {
        self.samples
            .iter()
            .filter(move |s| split.is_none_or(|sp| s.split == sp))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-sample seed. A bijection of the global sample index, so seeds never
/// collide within one dataset.
pub fn sample_seed(dataset_seed: u64, index: u64) -> u64 {
    splitmix64(dataset_seed.wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03)))
}

/// Plans the dataset without touching the filesystem.
pub fn plan_dataset(config: &DatasetConfig) -> Result<DatasetManifest, SynthError> {
    for c in config.categories.iter().chain(&config.holdout) {
        if !CATEGORIES.contains(&c.as_str()) {
            return Err(SynthError::UnknownCategory(c.clone()));
        }
    }
    if !(0.0..=1.0).contains(&config.train_fraction) {
        return Err(SynthError::InvalidParameter("train_fraction must be in [0, 1]".into()));
    }
    let mut samples = Vec::new();
    let mut index = 0u64;
    for category in &config.categories {
        let held_out = config.holdout.contains(category);
        let n_train = if held_out {
            0
        } else {
            (config.samples_per_category as f64 * config.train_fraction).round() as usize
        };
        for i in 0..config.samples_per_category {
            samples.push(SampleEntry {
                category: category.clone(),
                path: format!("{category}_{i:04}.{SAMPLE_EXTENSION}"),
                seed: sample_seed(config.seed, index),
                split: if i < n_train { Split::Train } else { Split::Test },
            });
            index += 1;
        }
    }
    let mut counts = BTreeMap::new();
    for s in &samples {
        *counts.entry(s.split).or_insert(0) += 1;
    }
    Ok(DatasetManifest {
        version: 1,
        seed: config.seed,
        config: config.clone(),
        counts,
        samples,
    })
}

/// Writes every sample file plus `manifest.json` into `out_dir`. Samples are
/// generated in parallel on the current rayon pool; output bytes do not
/// depend on scheduling.
pub fn generate_dataset(config: &DatasetConfig, out_dir: &Path) -> Result<DatasetManifest, SynthError> {
    let manifest = plan_dataset(config)?;
    std::fs::create_dir_all(out_dir).map_err(|e| SynthError::io(out_dir, e))?;
    manifest.samples.par_iter().try_for_each(|entry| {
        let seq = generate_sample(&entry.category, entry.seed, &config.sample)?;
        write_sample(&out_dir.join(&entry.path), &seq)
    })?;
    write_manifest(out_dir, &manifest)?;
    Ok(manifest)
}

pub fn write_manifest(dir: &Path, manifest: &DatasetManifest) -> Result<(), SynthError> {
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| SynthError::io(&path, e))
}

pub fn load_manifest(dir: &Path) -> Result<DatasetManifest, SynthError> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| SynthError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| SynthError::Format(format!("{}: {e}", path.display())))
}

pub fn sample_path(dir: &Path, entry: &SampleEntry) -> PathBuf {
    dir.join(&entry.path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn seeds_are_distinct() {
        let seeds: HashSet<u64> = (0..100_000).map(|i| sample_seed(42, i)).collect();
        assert_eq!(seeds.len(), 100_000);
    }

    #[test]
    fn holdout_goes_to_test_only() {
        let cfg = DatasetConfig {
            samples_per_category: 5,
            ..DatasetConfig::default()
        };
        let m = plan_dataset(&cfg).unwrap();
        assert_eq!(m.samples.len(), 40);
        assert!(m
            .samples
            .iter()
            .filter(|s| s.category == "furniture")
            .all(|s| s.split == Split::Test));
        assert_eq!(m.counts[&Split::Train], 7 * 4);
        assert_eq!(m.counts[&Split::Test], 7 + 5);
    }

    #[test]
    fn unknown_categories_are_rejected() {
        let cfg = DatasetConfig {
            categories: vec!["toaster".into()],
            ..DatasetConfig::default()
        };
        assert!(matches!(plan_dataset(&cfg), Err(SynthError::UnknownCategory(_))));
    }
}
