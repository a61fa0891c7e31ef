//! The `oksm` command line: `gen`, `estimate`, `eval`, `plan`, `selftest`.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 on a usage error.
//! Parallel subcommands use `--threads`, falling back to `OKSM_THREADS`,
//! then to one thread per core.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimate::{estimate_oksm, EstimatorConfig, SegmentMode};
use crate::geometry::Vec3;
use crate::metrics::{evaluate_dataset, evaluate_sample, prediction_path, CiMethod, EvalOptions, SampleRecord};
use crate::model::{load_oksm, save_oksm, JointType};
use crate::planner::{plan_joint, plan_sequence, PlanSteps, WaypointPlan};
use crate::synth::{
    generate_dataset, generate_sample, load_manifest, plan_dataset, read_sample, sample_path, DatasetConfig,
    SampleConfig, Split, CATEGORIES, DEFAULT_FRAMES, DEFAULT_NOISE_SIGMA, DEFAULT_POINTS_PER_LINK,
};

pub const THREADS_ENV: &str = "OKSM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "oksm", version, about = "Object kinematic sequence machines: generate, estimate, evaluate, plan")]
struct Cli {
    /// Worker threads [default: $OKSM_THREADS, else one per core]
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset and its manifest
    Gen(GenArgs),
    /// Estimate one OKSM document per sample
    Estimate(EstimateArgs),
    /// Score predictions against ground truth
    Eval(EvalArgs),
    /// Write waypoint files for actuating OKSM joints
    Plan(PlanArgs),
    /// Run the noiseless estimator check over every category
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Comma-separated categories [default: all]
    #[arg(long, value_delimiter = ',')]
    categories: Vec<String>,
    /// Samples per category
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_FRAMES)]
    frames: usize,
    #[arg(long = "points", default_value_t = DEFAULT_POINTS_PER_LINK)]
    points_per_link: usize,
    /// Per-coordinate Gaussian noise, e.g. `2mm` or `0.002`
    #[arg(long, value_parser = parse_length)]
    noise: Option<f64>,
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    /// Comma-separated test-only categories; pass an empty string for none
    #[arg(long, value_delimiter = ',', default_value = "furniture")]
    holdout: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SplitArg {
    Train,
    Test,
    All,
}

impl SplitArg {
    fn split(self) -> Option<Split> {
        match self {
            SplitArg::Train => Some(Split::Train),
            SplitArg::Test => Some(Split::Test),
            SplitArg::All => None,
        }
    }
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    split: SplitArg,
    #[arg(long, value_enum, default_value = "labeled")]
    segment: SegmentArg,
    /// Per-step rotation counted as motion, e.g. `0.5deg`
    #[arg(long, value_parser = parse_angle)]
    onset_angle: Option<f64>,
    /// Per-step translation counted as motion, e.g. `2mm`
    #[arg(long, value_parser = parse_length)]
    onset_slide: Option<f64>,
    /// Total rotation below which a joint is not revolute, e.g. `3deg`
    #[arg(long, value_parser = parse_angle)]
    revolute_floor: Option<f64>,
    /// Total translation below which a still joint is ambiguous, e.g. `5mm`
    #[arg(long, value_parser = parse_length)]
    slide_floor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SegmentArg {
    Labeled,
    Motion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CiArg {
    Normal,
    Bootstrap,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// Report directory [default: the prediction directory]
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "test")]
    split: SplitArg,
    #[arg(long, value_enum, default_value = "normal")]
    ci: CiArg,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    /// Bootstrap seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[arg(long)]
    oksm: PathBuf,
    /// Grasp point `x,y,z` (meters, or per-component unit suffix); repeat once per node without --node
    #[arg(long, required = true, value_parser = parse_point)]
    grasp: Vec<Vec3>,
    /// State change, e.g. `90deg` or `5cm`; repeat once per node without --node
    #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_quantity)]
    delta: Vec<Quantity>,
    /// Plan a single node
    #[arg(long)]
    node: Option<usize>,
    #[arg(long, value_parser = parse_angle, default_value = "1deg")]
    angle_step: f64,
    #[arg(long, value_parser = parse_length, default_value = "1cm")]
    linear_step: f64,
    /// Output directory for `node_<i>.jsonl`
    #[arg(long, default_value = "plan")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Seeds per category
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Value with the unit family it was written in, converted to meters or radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "unit", content = "value")]
pub enum Quantity {
    Angle(f64),
    Length(f64),
    Bare(f64),
}

impl Quantity {
    fn for_joint(self, t: JointType) -> anyhow::Result<f64> {
        match (self, t) {
            (Quantity::Bare(v), _) => Ok(v),
            (Quantity::Angle(v), JointType::Revolute) | (Quantity::Length(v), JointType::Prismatic) => Ok(v),
            (q, t) => bail!("{q:?} does not apply to a {t} joint"),
        }
    }
}

fn split_unit(s: &str) -> (&str, &str) {
    let i = s
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .unwrap_or(s.len());
    (s[..i].trim(), s[i..].trim())
}

/// `deg`, `rad` or `cm`, `mm`, `m` suffix; bare numbers pass through.
pub fn parse_quantity(s: &str) -> Result<Quantity, String> {
    let (num, unit) = split_unit(s.trim());
    let v: f64 = num.parse().map_err(|_| format!("`{s}` is not a number with an optional unit"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(match unit {
        "" => Quantity::Bare(v),
        "deg" => Quantity::Angle(v.to_radians()),
        "rad" => Quantity::Angle(v),
        "m" => Quantity::Length(v),
        "cm" => Quantity::Length(v / 100.0),
        "mm" => Quantity::Length(v / 1000.0),
        u => return Err(format!("unknown unit `{u}` (use deg, rad, m, cm or mm)")),
    })
}

/// Angle in radians; bare numbers are radians.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    match parse_quantity(s)? {
        Quantity::Angle(v) | Quantity::Bare(v) => Ok(v),
        Quantity::Length(_) => Err(format!("`{s}` is a length, expected an angle")),
    }
}

/// Length in meters; bare numbers are meters.
pub fn parse_length(s: &str) -> Result<f64, String> {
    match parse_quantity(s)? {
        Quantity::Length(v) | Quantity::Bare(v) => Ok(v),
        Quantity::Angle(_) => Err(format!("`{s}` is an angle, expected a length")),
    }
}

fn parse_point(s: &str) -> Result<Vec3, String> {
    let parts = s.split(',').map(parse_length).collect::<Result<Vec<_>, _>>()?;
    match parts.as_slice() {
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(format!("`{s}` needs three comma-separated components")),
    }
}

/// Resolved settings of one invocation, echoed as `run_config.<command>.json`
/// into the command's output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub data: Option<PathBuf>,
    pub pred: Option<PathBuf>,
    pub oksm: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub categories: Vec<String>,
    pub samples_per_category: Option<usize>,
    pub noise_sigma: Option<f64>,
    pub frames: Option<usize>,
    pub points_per_link: Option<usize>,
    pub holdout: Vec<String>,
    pub split: Option<String>,
    pub segment: Option<SegmentMode>,
    pub thresholds: Option<EstimatorConfig>,
    pub ci: Option<CiMethod>,
    pub plan_steps: Option<[f64; 2]>,
    pub threads: Option<usize>,
}

impl RunConfig {
    fn new(command: &str, out: &Path, threads: Option<usize>) -> Self {
        Self {
            command: command.into(),
            data: None,
            pred: None,
            oksm: None,
            out: out.to_path_buf(),
            seed: None,
            categories: Vec::new(),
            samples_per_category: None,
            noise_sigma: None,
            frames: None,
            points_per_link: None,
            holdout: Vec::new(),
            split: None,
            segment: None,
            thresholds: None,
            ci: None,
            plan_steps: None,
            threads,
        }
    }

    pub fn write(&self) -> anyhow::Result<()> {
        let path = self.out.join(format!("run_config.{}.json", self.command));
        write_text(&path, &(serde_json::to_string_pretty(self)? + "\n"))
    }
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(path: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>, String> {
    if let Some(n) = flag {
        return if n == 0 { Err("--threads must be positive".into()) } else { Ok(Some(n)) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV}=`{v}` is not a positive integer")),
        },
        _ => Ok(None),
    }
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = match resolve_threads(cli.threads) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Gen(a) => cmd_gen(a, threads),
        Command::Estimate(a) => cmd_estimate(a, threads),
        Command::Eval(a) => cmd_eval(a, threads),
        Command::Plan(a) => cmd_plan(a, threads),
        Command::Selftest(a) => cmd_selftest(a),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            1
        }
    }
}

/// Error chain joined by `: `, skipping causes already quoted by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !msg.contains(&text) {
            if !msg.is_empty() {
                msg.push_str(": ");
            }
            msg.push_str(&text);
        }
    }
    msg
}

fn cmd_gen(a: GenArgs, threads: Option<usize>) -> anyhow::Result<i32> {
    let categories = if a.categories.is_empty() {
        CATEGORIES.iter().map(|s| s.to_string()).collect()
    } else {
        a.categories
    };
    let config = DatasetConfig {
        categories: categories.clone(),
        samples_per_category: a.n,
        train_fraction: a.train_fraction,
        holdout: a.holdout.into_iter().filter(|s| !s.is_empty()).collect(),
        seed: a.seed,
        sample: SampleConfig {
            frames: a.frames,
            points_per_link: a.points_per_link,
            noise_sigma: a.noise.unwrap_or(DEFAULT_NOISE_SIGMA),
        },
    };
    let manifest = generate_dataset(&config, &a.out)?;
    let rc = RunConfig {
        seed: Some(a.seed),
        categories,
        samples_per_category: Some(a.n),
        noise_sigma: Some(config.sample.noise_sigma),
        frames: Some(a.frames),
        points_per_link: Some(a.points_per_link),
        holdout: config.holdout.clone(),
        ..RunConfig::new("gen", &a.out, threads)
    };
    rc.write()?;
    println!("wrote {} samples to {}", manifest.samples.len(), a.out.display());
    Ok(0)
}

fn cmd_estimate(a: EstimateArgs, threads: Option<usize>) -> anyhow::Result<i32> {
    let mut cfg = EstimatorConfig::default();
    if let Some(v) = a.onset_angle {
        cfg.onset_angle = v;
    }
    if let Some(v) = a.onset_slide {
        cfg.onset_slide = v;
    }
    if let Some(v) = a.revolute_floor {
        cfg.revolute_floor = v;
    }
    if let Some(v) = a.slide_floor {
        cfg.slide_floor = v;
    }
    let mode = match a.segment {
        SegmentArg::Labeled => SegmentMode::Labeled,
        SegmentArg::Motion => SegmentMode::Motion,
    };
    let manifest = load_manifest(&a.data)?;
    let mut entries: Vec<_> = manifest.split(a.split.split()).collect();
    entries.sort_by(|x, y| x.path.cmp(&y.path));
    create_dir(&a.out)?;

    let results: Vec<_> = entries
        .par_iter()
        .map(|entry| -> anyhow::Result<()> {
            let seq = read_sample(&sample_path(&a.data, entry))?;
            let est = estimate_oksm(&seq, mode, &cfg)?;
            write_text(&prediction_path(&a.out, entry), &save_oksm(&est))
        })
        .collect();
    let failures: Vec<(String, String)> = entries
        .iter()
        .zip(&results)
        .filter_map(|(e, r)| r.as_ref().err().map(|err| (e.path.clone(), format!("{err:#}"))))
        .collect();

    let rc = RunConfig {
        data: Some(a.data.clone()),
        split: Some(format!("{:?}", a.split).to_lowercase()),
        segment: Some(mode),
        thresholds: Some(cfg),
        ..RunConfig::new("estimate", &a.out, threads)
    };
    rc.write()?;
    let failure_path = a.out.join("estimate_failures.json");
    if failures.is_empty() {
        if failure_path.exists() {
            std::fs::remove_file(&failure_path)?;
        }
    } else {
        write_text(&failure_path, &(serde_json::to_string_pretty(&failures)? + "\n"))?;
    }
    println!(
        "estimated {} of {} samples into {}",
        entries.len() - failures.len(),
        entries.len(),
        a.out.display()
    );
    for (path, err) in &failures {
        eprintln!("{path}: {err}");
    }
    Ok(if failures.is_empty() { 0 } else { 1 })
}

fn cmd_eval(a: EvalArgs, threads: Option<usize>) -> anyhow::Result<i32> {
    let ci = match a.ci {
        CiArg::Normal => CiMethod::Normal,
        CiArg::Bootstrap => CiMethod::Bootstrap {
            resamples: a.resamples,
            seed: a.seed,
        },
    };
    let opts = EvalOptions {
        split: a.split.split(),
        ci,
    };
    let report = evaluate_dataset(&a.data, &a.pred, &opts)?;
    let out = a.out.clone().unwrap_or_else(|| a.pred.clone());
    create_dir(&out)?;
    let table = report.to_table();
    write_text(&out.join("report.txt"), &table)?;
    write_text(&out.join("report.json"), &report.to_json())?;
    let rc = RunConfig {
        data: Some(a.data),
        pred: Some(a.pred),
        split: Some(format!("{:?}", a.split).to_lowercase()),
        ci: Some(ci),
        ..RunConfig::new("eval", &out, threads)
    };
    rc.write()?;
    print!("{table}");
    Ok(0)
}

fn cmd_plan(a: PlanArgs, threads: Option<usize>) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&a.oksm).with_context(|| format!("reading {}", a.oksm.display()))?;
    let oksm = load_oksm(&text).with_context(|| format!("parsing {}", a.oksm.display()))?;
    let steps = PlanSteps {
        angular: a.angle_step,
        linear: a.linear_step,
    };
    let plans: Vec<WaypointPlan> = match a.node {
        Some(i) => {
            let node = oksm
                .nodes
                .get(i)
                .ok_or_else(|| anyhow!("node {i} out of range ({} nodes)", oksm.nodes.len()))?;
            if a.grasp.len() != 1 || a.delta.len() != 1 {
                bail!("--node takes exactly one --grasp and one --delta");
            }
            let delta = a.delta[0].for_joint(node.joint_type)?;
            let step = match node.joint_type {
                JointType::Revolute => steps.angular,
                JointType::Prismatic => steps.linear,
            };
            let plan = plan_joint(node, &a.grasp[0], delta, step)?;
            vec![WaypointPlan { joint_index: i, ..plan }]
        }
        None => {
            let deltas = a
                .delta
                .iter()
                .zip(&oksm.nodes)
                .map(|(q, n)| q.for_joint(n.joint_type))
                .collect::<anyhow::Result<Vec<_>>>()?;
            if deltas.len() != a.delta.len() {
                bail!("{} deltas for {} nodes", a.delta.len(), oksm.nodes.len());
            }
            plan_sequence(&oksm, &a.grasp, &deltas, steps)?
        }
    };
    create_dir(&a.out)?;
    for p in &plans {
        write_text(&a.out.join(format!("node_{}.jsonl", p.joint_index)), &p.to_jsonl())?;
        println!("node {}: {} waypoints", p.joint_index, p.waypoints.len());
    }
    let rc = RunConfig {
        oksm: Some(a.oksm),
        plan_steps: Some([steps.angular, steps.linear]),
        ..RunConfig::new("plan", &a.out, threads)
    };
    rc.write()?;
    Ok(0)
}

/// Error bounds checked by [`selftest`]: degrees, centimeters, state units.
pub const SELFTEST_DIRECTION_DEG: f64 = 0.1;
pub const SELFTEST_POSITION_CM: f64 = 0.1;
pub const SELFTEST_STATE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestOutcome {
    pub category: String,
    pub seed: u64,
    /// `None` when the estimator failed outright.
    pub record: Option<SampleRecord>,
    pub types_match: bool,
    pub error: Option<String>,
}

impl SelftestOutcome {
    pub fn passed(&self) -> bool {
        match &self.record {
            None => false,
            Some(r) => {
                self.types_match
                    && r.dof_correct
                    && r.order_correct
                    && r.axes.iter().all(|a| {
                        a.direction_deg < SELFTEST_DIRECTION_DEG
                            && a.position_cm < SELFTEST_POSITION_CM
                            && a.state_error < SELFTEST_STATE
                    })
            }
        }
    }
}

/// Estimates noiseless demonstrations of every category and scores them
/// against ground truth.
pub fn selftest(seeds_per_category: usize, seed: u64) -> anyhow::Result<Vec<SelftestOutcome>> {
    let manifest = plan_dataset(&DatasetConfig {
        samples_per_category: seeds_per_category,
        holdout: Vec::new(),
        seed,
        ..DatasetConfig::default()
    })?;
    let cfg = SampleConfig {
        noise_sigma: 0.0,
        ..SampleConfig::default()
    };
    manifest
        .samples
        .par_iter()
        .map(|entry| {
            let seq = generate_sample(&entry.category, entry.seed, &cfg)?;
            let gt = &seq.ground_truth;
            Ok(match estimate_oksm(&seq, SegmentMode::Labeled, &EstimatorConfig::default()) {
                Ok(est) => {
                    let types_match = est.nodes.len() == gt.nodes.len()
                        && est.nodes.iter().zip(&gt.nodes).all(|(e, g)| e.joint_type == g.joint_type);
                    SelftestOutcome {
                        category: entry.category.clone(),
                        seed: entry.seed,
                        record: Some(evaluate_sample(&entry.path, &entry.category, &est, gt)),
                        types_match,
                        error: None,
                    }
                }
                Err(e) => SelftestOutcome {
                    category: entry.category.clone(),
                    seed: entry.seed,
                    record: None,
                    types_match: false,
                    error: Some(e.to_string()),
                },
            })
        })
        .collect()
}

fn cmd_selftest(a: SelftestArgs) -> anyhow::Result<i32> {
    let outcomes = selftest(a.seeds, a.seed)?;
    let mut all_ok = true;
    for cat in CATEGORIES {
        let mine: Vec<_> = outcomes.iter().filter(|o| o.category == cat).collect();
        let failed: Vec<_> = mine.iter().filter(|o| !o.passed()).collect();
        let ok = failed.is_empty();
        all_ok &= ok;
        println!(
            "{} {cat}: {}/{} noiseless samples exact",
            if ok { "PASS" } else { "FAIL" },
            mine.len() - failed.len(),
            mine.len()
        );
        for f in failed {
            eprintln!("  seed {}: {}", f.seed, f.error.as_deref().unwrap_or("outside tolerance"));
        }
    }
    Ok(if all_ok { 0 } else { 1 })
}
