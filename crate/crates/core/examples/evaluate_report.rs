//! Estimate every sample of a dataset and print the evaluation table.

use oksm::metrics::{evaluate_dataset, prediction_path, CiMethod, EvalOptions};
use oksm::synth::{generate_dataset, read_sample, sample_path, DatasetConfig};
use oksm::{estimate_oksm, save_oksm, EstimatorConfig, SegmentMode};

fn main() {
    let root = std::env::temp_dir().join("oksm-example-eval");
    let (data, pred) = (root.join("data"), root.join("pred"));
    let manifest = generate_dataset(
        &DatasetConfig {
            samples_per_category: 10,
            seed: 1,
            ..DatasetConfig::default()
        },
        &data,
    )
    .unwrap();

    std::fs::create_dir_all(&pred).unwrap();
    for entry in &manifest.samples {
        let seq = read_sample(&sample_path(&data, entry)).unwrap();
        let est = estimate_oksm(&seq, SegmentMode::Labeled, &EstimatorConfig::default()).unwrap();
        std::fs::write(prediction_path(&pred, entry), save_oksm(&est)).unwrap();
    }

    let opts = EvalOptions {
        split: None,
        ci: CiMethod::Bootstrap {
            resamples: 1000,
            seed: 0,
        },
    };
    let report = evaluate_dataset(&data, &pred, &opts).unwrap();
    print!("{}", report.to_table());
}
