//! Generate a small dataset and inspect one sample.

use oksm::synth::{generate_dataset, read_sample, sample_path, DatasetConfig, Split};

fn main() {
    let dir = std::env::temp_dir().join("oksm-example-dataset");
    let config = DatasetConfig {
        samples_per_category: 4,
        seed: 7,
        ..DatasetConfig::default()
    };
    let manifest = generate_dataset(&config, &dir).unwrap();
    println!(
        "{} samples in {} ({} train, {} test)",
        manifest.samples.len(),
        dir.display(),
        manifest.counts.get(&Split::Train).unwrap_or(&0),
        manifest.counts.get(&Split::Test).unwrap_or(&0)
    );

    let entry = manifest.samples.iter().find(|s| s.category == "fridge").unwrap();
    let seq = read_sample(&sample_path(&dir, entry)).unwrap();
    println!(
        "{}: {} frames x {} points, {} joints",
        entry.path,
        seq.frame_count(),
        seq.point_count(),
        seq.ground_truth.dof()
    );
    for (i, n) in seq.ground_truth.nodes.iter().enumerate() {
        println!("  joint {i}: {} states {:?}", n.joint_type, n.states);
    }
}
