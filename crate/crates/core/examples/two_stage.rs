//! Two-stage classification for data mixing one-person and two-person
//! actions: a gate decides the body count, then a dedicated classifier
//! labels the clip.
//!
//! `cargo run --release --example two_stage`

use skelsig::classifier::{train_two_stage, two_stage_predict, Stage, TrainConfig};
use skelsig::skeleton::synthetic::{generate, SyntheticConfig};
use skelsig::skeleton::{AugmentConfig, ExtractConfig, FeatureConfig};

fn main() -> skelsig::Result<()> {
    let data = generate(&SyntheticConfig {
        train_per_class: 20,
        test_per_class: 10,
        two_body_classes: vec![3],
        ..Default::default()
    })?;
    // Lighter signature levels keep the two-body vectors small here.
    let extract = ExtractConfig {
        features: FeatureConfig { triple_level: 2, joint_time_level: 3, ..FeatureConfig::default() },
        augment: AugmentConfig { noisy_copies: 0, ..AugmentConfig::default() },
        ..ExtractConfig::default()
    };
    let config = TrainConfig { max_epochs: 60, ..TrainConfig::default() };
    let model = train_two_stage(&data.train, &data.descriptor, &extract, &config)?;
    for (c, name) in data.descriptor.class_names.iter().enumerate() {
        println!("{name}: mean actors {:.2}, multi-body {}", model.table.mean_actors[c], model.table.multi_body[c]);
    }

    let (mut correct, mut routed) = (0, 0);
    for clip in &data.test {
        let p = two_stage_predict(&model, clip, &data.descriptor)?;
        let truth = clip.label.unwrap_or(usize::MAX);
        correct += usize::from(p.label == truth);
        routed += usize::from((p.stage == Stage::MultiBody) == model.table.multi_body[truth]);
    }
    let n = data.test.len();
    println!("gate routed {routed}/{n} clips to the right stage; {correct}/{n} labelled correctly");
    Ok(())
}
