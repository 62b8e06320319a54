use skelsig::classifier::{train_two_stage, two_stage_predict, Stage, TrainConfig, TwoStageModel};
use skelsig::skeleton::synthetic::{generate, SyntheticConfig};
use skelsig::skeleton::{AugmentConfig, BlockSelection, ExtractConfig, FeatureConfig};

fn small_extract() -> ExtractConfig {
    ExtractConfig {
        features: FeatureConfig {
            sampled_frames: 4,
            triple_level: 2,
            joint_time_level: 3,
            blocks: BlockSelection { temporal_spatial: false, ..BlockSelection::default() },
            ..FeatureConfig::default()
        },
        augment: AugmentConfig::none(),
        ..ExtractConfig::default()
    }
}

#[test]
fn routes_by_body_count_and_round_trips() {
    let data = generate(&SyntheticConfig {
        train_per_class: 12,
        test_per_class: 5,
        two_body_classes: vec![3],
        seed: 4,
        ..SyntheticConfig::default()
    })
    .unwrap();
    let config = TrainConfig { max_epochs: 40, dropconnect_p: 0.5, ..TrainConfig::default() };
    let model = train_two_stage(&data.train, &data.descriptor, &small_extract(), &config).unwrap();
    assert_eq!(model.table.classes(true), vec![3]);
    assert_eq!(model.table.classes(false), vec![0, 1, 2]);

    let mut routed = 0;
    for clip in &data.test {
        let p = two_stage_predict(&model, clip, &data.descriptor).unwrap();
        let expected = if clip.label == Some(3) { Stage::MultiBody } else { Stage::OneBody };
        routed += usize::from(p.stage == expected);
        if p.stage == Stage::MultiBody {
            assert_eq!(p.label, 3);
        }
    }
    assert_eq!(routed, data.test.len());

    let dir = tempfile::tempdir().unwrap();
    model.save_dir(dir.path()).unwrap();
    let back = TwoStageModel::load_dir(dir.path()).unwrap();
    assert_eq!(back, model);
}

#[test]
fn needs_both_kinds_of_class() {
    let data = generate(&SyntheticConfig { classes: 2, train_per_class: 3, test_per_class: 1, ..SyntheticConfig::default() }).unwrap();
    let config = TrainConfig { max_epochs: 1, ..TrainConfig::default() };
    assert!(train_two_stage(&data.train, &data.descriptor, &small_extract(), &config).is_err());
}
