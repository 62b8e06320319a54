use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skelsig::skeleton::{
    enumerate_pathlets, BlockKind, BlockSelection, BodyFrames, DatasetDescriptor, FeatureConfig, FeatureExtractor,
};

fn descriptor(joints: usize, dims: usize) -> DatasetDescriptor {
    DatasetDescriptor::plain(joints, dims, vec!["a".into(), "b".into()])
}

fn random_body(rng: &mut ChaCha8Rng, frames: usize, joints: usize, dims: usize) -> BodyFrames {
    let coords = (0..frames * joints * dims).map(|_| rng.gen_range(-1.0..1.0)).collect();
    BodyFrames::new(frames, joints, dims, coords).unwrap()
}

fn width_for(config: &FeatureConfig, kind: BlockKind) -> usize {
    FeatureExtractor::new(config, &descriptor(15, 2)).unwrap().layout().width(kind)
}

#[test]
fn pair_widths_match_table() {
    for (level, expected) in [(1, 2100), (2, 6300), (3, 14700), (4, 31500)] {
        let config = FeatureConfig { pair_level: level, ..FeatureConfig::default() };
        assert_eq!(width_for(&config, BlockKind::Pairs), expected, "level {level}");
    }
}

#[test]
fn triple_widths_match_table() {
    let expected = [9100, 27300, 63700, 136500, 282100, 573300];
    for (level, &want) in (1..=6).zip(&expected) {
        let config = FeatureConfig { triple_level: level, ..FeatureConfig::default() };
        assert_eq!(width_for(&config, BlockKind::Triples), want, "level {level}");
    }
}

#[test]
fn default_dimensions() {
    let dims = FeatureConfig::default().dimensions(15, 2);
    assert_eq!(dims.joints, 30);
    assert_eq!(dims.pairs, 630);
    assert_eq!(dims.triples, 13_650);
    assert_eq!(dims.spatial, 14_280);
    assert_eq!(dims.temporal_joints, 5445);
    assert_eq!(dims.temporal_spatial, 171_360);
    assert_eq!(dims.total, 319_905);
    let layout = FeatureExtractor::new(&FeatureConfig::default(), &descriptor(15, 2)).unwrap().layout();
    assert_eq!(layout.len(), 319_905);
    let sum: usize = BlockKind::ALL.iter().map(|&k| layout.width(k)).sum();
    assert_eq!(sum, layout.len());
}

#[test]
fn spatial_only_without_triples() {
    let config = FeatureConfig {
        blocks: BlockSelection { triples: false, ..BlockSelection::spatial_only() },
        ..FeatureConfig::default()
    };
    assert_eq!(config.dimensions(15, 2).total, 6600);
}

#[test]
fn dpsf_multiplies_temporal_width() {
    let config = FeatureConfig { dpsf: true, ..FeatureConfig::default() };
    let dims = config.dimensions(15, 2);
    assert_eq!(dims.temporal_spatial, 14_280 * 84);
    assert_eq!(dims.temporal_joints, 5445 * 7);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let small = FeatureConfig { dpsf: true, sampled_frames: 3, ..FeatureConfig::default() };
    let ex = FeatureExtractor::new(&small, &descriptor(3, 2)).unwrap();
    let body = random_body(&mut rng, 12, 3, 2);
    let ts = ex.temporal_spatial_features(&body).unwrap();
    assert_eq!(ts.len(), ex.dimensions().spatial * 84);
    assert_eq!(ex.extract(&body).unwrap().values.len(), ex.dimensions().total);
}

#[test]
fn pathlet_counts_and_order() {
    let pairs = enumerate_pathlets(4, 2, &[0, 1, 2, 3]).unwrap();
    assert_eq!(pairs, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    assert_eq!(enumerate_pathlets(15, 2, &(0..15).collect::<Vec<_>>()).unwrap().len(), 105);
    assert_eq!(enumerate_pathlets(15, 3, &(0..15).collect::<Vec<_>>()).unwrap().len(), 455);
    // Tuples follow priority rank, not joint id.
    let ranked = enumerate_pathlets(3, 2, &[2, 0, 1]).unwrap();
    assert_eq!(ranked, vec![vec![2, 0], vec![2, 1], vec![0, 1]]);
}

#[test]
fn translation_moves_only_raw_joints() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let config = FeatureConfig { sampled_frames: 4, triple_level: 3, ..FeatureConfig::default() };
    let ex = FeatureExtractor::new(&config, &descriptor(5, 2)).unwrap();
    let body = random_body(&mut rng, 9, 5, 2);
    let shifted: Vec<f64> = body.coords().iter().enumerate().map(|(i, v)| v + if i % 2 == 0 { 0.75 } else { -0.5 }).collect();
    let moved = BodyFrames::new(9, 5, 2, shifted).unwrap();
    let a = ex.extract(&body).unwrap();
    let b = ex.extract(&moved).unwrap();
    let mut joints_differ = false;
    for span in &a.layout.spans {
        let (x, y) = (&a.values[span.offset..span.offset + span.width], &b.values[span.offset..span.offset + span.width]);
        match span.kind {
            BlockKind::Joints => joints_differ |= x != y,
            BlockKind::Pairs | BlockKind::Triples => {
                for (p, q) in x.iter().zip(y) {
                    assert!((p - q).abs() <= 1e-12 * p.abs().max(1.0), "{:?}", span.kind);
                }
            }
            _ => {}
        }
    }
    assert!(joints_differ);
}

#[test]
fn interpolated_frame_leaves_joint_trajectories_unchanged() {
    // Frames at relative times 0, 1/2, 1; inserting interpolants at 1/4 and
    // 3/4 keeps every time-augmented trajectory on the same polyline.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let config = FeatureConfig::default();
    let ex = FeatureExtractor::new(&config, &descriptor(4, 2)).unwrap();
    let body = random_body(&mut rng, 3, 4, 2);
    let mut coords = Vec::new();
    for f in 0..3 {
        coords.extend_from_slice(body.frame(f));
        if f < 2 {
            let mid: Vec<f64> = body.frame(f).iter().zip(body.frame(f + 1)).map(|(a, b)| 0.5 * (a + b)).collect();
            coords.extend(mid);
        }
    }
    let refined = BodyFrames::new(5, 4, 2, coords).unwrap();
    let a = ex.temporal_joint_features(&body).unwrap();
    let b = ex.temporal_joint_features(&refined).unwrap();
    for (p, q) in a.iter().zip(&b) {
        assert!((p - q).abs() <= 1e-10 * p.abs().max(1.0));
    }
}

#[test]
fn length_does_not_depend_on_frame_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let config = FeatureConfig { triple_level: 2, ..FeatureConfig::default() };
    let ex = FeatureExtractor::new(&config, &descriptor(5, 3)).unwrap();
    let lengths: Vec<usize> = [1, 2, 7, 30, 61]
        .iter()
        .map(|&f| ex.extract(&random_body(&mut rng, f, 5, 3)).unwrap().values.len())
        .collect();
    assert!(lengths.iter().all(|&l| l == ex.dimensions().total));
}

#[test]
fn stationary_joint_sees_only_time() {
    let config = FeatureConfig { joint_time_level: 4, ..FeatureConfig::default() };
    let ex = FeatureExtractor::new(&config, &descriptor(2, 2)).unwrap();
    let mut coords = Vec::new();
    for f in 0..6 {
        coords.extend_from_slice(&[0.3, -0.2, f as f64 * 0.1, 0.0]);
    }
    let body = BodyFrames::new(6, 2, 2, coords).unwrap();
    let tj = ex.temporal_joint_features(&body).unwrap();
    let per = tj.len() / 2;
    let joint0 = &tj[..per];
    // Levels of a 3-letter alphabet; the time axis is letter 2.
    let (mut offset, mut fact) = (0, 1.0);
    for k in 1..=4u32 {
        fact *= k as f64;
        let size = 3usize.pow(k);
        let all_time = (0..k).fold(0, |acc, _| acc * 3 + 2);
        for idx in 0..size {
            let want = if idx == all_time { 1.0 / fact } else { 0.0 };
            assert!((joint0[offset + idx] - want).abs() <= 1e-14, "level {k} index {idx}");
        }
        offset += size;
    }
}

#[test]
fn single_frame_has_zero_temporal_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ex = FeatureExtractor::new(&FeatureConfig::default(), &descriptor(4, 2)).unwrap();
    let body = random_body(&mut rng, 1, 4, 2);
    assert!(ex.temporal_joint_features(&body).unwrap().iter().all(|&v| v == 0.0));
    assert!(ex.temporal_spatial_features(&body).unwrap().iter().all(|&v| v == 0.0));
}

#[test]
fn coincident_pathlet_is_zero() {
    let ex = FeatureExtractor::new(&FeatureConfig::default(), &descriptor(3, 2)).unwrap();
    let psf = ex.spatial_psf(&[0.5, 0.5, 0.5, 0.5, 0.5, 0.5]);
    assert!(psf.iter().all(|&v| v == 0.0));
}

#[test]
fn identical_bodies_give_identical_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let body = random_body(&mut rng, 11, 6, 2);
    let ex = FeatureExtractor::new(&FeatureConfig::default(), &descriptor(6, 2)).unwrap();
    assert_eq!(ex.extract(&body).unwrap().values, ex.extract(&body.clone()).unwrap().values);
}
