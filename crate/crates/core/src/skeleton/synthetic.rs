//! Seeded generator of toy 2D skeleton actions.
//!
//! A 15-joint stick figure performs one of a few motion templates (hand wave,
//! arm circles, squat, walk in place) with random speed, phase, amplitude,
//! duration, body scale, placement and jitter. Classes listed in
//! `two_body_classes` add a second performer facing the first.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

use super::{DatasetDescriptor, SkeletonClip};

pub const JOINTS: usize = 15;

pub const JOINT_NAMES: [&str; JOINTS] = [
    "head", "neck", "torso", "l_shoulder", "l_elbow", "l_hand", "r_shoulder", "r_elbow",
    "r_hand", "l_hip", "l_knee", "l_foot", "r_hip", "r_knee", "r_foot",
];

pub const ACTION_NAMES: [&str; 4] = ["wave", "arm_circles", "squat", "walk"];

/// Rest pose, x to the performer's left, y up.
const REST: [[f64; 2]; JOINTS] = [
    [0.0, 1.7],
    [0.0, 1.5],
    [0.0, 1.1],
    [0.2, 1.45],
    [0.35, 1.2],
    [0.4, 0.95],
    [-0.2, 1.45],
    [-0.35, 1.2],
    [-0.4, 0.95],
    [0.12, 0.9],
    [0.14, 0.5],
    [0.15, 0.05],
    [-0.12, 0.9],
    [-0.14, 0.5],
    [-0.15, 0.05],
];

/// Descriptor of the generated skeleton: priority runs head to feet, the
/// mirror map swaps left and right limbs.
pub fn descriptor(class_names: Vec<String>) -> DatasetDescriptor {
    DatasetDescriptor {
        joints: JOINTS,
        dims: 2,
        priority: (0..JOINTS).collect(),
        mirror: vec![0, 1, 2, 6, 7, 8, 3, 4, 5, 12, 13, 14, 9, 10, 11],
        horizontal_axis: 0,
        class_names,
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub classes: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub min_frames: usize,
    pub max_frames: usize,
    /// Standard deviation of per-joint jitter, in rest-pose units.
    pub jitter: f64,
    pub two_body_classes: Vec<usize>,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            classes: 4,
            train_per_class: 50,
            test_per_class: 25,
            min_frames: 24,
            max_frames: 40,
            jitter: 0.02,
            two_body_classes: Vec::new(),
            seed: 7,
        }
    }
}

/// Train and test clips, labelled, interleaved by class.
pub struct SyntheticDataset {
    pub descriptor: DatasetDescriptor,
    pub train: Vec<SkeletonClip>,
    pub test: Vec<SkeletonClip>,
}

pub fn generate(config: &SyntheticConfig) -> Result<SyntheticDataset> {
    if config.classes == 0 || config.classes > ACTION_NAMES.len() * 2 {
        return Err(Error::input(format!(
            "synthetic generator supports 1..={} classes",
            ACTION_NAMES.len() * 2
        )));
    }
    if config.min_frames < 2 || config.min_frames > config.max_frames {
        return Err(Error::input("invalid synthetic frame range"));
    }
    let names = (0..config.classes)
        .map(|c| {
            let base = ACTION_NAMES[c % ACTION_NAMES.len()];
            if config.two_body_classes.contains(&c) {
                format!("{base}_pair")
            } else if c >= ACTION_NAMES.len() {
                format!("{base}_fast")
            } else {
                base.to_string()
            }
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut make = |count: usize, split: &str| -> Result<Vec<SkeletonClip>> {
        let mut clips = Vec::with_capacity(count * config.classes);
        for i in 0..count {
            for class in 0..config.classes {
                let id = format!("{split}-{class}-{i}");
                clips.push(clip(&mut rng, config, class, id)?.with_label(class));
            }
        }
        Ok(clips)
    };
    let train = make(config.train_per_class, "train")?;
    let test = make(config.test_per_class, "test")?;
    Ok(SyntheticDataset {
        descriptor: descriptor(names),
        train,
        test,
    })
}

struct Motion {
    action: usize,
    cycles: f64,
    phase: f64,
    amplitude: f64,
}

impl Motion {
    /// Displacement of joint `j` at normalized time `t` in `[0, 1]`.
    fn offset(&self, j: usize, t: f64) -> [f64; 2] {
        let w = TAU * self.cycles * t + self.phase;
        let a = self.amplitude;
        match self.action {
            // Right forearm swings side to side.
            0 => match j {
                8 => [-0.3 * a * w.sin(), 0.55 + 0.1 * a * w.cos()],
                7 => [-0.1 * a * w.sin(), 0.3],
                _ => [0.0, 0.0],
            },
            // Both hands trace circles in opposite directions.
            1 => match j {
                5 => [0.2 * a * w.cos(), 0.2 * a * w.sin()],
                8 => [-0.2 * a * w.cos(), 0.2 * a * w.sin()],
                4 | 7 => [0.0, 0.08 * a * w.sin()],
                _ => [0.0, 0.0],
            },
            // Upper body drops while the knees bend outwards.
            2 => {
                let depth = 0.25 * a * (0.5 - 0.5 * w.cos());
                match j {
                    0..=9 | 12 => [0.0, -depth],
                    10 => [0.5 * depth, -0.5 * depth],
                    13 => [-0.5 * depth, -0.5 * depth],
                    _ => [0.0, 0.0],
                }
            }
            // Legs alternate, arms counter-swing.
            _ => {
                let s = a * w.sin();
                match j {
                    11 => [0.25 * s, 0.08 * a * w.cos().max(0.0)],
                    10 => [0.12 * s, 0.04 * a * w.cos().max(0.0)],
                    14 => [-0.25 * s, 0.08 * a * (-w.cos()).max(0.0)],
                    13 => [-0.12 * s, 0.04 * a * (-w.cos()).max(0.0)],
                    5 => [-0.15 * s, 0.0],
                    8 => [0.15 * s, 0.0],
                    _ => [0.0, 0.0],
                }
            }
        }
    }
}

fn clip(rng: &mut ChaCha8Rng, config: &SyntheticConfig, class: usize, id: String) -> Result<SkeletonClip> {
    let frames = rng.gen_range(config.min_frames..=config.max_frames);
    let fast = class >= ACTION_NAMES.len() && !config.two_body_classes.contains(&class);
    let actors = if config.two_body_classes.contains(&class) { 2 } else { 1 };
    let jitter = Normal::new(0.0, config.jitter.max(0.0)).map_err(|e| Error::input(e.to_string()))?;
    let mut coords = vec![0.0; frames * actors * JOINTS * 2];
    for actor in 0..actors {
        let motion = Motion {
            action: class % ACTION_NAMES.len(),
            cycles: rng.gen_range(1.0..2.0) * if fast { 2.5 } else { 1.0 },
            phase: rng.gen_range(0.0..TAU),
            amplitude: rng.gen_range(0.8..1.2),
        };
        let scale = rng.gen_range(0.9..1.1);
        let facing = if actor == 0 { 1.0 } else { -1.0 };
        let origin = [rng.gen_range(-0.5..0.5) + 1.2 * actor as f64, rng.gen_range(-0.1..0.1)];
        for f in 0..frames {
            let t = f as f64 / (frames - 1) as f64;
            for j in 0..JOINTS {
                let o = motion.offset(j, t);
                let base = (f * actors + actor) * JOINTS + j;
                for c in 0..2 {
                    let mut v = (REST[j][c] + o[c]) * scale;
                    if c == 0 {
                        v *= facing;
                    }
                    coords[base * 2 + c] = v + origin[c] + jitter.sample(rng);
                }
            }
        }
    }
    SkeletonClip::dense(id, [frames, actors, JOINTS, 2], coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_balanced() {
        let cfg = SyntheticConfig {
            train_per_class: 3,
            test_per_class: 2,
            ..SyntheticConfig::default()
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.train.len(), 12);
        assert_eq!(a.test.len(), 8);
        for c in 0..4 {
            assert_eq!(a.train.iter().filter(|x| x.label == Some(c)).count(), 3);
        }
        a.descriptor.validate().unwrap();
    }

    #[test]
    fn two_body_classes_have_two_actors() {
        let cfg = SyntheticConfig {
            train_per_class: 1,
            test_per_class: 0,
            two_body_classes: vec![1],
            ..SyntheticConfig::default()
        };
        let d = generate(&cfg).unwrap();
        assert_eq!(d.train[0].actors(), 1);
        assert_eq!(d.train[1].actors(), 2);
        assert_eq!(d.descriptor.class_names[1], "arm_circles_pair");
    }
}
