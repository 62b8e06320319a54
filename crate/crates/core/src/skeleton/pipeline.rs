use serde::{Deserialize, Serialize};

use crate::classifier::rank_actors;
use crate::error::{Error, Result};

use super::{
    augment, fill_clip, normalize_clip, AugmentConfig, BodyFrames, Centering, DatasetDescriptor,
    FeatureConfig, FeatureExtractor, FeatureMatrix, SkeletonClip,
};

/// Everything that turns raw clips into feature rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractConfig {
    pub centering: Centering,
    /// Most active actors stacked into one body (absent ones zero-filled).
    pub bodies: usize,
    pub seed: u64,
    pub features: FeatureConfig,
    pub augment: AugmentConfig,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            centering: Centering::Clip,
            bodies: 1,
            seed: 0,
            features: FeatureConfig::default(),
            augment: AugmentConfig::default(),
        }
    }
}

/// Normalizes, then fills gaps.
pub fn prepare_clip(clip: &SkeletonClip, centering: Centering) -> SkeletonClip {
    fill_clip(&normalize_clip(clip, centering))
}

/// Stacks the `bodies` most active actors of a prepared clip.
pub fn prepare_body(clip: &SkeletonClip, bodies: usize) -> Result<BodyFrames> {
    let ranked = rank_actors(clip);
    let present: Vec<usize> = ranked.into_iter().filter(|&a| clip.actor_present(a)).collect();
    if present.is_empty() {
        return Err(Error::input(format!("clip `{}` has no detected actor", clip.id)));
    }
    clip.body(&present, bodies)
}

/// Feature rows for `clips`, augmented when `train` is set. Rows follow the
/// input order, augmented copies right after their source clip.
pub fn extract_clips(
    clips: &[SkeletonClip],
    descriptor: &DatasetDescriptor,
    config: &ExtractConfig,
    train: bool,
) -> Result<(FeatureMatrix, Vec<usize>)> {
    if config.bodies == 0 {
        return Err(Error::input("bodies must be at least 1"));
    }
    let stacked = descriptor.stacked(config.bodies);
    let extractor = FeatureExtractor::new(&config.features, &stacked)?;
    let mut matrix = FeatureMatrix::new(extractor.dimensions().total, extractor.layout());
    let mut labels = Vec::new();
    for (i, clip) in clips.iter().enumerate() {
        let label = clip
            .label
            .ok_or_else(|| Error::input(format!("clip `{}` has no label", clip.id)))?;
        let prepared = prepare_clip(clip, config.centering);
        let variants = if train {
            let seed = config.seed.wrapping_add((i as u64).wrapping_mul(0x2545_F491_4F6C_DD1D));
            augment(&prepared, descriptor, &config.augment, seed)?
        } else {
            vec![prepared]
        };
        for v in &variants {
            let body = prepare_body(v, config.bodies)?;
            matrix.push_row(&extractor.extract(&body)?.values)?;
            labels.push(label);
        }
    }
    Ok((matrix, labels))
}
