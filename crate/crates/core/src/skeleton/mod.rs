//! Skeleton clips and the signature feature stack built from them.

mod clip;
pub mod featfile;
mod features;
mod pipeline;
mod preprocess;
mod scaler;
pub mod synthetic;

pub use clip::{BodyFrames, DatasetDescriptor, SkeletonClip};
pub use featfile::{read_labels, write_labels, FeatureMatrix};
pub use features::{
    assemble_features, enumerate_pathlets, spatial_features, temporal_joint_features,
    temporal_spatial_features, BlockKind, BlockSelection, BlockSpan, FeatureConfig,
    FeatureDimensions, FeatureExtractor, FeatureLayout, FeatureVector,
};
pub use pipeline::{extract_clips, prepare_body, prepare_clip, ExtractConfig};
pub use preprocess::{
    add_gaussian_noise, augment, fill_clip, horizontal_flip, normalize_clip, AugmentConfig,
    Centering,
};
pub use scaler::{apply_scaler, fit_scaler, FeatureScaler};
