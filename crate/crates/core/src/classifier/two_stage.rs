//! Body-count gate followed by a one-body or multi-body classifier.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::skeleton::{
    extract_clips, prepare_body, prepare_clip, DatasetDescriptor, ExtractConfig, FeatureExtractor,
    FeatureMatrix, FeatureScaler, SkeletonClip,
};

use super::{train, LinearNetModel, TrainConfig};

/// Classes whose mean detected-actor count exceeds this are multi-body.
pub const MULTI_BODY_THRESHOLD: f64 = 1.5;

/// Actors ordered by total joint displacement, most active first; ties keep
/// the original actor order.
pub fn rank_actors(clip: &SkeletonClip) -> Vec<usize> {
    let movement: Vec<f64> = (0..clip.actors())
        .map(|a| {
            let mut total = 0.0;
            for f in 1..clip.frames() {
                for j in 0..clip.joints() {
                    if clip.is_valid(f - 1, a, j) && clip.is_valid(f, a, j) {
                        let prev = clip.joint(f - 1, a, j);
                        let cur = clip.joint(f, a, j);
                        total += prev
                            .iter()
                            .zip(cur)
                            .map(|(p, c)| (c - p) * (c - p))
                            .sum::<f64>()
                            .sqrt();
                    }
                }
            }
            total
        })
        .collect();
    let mut order: Vec<usize> = (0..clip.actors()).collect();
    order.sort_by(|&a, &b| movement[b].total_cmp(&movement[a]));
    order
}

/// Mean detected actors per class and the resulting partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyCountTable {
    pub mean_actors: Vec<f64>,
    pub multi_body: Vec<bool>,
}

impl BodyCountTable {
    pub fn from_means(mean_actors: Vec<f64>) -> Self {
        let multi_body = mean_actors.iter().map(|&m| m > MULTI_BODY_THRESHOLD).collect();
        Self {
            mean_actors,
            multi_body,
        }
    }

    pub fn classes(&self, multi: bool) -> Vec<usize> {
        (0..self.multi_body.len())
            .filter(|&c| self.multi_body[c] == multi)
            .collect()
    }
}

/// Per-class mean of detected actors over labelled training clips.
pub fn stage_partition(clips: &[SkeletonClip], classes: usize) -> Result<BodyCountTable> {
    let mut sums = vec![0.0; classes];
    let mut counts = vec![0usize; classes];
    for clip in clips {
        let label = clip
            .label
            .filter(|&l| l < classes)
            .ok_or_else(|| Error::input(format!("clip `{}` lacks a valid label", clip.id)))?;
        sums[label] += clip.detected_actors() as f64;
        counts[label] += 1;
    }
    if let Some(c) = counts.iter().position(|&n| n == 0) {
        return Err(Error::input(format!("class {c} has no training clips")));
    }
    Ok(BodyCountTable::from_means(
        sums.iter().zip(&counts).map(|(s, &n)| s / n as f64).collect(),
    ))
}

/// One trained stage: model, its feature scaler, and the global class of each
/// local output.
#[derive(Debug, Clone, PartialEq)]
pub struct StageModel {
    pub model: LinearNetModel,
    pub scaler: FeatureScaler,
    pub classes: Vec<usize>,
    pub bodies: usize,
}

impl StageModel {
    fn classify(&self, clip: &SkeletonClip, descriptor: &DatasetDescriptor, extract: &ExtractConfig) -> Result<(usize, f64)> {
        let body = prepare_body(clip, self.bodies)?;
        let extractor = FeatureExtractor::new(&extract.features, &descriptor.stacked(self.bodies))?;
        let mut x = extractor.extract(&body)?.values;
        self.scaler.apply(&mut x)?;
        let (local, prob) = self.model.predict(&x)?;
        Ok((self.classes[local], prob))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    OneBody,
    MultiBody,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStagePrediction {
    pub stage: Stage,
    pub label: usize,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageModel {
    /// Outputs 0 = one-body, 1 = multi-body; always sees two bodies.
    pub gate: StageModel,
    pub one_body: StageModel,
    pub multi_body: StageModel,
    pub table: BodyCountTable,
    pub extract: ExtractConfig,
}

#[derive(Serialize, Deserialize)]
struct StageManifest {
    table: BodyCountTable,
    one_body_classes: Vec<usize>,
    multi_body_classes: Vec<usize>,
    extract: ExtractConfig,
}

const STAGES: [&str; 3] = ["gate", "one_body", "multi_body"];

impl TwoStageModel {
    fn stages(&self) -> [&StageModel; 3] {
        [&self.gate, &self.one_body, &self.multi_body]
    }

    /// Writes `stages.toml` plus a `.signet` model and `.scale` scaler per stage.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, stage) in STAGES.iter().zip(self.stages()) {
            stage.model.save(&dir.join(format!("{name}.signet")))?;
            let mut m = FeatureMatrix::new(stage.scaler.len(), Default::default());
            m.push_row(stage.scaler.scales())?;
            m.write(&dir.join(format!("{name}.scale")))?;
        }
        let manifest = StageManifest {
            table: self.table.clone(),
            one_body_classes: self.one_body.classes.clone(),
            multi_body_classes: self.multi_body.classes.clone(),
            extract: self.extract.clone(),
        };
        let path = dir.join("stages.toml");
        let text = toml::to_string(&manifest).expect("stage manifest serializes");
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        let path = dir.join("stages.toml");
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: StageManifest =
            toml::from_str(&text).map_err(|e| Error::format(&path, None, e.to_string()))?;
        let load = |name: &str, classes: Vec<usize>, bodies: usize| -> Result<StageModel> {
            let model = LinearNetModel::load(&dir.join(format!("{name}.signet")))?;
            let scale_path = dir.join(format!("{name}.scale"));
            let m = FeatureMatrix::read(&scale_path)?;
            if m.rows != 1 {
                return Err(Error::format(&scale_path, None, "scaler file must hold one row"));
            }
            let scaler = FeatureScaler::from_scales(m.data)
                .map_err(|e| Error::format(&scale_path, None, e.to_string()))?;
            Ok(StageModel {
                model,
                scaler,
                classes,
                bodies,
            })
        };
        Ok(Self {
            gate: load("gate", vec![0, 1], 2)?,
            one_body: load("one_body", manifest.one_body_classes, 1)?,
            multi_body: load("multi_body", manifest.multi_body_classes, 2)?,
            table: manifest.table,
            extract: manifest.extract,
        })
    }
}

fn train_stage(
    clips: &[SkeletonClip],
    descriptor: &DatasetDescriptor,
    extract: &ExtractConfig,
    config: &TrainConfig,
    classes: Vec<usize>,
    bodies: usize,
) -> Result<StageModel> {
    let cfg = ExtractConfig {
        bodies,
        ..extract.clone()
    };
    let (mut features, labels) = extract_clips(clips, descriptor, &cfg, true)?;
    let scaler = FeatureScaler::fit(features.iter_rows())?;
    for r in 0..features.rows {
        scaler.apply(features.row_mut(r))?;
    }
    let model = LinearNetModel::new(features.cols, classes.len(), config.clone())?;
    let outcome = train(model, &features, &labels, config)?;
    Ok(StageModel {
        model: outcome.model,
        scaler,
        classes,
        bodies,
    })
}

/// Trains the gate and both second-stage classifiers from labelled clips.
pub fn train_two_stage(
    clips: &[SkeletonClip],
    descriptor: &DatasetDescriptor,
    extract: &ExtractConfig,
    config: &TrainConfig,
) -> Result<TwoStageModel> {
    let classes = descriptor.class_names.len();
    let table = stage_partition(clips, classes)?;
    let one = table.classes(false);
    let multi = table.classes(true);
    if one.is_empty() || multi.is_empty() {
        return Err(Error::input(
            "two-stage training needs both one-body and multi-body classes",
        ));
    }
    let relabel = |keep: &[usize]| -> Vec<SkeletonClip> {
        clips
            .iter()
            .filter_map(|c| {
                let l = c.label?;
                let local = keep.iter().position(|&k| k == l)?;
                Some(c.clone().with_label(local))
            })
            .collect()
    };
    let gate_clips: Vec<SkeletonClip> = clips
        .iter()
        .map(|c| {
            let multi = table.multi_body[c.label.expect("checked by stage_partition")];
            c.clone().with_label(usize::from(multi))
        })
        .collect();
    Ok(TwoStageModel {
        gate: train_stage(&gate_clips, descriptor, extract, config, vec![0, 1], 2)?,
        one_body: train_stage(&relabel(&one), descriptor, extract, config, one, 1)?,
        multi_body: train_stage(&relabel(&multi), descriptor, extract, config, multi, 2)?,
        table,
        extract: extract.clone(),
    })
}

/// Routes a raw clip through the gate, then the matching classifier.
pub fn two_stage_predict(
    model: &TwoStageModel,
    clip: &SkeletonClip,
    descriptor: &DatasetDescriptor,
) -> Result<TwoStagePrediction> {
    if clip.detected_actors() == 0 {
        return Err(Error::input(format!("clip `{}` has no detected actor", clip.id)));
    }
    let prepared = prepare_clip(clip, model.extract.centering);
    let (gate, _) = model.gate.classify(&prepared, descriptor, &model.extract)?;
    let (stage, second) = if gate == 1 {
        (Stage::MultiBody, &model.multi_body)
    } else {
        (Stage::OneBody, &model.one_body)
    };
    let (label, probability) = second.classify(&prepared, descriptor, &model.extract)?;
    Ok(TwoStagePrediction {
        stage,
        label,
        probability,
    })
}
