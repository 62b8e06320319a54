//! Spatial and temporal signature features of a body sequence.
//!
//! Per sampled frame the vector holds the raw joints (S-J), the pair pathlet
//! signatures (S-P-PSF) and the triple pathlet signatures (S-T-PSF). After
//! the sampled frames come the joint-trajectory signatures (T-J-PSF) and the
//! lead-lag signatures of every spatial feature's evolution (T-S-PSF).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigcore::{signature_dimension, signature_into, Scratch};
use crate::transforms::{dyadic_windows, uniform_sample, IndexWindow};

use super::{BodyFrames, DatasetDescriptor};

/// Which feature blocks to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlockSelection {
    pub joints: bool,
    pub pairs: bool,
    pub triples: bool,
    pub temporal_joints: bool,
    pub temporal_spatial: bool,
}

impl Default for BlockSelection {
    fn default() -> Self {
        Self {
            joints: true,
            pairs: true,
            triples: true,
            temporal_joints: true,
            temporal_spatial: true,
        }
    }
}

impl BlockSelection {
    pub fn spatial_only() -> Self {
        Self {
            temporal_joints: false,
            temporal_spatial: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// Frames sampled for the spatial blocks (M).
    pub sampled_frames: usize,
    pub pair_level: usize,
    pub triple_level: usize,
    pub joint_time_level: usize,
    pub spatial_time_level: usize,
    pub lead_lag_dim: usize,
    /// Dyadic windows for the temporal blocks.
    pub dpsf: bool,
    pub dpsf_depth: usize,
    pub blocks: BlockSelection,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            sampled_frames: 10,
            pair_level: 2,
            triple_level: 4,
            joint_time_level: 5,
            spatial_time_level: 2,
            lead_lag_dim: 3,
            dpsf: false,
            dpsf_depth: 3,
            blocks: BlockSelection::default(),
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        let levels = [
            ("sampled_frames", self.sampled_frames),
            ("pair_level", self.pair_level),
            ("triple_level", self.triple_level),
            ("joint_time_level", self.joint_time_level),
            ("spatial_time_level", self.spatial_time_level),
            ("lead_lag_dim", self.lead_lag_dim),
            ("dpsf_depth", self.dpsf_depth),
        ];
        for (name, v) in levels {
            if v == 0 {
                return Err(Error::input(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    fn window_count(&self) -> usize {
        if self.dpsf {
            (1 << self.dpsf_depth) - 1
        } else {
            1
        }
    }

    /// Closed-form block widths for a skeleton of `joints` joints in `dims` dimensions.
    pub fn dimensions(&self, joints: usize, dims: usize) -> FeatureDimensions {
        let b = &self.blocks;
        let sig = |d: usize, n: usize| signature_dimension(d as u64, n as u32, false) as usize;
        let on = |flag: bool, v: usize| if flag { v } else { 0 };
        let pairs = joints * (joints - 1) / 2;
        let triples = pairs * (joints - 2) / 3;
        let joint_width = on(b.joints, joints * dims);
        let pair_width = on(b.pairs, pairs * sig(dims, self.pair_level));
        let triple_width = on(b.triples, triples * sig(dims, self.triple_level));
        let spatial = pair_width + triple_width;
        let windows = self.window_count();
        let temporal_joints = on(
            b.temporal_joints,
            joints * sig(dims + 1, self.joint_time_level) * windows,
        );
        let temporal_spatial = on(
            b.temporal_spatial,
            spatial * sig(self.lead_lag_dim, self.spatial_time_level) * windows,
        );
        let temporal = temporal_joints + temporal_spatial;
        FeatureDimensions {
            joints: joint_width,
            pairs: pair_width,
            triples: triple_width,
            spatial,
            temporal_joints,
            temporal_spatial,
            temporal,
            total: self.sampled_frames * (joint_width + spatial) + temporal,
        }
    }
}

/// Widths of the blocks; spatial widths are per frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureDimensions {
    /// D_sj
    pub joints: usize,
    /// D_SP
    pub pairs: usize,
    /// D_ST
    pub triples: usize,
    /// D_S = D_SP + D_ST
    pub spatial: usize,
    /// D_TJ
    pub temporal_joints: usize,
    /// D_TS
    pub temporal_spatial: usize,
    /// D_T = D_TJ + D_TS
    pub temporal: usize,
    /// M (D_sj + D_S) + D_T
    pub total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Joints,
    Pairs,
    Triples,
    TemporalJoints,
    TemporalSpatial,
}

impl BlockKind {
    pub const ALL: [BlockKind; 5] = [
        BlockKind::Joints,
        BlockKind::Pairs,
        BlockKind::Triples,
        BlockKind::TemporalJoints,
        BlockKind::TemporalSpatial,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            BlockKind::Joints => "S-J",
            BlockKind::Pairs => "S-P-PSF",
            BlockKind::Triples => "S-T-PSF",
            BlockKind::TemporalJoints => "T-J-PSF",
            BlockKind::TemporalSpatial => "T-S-PSF",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.tag())
    }
}

/// A contiguous run of one block inside the feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpan {
    pub kind: BlockKind,
    /// Sampled-frame slot for spatial blocks.
    pub frame: Option<usize>,
    pub offset: usize,
    pub width: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureLayout {
    pub spans: Vec<BlockSpan>,
}

impl FeatureLayout {
    fn push(&mut self, kind: BlockKind, frame: Option<usize>, width: usize) {
        if width == 0 {
            return;
        }
        let offset = self.len();
        self.spans.push(BlockSpan {
            kind,
            frame,
            offset,
            width,
        });
    }

    /// Total width of the vector.
    pub fn len(&self) -> usize {
        self.spans.last().map_or(0, |s| s.offset + s.width)
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Summed width of every span of `kind`.
    pub fn width(&self, kind: BlockKind) -> usize {
        self.spans.iter().filter(|s| s.kind == kind).map(|s| s.width).sum()
    }
}

/// A fixed-length feature vector and the layout it was assembled with.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub layout: FeatureLayout,
}

/// All `size`-joint combinations, lexicographic in priority rank; each tuple
/// lists its joints from highest to lowest priority.
pub fn enumerate_pathlets(joints: usize, size: usize, priority: &[usize]) -> Result<Vec<Vec<usize>>> {
    if priority.len() != joints {
        return Err(Error::input("priority order length differs from joint count"));
    }
    if size == 0 || size > joints {
        return Err(Error::input(format!("cannot form {size}-joint pathlets from {joints} joints")));
    }
    let mut out = Vec::new();
    let mut ranks: Vec<usize> = (0..size).collect();
    loop {
        out.push(ranks.iter().map(|&r| priority[r]).collect());
        // Advance to the next combination of ranks.
        let Some(i) = (0..size).rev().find(|&i| ranks[i] < joints - size + i) else {
            break;
        };
        ranks[i] += 1;
        for k in i + 1..size {
            ranks[k] = ranks[k - 1] + 1;
        }
    }
    Ok(out)
}

/// Feature extractor bound to one configuration and skeleton layout.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    config: FeatureConfig,
    joints: usize,
    dims: usize,
    pairs: Vec<[usize; 2]>,
    triples: Vec<[usize; 3]>,
    dimensions: FeatureDimensions,
}

impl FeatureExtractor {
    pub fn new(config: &FeatureConfig, descriptor: &DatasetDescriptor) -> Result<Self> {
        config.validate()?;
        descriptor.validate()?;
        let n = descriptor.joints;
        let pairs = enumerate_pathlets(n, 2, &descriptor.priority)?
            .into_iter()
            .map(|t| [t[0], t[1]])
            .collect();
        let triples = if n >= 3 {
            enumerate_pathlets(n, 3, &descriptor.priority)?
                .into_iter()
                .map(|t| [t[0], t[1], t[2]])
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            config: config.clone(),
            joints: n,
            dims: descriptor.dims,
            pairs,
            triples,
            dimensions: config.dimensions(n, descriptor.dims),
        })
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn dimensions(&self) -> FeatureDimensions {
        self.dimensions
    }

    /// The layout every extracted vector will carry.
    pub fn layout(&self) -> FeatureLayout {
        let dims = &self.dimensions;
        let mut layout = FeatureLayout::default();
        for m in 0..self.config.sampled_frames {
            layout.push(BlockKind::Joints, Some(m), dims.joints);
            layout.push(BlockKind::Pairs, Some(m), dims.pairs);
            layout.push(BlockKind::Triples, Some(m), dims.triples);
        }
        layout.push(BlockKind::TemporalJoints, None, dims.temporal_joints);
        layout.push(BlockKind::TemporalSpatial, None, dims.temporal_spatial);
        layout
    }

    fn check_body(&self, body: &BodyFrames) -> Result<()> {
        if body.joints() != self.joints || body.dims() != self.dims {
            return Err(Error::input(format!(
                "body has {} joints in {}D, extractor expects {} joints in {}D",
                body.joints(),
                body.dims(),
                self.joints,
                self.dims
            )));
        }
        Ok(())
    }

    /// Spatial pathlet signatures of one frame (`joints x dims`, row-major):
    /// the pair block then the triple block, width D_S.
    pub fn spatial_psf(&self, frame: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimensions.spatial];
        self.spatial_psf_into(frame, &mut out, &mut Scratch::default());
        out
    }

    fn spatial_psf_into(&self, frame: &[f64], out: &mut [f64], scratch: &mut Scratch) {
        let d = self.dims;
        let b = &self.config.blocks;
        let mut pos = 0;
        let mut buf = [0.0; 9];
        if b.pairs {
            let w = self.dimensions.pairs / self.pairs.len();
            for pair in &self.pairs {
                for (slot, &j) in pair.iter().enumerate() {
                    buf[slot * d..(slot + 1) * d].copy_from_slice(&frame[j * d..(j + 1) * d]);
                }
                signature_into(&buf[..2 * d], d, self.config.pair_level, &mut out[pos..pos + w], scratch);
                pos += w;
            }
        }
        if b.triples && !self.triples.is_empty() {
            let w = self.dimensions.triples / self.triples.len();
            for triple in &self.triples {
                for (slot, &j) in triple.iter().enumerate() {
                    buf[slot * d..(slot + 1) * d].copy_from_slice(&frame[j * d..(j + 1) * d]);
                }
                signature_into(&buf[..3 * d], d, self.config.triple_level, &mut out[pos..pos + w], scratch);
                pos += w;
            }
        }
    }

    /// Raw joints and spatial signatures of one frame, width D_sj + D_S.
    pub fn spatial_features(&self, frame: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dimensions.joints + self.dimensions.spatial);
        if self.config.blocks.joints {
            out.extend_from_slice(frame);
        }
        out.extend(self.spatial_psf(frame));
        out
    }

    fn windows(&self, frames: usize) -> Result<Vec<IndexWindow>> {
        if self.config.dpsf {
            dyadic_windows(frames, self.config.dpsf_depth)
        } else {
            Ok(vec![IndexWindow {
                start: 0,
                end: frames.saturating_sub(1),
                level: 0,
            }])
        }
    }

    /// T-J-PSF: signature of every time-augmented joint trajectory.
    pub fn temporal_joint_features(&self, body: &BodyFrames) -> Result<Vec<f64>> {
        self.check_body(body)?;
        let windows = self.windows(body.frames())?;
        let td = self.dims + 1;
        let level = self.config.joint_time_level;
        let w = signature_dimension(td as u64, level as u32, false) as usize;
        let frames = body.frames();
        let mut out = vec![0.0; self.joints * windows.len() * w];
        let mut path = vec![0.0; frames * td];
        let mut scratch = Scratch::default();
        let mut pos = 0;
        for j in 0..self.joints {
            for f in 0..frames {
                path[f * td..f * td + self.dims].copy_from_slice(body.joint(f, j));
                path[f * td + self.dims] = if frames > 1 {
                    f as f64 / (frames - 1) as f64
                } else {
                    0.0
                };
            }
            for win in &windows {
                let seg = &path[win.start * td..(win.end + 1) * td];
                signature_into(seg, td, level, &mut out[pos..pos + w], &mut scratch);
                pos += w;
            }
        }
        Ok(out)
    }

    /// T-S-PSF: lead-lag signatures of each spatial signature dimension's
    /// evolution over all frames.
    pub fn temporal_spatial_features(&self, body: &BodyFrames) -> Result<Vec<f64>> {
        self.check_body(body)?;
        let spatial = self.spatial_psf_all_frames(body);
        self.temporal_spatial_from(&spatial, body.frames())
    }

    /// Frame-major `frames x D_S` matrix of spatial signatures.
    fn spatial_psf_all_frames(&self, body: &BodyFrames) -> Vec<f64> {
        let ds = self.dimensions.spatial;
        let mut all = vec![0.0; body.frames() * ds];
        let mut scratch = Scratch::default();
        for f in 0..body.frames() {
            self.spatial_psf_into(body.frame(f), &mut all[f * ds..(f + 1) * ds], &mut scratch);
        }
        all
    }

    fn temporal_spatial_from(&self, spatial: &[f64], frames: usize) -> Result<Vec<f64>> {
        let windows = self.windows(frames)?;
        let ds = self.dimensions.spatial;
        let lag = self.config.lead_lag_dim;
        let level = self.config.spatial_time_level;
        let w = signature_dimension(lag as u64, level as u32, false) as usize;
        let mut out = vec![0.0; ds * windows.len() * w];
        let mut path = vec![0.0; frames * lag];
        let mut scratch = Scratch::default();
        let mut pos = 0;
        for c in 0..ds {
            // Delay-by-j copies with zero front padding.
            for t in 0..frames {
                for j in 0..lag {
                    path[t * lag + j] = if t >= j { spatial[(t - j) * ds + c] } else { 0.0 };
                }
            }
            for win in &windows {
                let seg = &path[win.start * lag..(win.end + 1) * lag];
                signature_into(seg, lag, level, &mut out[pos..pos + w], &mut scratch);
                pos += w;
            }
        }
        Ok(out)
    }

    /// The full fixed-length vector: M sampled spatial frames, then T-J-PSF,
    /// then T-S-PSF.
    pub fn extract(&self, body: &BodyFrames) -> Result<FeatureVector> {
        self.check_body(body)?;
        let layout = self.layout();
        let dims = &self.dimensions;
        let b = &self.config.blocks;
        let frames = body.frames();
        let mut values = Vec::with_capacity(dims.total);
        let spatial = if b.temporal_spatial {
            Some(self.spatial_psf_all_frames(body))
        } else {
            None
        };
        let mut scratch = Scratch::default();
        let mut frame_psf = vec![0.0; dims.spatial];
        for f in uniform_sample(frames, self.config.sampled_frames)? {
            if b.joints {
                values.extend_from_slice(body.frame(f));
            }
            match &spatial {
                Some(all) => values.extend_from_slice(&all[f * dims.spatial..(f + 1) * dims.spatial]),
                None => {
                    self.spatial_psf_into(body.frame(f), &mut frame_psf, &mut scratch);
                    values.extend_from_slice(&frame_psf);
                }
            }
        }
        if b.temporal_joints {
            values.extend(self.temporal_joint_features(body)?);
        }
        if let Some(all) = &spatial {
            values.extend(self.temporal_spatial_from(all, frames)?);
        }
        debug_assert_eq!(values.len(), layout.len());
        Ok(FeatureVector { values, layout })
    }
}

/// One-shot wrapper over [`FeatureExtractor::spatial_features`].
pub fn spatial_features(frame: &[f64], config: &FeatureConfig, descriptor: &DatasetDescriptor) -> Result<Vec<f64>> {
    let ex = FeatureExtractor::new(config, descriptor)?;
    if frame.len() != descriptor.joints * descriptor.dims {
        return Err(Error::input("frame size does not match descriptor"));
    }
    Ok(ex.spatial_features(frame))
}

/// One-shot wrapper over [`FeatureExtractor::temporal_joint_features`].
pub fn temporal_joint_features(body: &BodyFrames, config: &FeatureConfig, descriptor: &DatasetDescriptor) -> Result<Vec<f64>> {
    FeatureExtractor::new(config, descriptor)?.temporal_joint_features(body)
}

/// One-shot wrapper over [`FeatureExtractor::temporal_spatial_features`].
pub fn temporal_spatial_features(body: &BodyFrames, config: &FeatureConfig, descriptor: &DatasetDescriptor) -> Result<Vec<f64>> {
    FeatureExtractor::new(config, descriptor)?.temporal_spatial_features(body)
}

/// One-shot wrapper over [`FeatureExtractor::extract`].
pub fn assemble_features(body: &BodyFrames, config: &FeatureConfig, descriptor: &DatasetDescriptor) -> Result<FeatureVector> {
    FeatureExtractor::new(config, descriptor)?.extract(body)
}
