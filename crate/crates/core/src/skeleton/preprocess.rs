//! Clip-level normalization, gap filling and training-set augmentation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transforms::fill_missing;

use super::{DatasetDescriptor, SkeletonClip};

/// Where the centering mean is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Centering {
    /// Mean of all valid joints of an actor over the whole clip.
    #[default]
    Clip,
    /// Mean of the valid joints of an actor in each frame.
    Frame,
}

/// Centers each actor, then divides by the clip-wide maximum absolute
/// coordinate so valid values land in `[-1, 1]`. Invalid entries are untouched.
pub fn normalize_clip(clip: &SkeletonClip, centering: Centering) -> SkeletonClip {
    let mut out = clip.clone();
    let (frames, joints, dims) = (clip.frames(), clip.joints(), clip.dims());
    for a in 0..clip.actors() {
        let groups: Vec<Vec<usize>> = match centering {
            Centering::Clip => vec![(0..frames).collect()],
            Centering::Frame => (0..frames).map(|f| vec![f]).collect(),
        };
        for group in groups {
            let mut mean = vec![0.0; dims];
            let mut count = 0usize;
            for &f in &group {
                for j in (0..joints).filter(|&j| clip.is_valid(f, a, j)) {
                    for (m, v) in mean.iter_mut().zip(clip.joint(f, a, j)) {
                        *m += v;
                    }
                    count += 1;
                }
            }
            if count == 0 {
                continue;
            }
            mean.iter_mut().for_each(|m| *m /= count as f64);
            for &f in &group {
                for j in (0..joints).filter(|&j| clip.is_valid(f, a, j)) {
                    for (v, m) in out.joint_mut(f, a, j).iter_mut().zip(&mean) {
                        *v -= m;
                    }
                }
            }
        }
    }
    let mut max_abs: f64 = 0.0;
    for f in 0..frames {
        for a in 0..clip.actors() {
            for j in (0..joints).filter(|&j| clip.is_valid(f, a, j)) {
                max_abs = out.joint(f, a, j).iter().fold(max_abs, |m, v| m.max(v.abs()));
            }
        }
    }
    let scale = if max_abs > 0.0 { max_abs } else { 1.0 };
    for f in 0..frames {
        for a in 0..clip.actors() {
            for j in (0..joints).filter(|&j| clip.is_valid(f, a, j)) {
                out.joint_mut(f, a, j).iter_mut().for_each(|v| *v /= scale);
            }
        }
    }
    out
}

/// Fills invalid frames of every `(actor, joint)` track; tracks without any
/// valid frame become zero and stay flagged invalid.
pub fn fill_clip(clip: &SkeletonClip) -> SkeletonClip {
    let mut out = clip.clone();
    let dims = clip.dims();
    for a in 0..clip.actors() {
        for j in 0..clip.joints() {
            let mask: Vec<bool> = (0..clip.frames()).map(|f| clip.is_valid(f, a, j)).collect();
            let series: Vec<f64> = (0..clip.frames())
                .flat_map(|f| clip.joint(f, a, j).iter().copied())
                .collect();
            let filled = fill_missing(&series, dims, &mask).expect("track shape is consistent");
            let any = mask.iter().any(|&m| m);
            for f in 0..clip.frames() {
                out.joint_mut(f, a, j)
                    .copy_from_slice(&filled[f * dims..(f + 1) * dims]);
                out.set_valid(f, a, j, any);
            }
        }
    }
    out
}

/// Negates the horizontal axis and swaps joints through the mirror map.
pub fn horizontal_flip(clip: &SkeletonClip, descriptor: &DatasetDescriptor) -> Result<SkeletonClip> {
    if descriptor.joints != clip.joints() || descriptor.dims != clip.dims() {
        return Err(Error::input("descriptor does not match clip shape"));
    }
    let axis = descriptor.horizontal_axis;
    let mut out = clip.clone();
    for f in 0..clip.frames() {
        for a in 0..clip.actors() {
            for j in 0..clip.joints() {
                let src = descriptor.mirror[j];
                let dst = out.joint_mut(f, a, j);
                dst.copy_from_slice(clip.joint(f, a, src));
                dst[axis] = -dst[axis];
                out.set_valid(f, a, j, clip.is_valid(f, a, src));
            }
        }
    }
    Ok(out)
}

/// Adds i.i.d. zero-mean Gaussian noise to every valid coordinate.
pub fn add_gaussian_noise(clip: &SkeletonClip, sigma: f64, seed: u64) -> Result<SkeletonClip> {
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::input(format!("invalid noise sigma {sigma}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = clip.clone();
    if sigma == 0.0 {
        return Ok(out);
    }
    for f in 0..clip.frames() {
        for a in 0..clip.actors() {
            for j in (0..clip.joints()).filter(|&j| clip.is_valid(f, a, j)) {
                out.joint_mut(f, a, j)
                    .iter_mut()
                    .for_each(|v| *v += normal.sample(&mut rng));
            }
        }
    }
    Ok(out)
}

/// How many augmented copies each training clip contributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentConfig {
    pub flip: bool,
    pub noisy_copies: usize,
    pub noise_sigma: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            flip: true,
            noisy_copies: 2,
            noise_sigma: 0.01,
        }
    }
}

impl AugmentConfig {
    pub fn none() -> Self {
        Self {
            flip: false,
            noisy_copies: 0,
            noise_sigma: 0.0,
        }
    }

    pub fn multiplicity(&self) -> usize {
        1 + usize::from(self.flip) + self.noisy_copies
    }
}

/// The clean clip followed by its flipped copy and noisy copies. Noise is
/// added to the clean clip only.
pub fn augment(
    clip: &SkeletonClip,
    descriptor: &DatasetDescriptor,
    config: &AugmentConfig,
    seed: u64,
) -> Result<Vec<SkeletonClip>> {
    let mut out = Vec::with_capacity(config.multiplicity());
    out.push(clip.clone());
    if config.flip {
        out.push(horizontal_flip(clip, descriptor)?);
    }
    for copy in 0..config.noisy_copies {
        let copy_seed = seed ^ (copy as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        out.push(add_gaussian_noise(clip, config.noise_sigma, copy_seed)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    fn clip(coords: Vec<f64>, shape: [usize; 4]) -> SkeletonClip {
        SkeletonClip::dense("t", shape, coords).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let c = clip(vec![1.0, 1.0, 3.0, 3.0], [1, 1, 2, 2]);
        let n = normalize_clip(&c, Centering::Clip);
        assert_eq!(n.coords(), &[-1.0, -1.0, 1.0, 1.0]);
        // Already centered with max-abs 1.
        assert_eq!(normalize_clip(&n, Centering::Clip), n);
        let z = clip(vec![0.0; 8], [2, 1, 2, 2]);
        assert_eq!(normalize_clip(&z, Centering::Clip), z);
    }

    #[test]
    fn normalize_uses_uniform_scale() {
        let c = clip(vec![0.0, 0.0, 4.0, 1.0], [1, 1, 2, 2]);
        let n = normalize_clip(&c, Centering::Clip);
        assert_eq!(n.coords(), &[-1.0, -0.25, 1.0, 0.25]);
    }

    #[test]
    fn normalize_ignores_invalid_entries() {
        let mut c = clip(vec![1.0, 1.0, 3.0, 3.0, 100.0, 100.0], [1, 1, 3, 2]);
        c.set_valid(0, 0, 2, false);
        let n = normalize_clip(&c, Centering::Clip);
        assert_eq!(&n.coords()[..4], &[-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn flip_examples() {
        let d = DatasetDescriptor::plain(2, 2, vec![]);
        let c = clip(vec![0.5, 0.2, -0.1, 0.3], [1, 1, 2, 2]);
        let f = horizontal_flip(&c, &d).unwrap();
        assert_eq!(f.joint(0, 0, 0), &[-0.5, 0.2]);
        assert_eq!(horizontal_flip(&f, &d).unwrap(), c);

        let mut swap = d.clone();
        swap.mirror = vec![1, 0];
        let f = horizontal_flip(&c, &swap).unwrap();
        assert_eq!(f.joint(0, 0, 0), &[0.1, 0.3]);
        assert_eq!(f.joint(0, 0, 1), &[-0.5, 0.2]);
    }

    #[test]
    fn noise_zero_and_determinism() {
        let c = clip((0..40).map(|i| i as f64 * 0.01).collect(), [5, 1, 4, 2]);
        assert_eq!(add_gaussian_noise(&c, 0.0, 3).unwrap(), c);
        let a = add_gaussian_noise(&c, 0.01, 7).unwrap();
        let b = add_gaussian_noise(&c, 0.01, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, add_gaussian_noise(&c, 0.01, 8).unwrap());
    }

    #[test]
    fn noise_standard_deviation() {
        // 50_000 entries x 2 coordinates = 10^5 samples.
        let c = clip(vec![0.0; 100_000], [25_000, 1, 2, 2]);
        let sigma = 0.01;
        let noisy = add_gaussian_noise(&c, sigma, 42).unwrap();
        let n = noisy.coords().len() as f64;
        let mean = noisy.coords().iter().sum::<f64>() / n;
        let var = noisy.coords().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert_relative_eq!(var.sqrt(), sigma, max_relative = 0.02);
    }

    #[test]
    fn fill_clip_zero_fills_absent_actor() {
        let mut c = clip(vec![1.0; 2 * 2 * 2 * 2], [2, 2, 2, 2]);
        for f in 0..2 {
            for j in 0..2 {
                c.set_valid(f, 1, j, false);
            }
        }
        let filled = fill_clip(&c);
        assert_eq!(filled.joint(1, 1, 1), &[0.0, 0.0]);
        assert!(!filled.is_valid(0, 1, 0));
        assert_eq!(filled.joint(1, 0, 1), &[1.0, 1.0]);
    }

    #[test]
    fn augment_multiplicity() {
        let d = DatasetDescriptor::plain(2, 2, vec![]);
        let c = clip(vec![0.1, 0.2, 0.3, 0.4], [1, 1, 2, 2]);
        let out = augment(&c, &d, &AugmentConfig::default(), 1).unwrap();
        assert_eq!(out.len(), 4);
        assert_eq!(out[0], c);
        assert_ne!(out[2], out[3]);
        assert_eq!(augment(&c, &d, &AugmentConfig::none(), 1).unwrap().len(), 1);
    }
}
