use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sigcore::{path_signature, signature_dimension, DiscretePath};

/// Wall-clock statistics of repeated signature computations.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub dim: usize,
    pub level: usize,
    pub points: usize,
    pub repeats: usize,
    pub coefficients: u128,
    pub min_secs: f64,
    pub mean_secs: f64,
    pub max_secs: f64,
}

impl std::fmt::Display for BenchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "dim: {}", self.dim)?;
        writeln!(f, "level: {}", self.level)?;
        writeln!(f, "points: {}", self.points)?;
        writeln!(f, "repeats: {}", self.repeats)?;
        writeln!(f, "coefficients: {}", self.coefficients)?;
        writeln!(f, "min_secs: {:.6}", self.min_secs)?;
        writeln!(f, "mean_secs: {:.6}", self.mean_secs)?;
        write!(f, "max_secs: {:.6}", self.max_secs)
    }
}

/// Random walk of `points` samples in `dim` dimensions with uniform steps.
pub fn random_path(dim: usize, points: usize, seed: u64) -> Result<DiscretePath> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(dim * points);
    let mut cur = vec![0.0; dim];
    for _ in 0..points {
        coords.extend_from_slice(&cur);
        cur.iter_mut().for_each(|c| *c += rng.gen_range(-0.1..0.1));
    }
    DiscretePath::new(dim, coords)
}

pub fn run_bench(dim: usize, level: usize, points: usize, repeats: usize, seed: u64) -> Result<BenchReport> {
    if repeats == 0 {
        return Err(Error::input("repeats must be at least 1"));
    }
    if dim == 0 || level == 0 || points == 0 {
        return Err(Error::input("dim, level and points must be positive"));
    }
    let coefficients = signature_dimension(dim as u64, level as u32, false);
    let path = random_path(dim, points, seed)?;
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        let sig = path_signature(&path, level)?;
        times.push(start.elapsed().as_secs_f64());
        if sig.len() as u128 != coefficients {
            return Err(Error::input("signature size disagrees with the dimension formula"));
        }
    }
    Ok(BenchReport {
        dim,
        level,
        points,
        repeats,
        coefficients,
        min_secs: times.iter().copied().fold(f64::INFINITY, f64::min),
        mean_secs: times.iter().sum::<f64>() / repeats as f64,
        max_secs: times.iter().copied().fold(0.0, f64::max),
    })
}
