//! Nested Riemann-sum evaluation of iterated integrals.
//!
//! This is a reference oracle for tests and never calls into the Chen or
//! closed-form code paths. Each multi-index is integrated on its own.

use crate::error::{Error, Result};

use super::{DiscretePath, TruncatedSignature};

/// Approximates the truncated signature by nested Riemann sums over a
/// uniform refinement of the path into `subdivisions` steps.
pub fn signature_bruteforce(
    path: &DiscretePath,
    level: usize,
    subdivisions: usize,
) -> Result<TruncatedSignature> {
    if subdivisions == 0 {
        return Err(Error::input("subdivisions must be at least 1"));
    }
    let d = path.dim();
    let increments = refined_increments(path, subdivisions);
    let mut coeffs = Vec::new();
    let mut index = Vec::with_capacity(level);
    for k in 1..=level {
        for flat in 0..d.pow(k as u32) {
            index.clear();
            let mut rest = flat;
            for _ in 0..k {
                index.push(rest % d);
                rest /= d;
            }
            index.reverse();
            coeffs.push(iterated_sum(&increments, d, &index));
        }
    }
    TruncatedSignature::from_coeffs(d, level, coeffs)
}

/// `J_j <- J_j + (J_{j-1}(t) + J_{j-1}(t + dt)) / 2 * dx^{i_j}`, a trapezoid
/// rule in the innermost variable so the error falls as the square of the step.
fn iterated_sum(increments: &[f64], d: usize, index: &[usize]) -> f64 {
    let mut running = vec![0.0; index.len() + 1];
    running[0] = 1.0;
    for dx in increments.chunks_exact(d) {
        let mut before = running[0];
        for j in 1..=index.len() {
            let old = running[j];
            running[j] += 0.5 * (before + running[j - 1]) * dx[index[j - 1]];
            before = old;
        }
    }
    running[index.len()]
}

fn refined_increments(path: &DiscretePath, subdivisions: usize) -> Vec<f64> {
    let d = path.dim();
    if path.len() < 2 {
        return vec![0.0; subdivisions * d];
    }
    let span = (path.len() - 1) as f64;
    let sample = |t: f64| -> Vec<f64> {
        let seg = (t.floor() as usize).min(path.len() - 2);
        let frac = t - seg as f64;
        let a = path.point(seg);
        let b = path.point(seg + 1);
        a.iter().zip(b).map(|(x, y)| x + (y - x) * frac).collect()
    };
    let mut out = Vec::with_capacity(subdivisions * d);
    let mut prev = path.point(0).to_vec();
    for step in 1..=subdivisions {
        let cur = if step == subdivisions {
            path.point(path.len() - 1).to_vec()
        } else {
            sample(span * step as f64 / subdivisions as f64)
        };
        out.extend(cur.iter().zip(&prev).map(|(c, p)| c - p));
        prev = cur;
    }
    out
}
