#![allow(dead_code)]

use rand::Rng;
use skelsig::sigcore::{DiscretePath, TruncatedSignature};

/// Random path with coordinates uniform in `[-1, 1]`.
pub fn random_path<R: Rng>(rng: &mut R, dim: usize, len: usize) -> DiscretePath {
    let coords = (0..dim * len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DiscretePath::new(dim, coords).unwrap()
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Largest coefficient disagreement, measured as in [`close`].
pub fn max_rel_diff(a: &TruncatedSignature, b: &TruncatedSignature) -> f64 {
    assert_eq!(a.len(), b.len());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs() / 1f64.max(x.abs()).max(y.abs()))
        .fold(0.0, f64::max)
}
