//! Path-to-path preprocessing: time augmentation, lead-lag lifting, dyadic
//! windows, uniform frame sampling and gap filling.

use crate::error::{Error, Result};
use crate::sigcore::DiscretePath;

/// Inclusive sample range of one dyadic window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexWindow {
    pub start: usize,
    pub end: usize,
    /// Dyadic depth, 0 for the whole interval.
    pub level: usize,
}

/// Appends a time coordinate `i / (L - 1)` (0 for a single sample).
pub fn add_time(path: &DiscretePath) -> DiscretePath {
    let len = path.len();
    let d = path.dim();
    let mut coords = Vec::with_capacity(len * (d + 1));
    for (i, p) in path.points().enumerate() {
        coords.extend_from_slice(p);
        coords.push(if len > 1 {
            i as f64 / (len - 1) as f64
        } else {
            0.0
        });
    }
    DiscretePath::new(d + 1, coords).expect("time augmentation preserves validity")
}

/// Lifts a scalar series to `lead_dim` coordinates: coordinate `j` at time `t`
/// is `series[t - j]`, or 0 before the series starts.
pub fn lead_lag(series: &[f64], lead_dim: usize) -> Result<DiscretePath> {
    if series.is_empty() {
        return Err(Error::input("lead-lag needs a non-empty series"));
    }
    if lead_dim == 0 {
        return Err(Error::input("lead-lag dimension must be at least 1"));
    }
    let mut coords = Vec::with_capacity(series.len() * lead_dim);
    for t in 0..series.len() {
        for j in 0..lead_dim {
            coords.push(if t >= j { series[t - j] } else { 0.0 });
        }
    }
    DiscretePath::new(lead_dim, coords)
}

/// Integer `round(num / den)` with halves rounded up, for non-negative inputs.
fn round_half_up(num: usize, den: usize) -> usize {
    (2 * num + den) / (2 * den)
}

/// Dyadic hierarchy of windows over `len` samples, levels `0..depth`.
///
/// Level `j` splits at `round(m (L-1) / 2^j)`; neighbouring windows share
/// their boundary sample. Windows are listed level by level.
pub fn dyadic_windows(len: usize, depth: usize) -> Result<Vec<IndexWindow>> {
    if len < 2 {
        return Err(Error::input("dyadic windows need at least 2 samples"));
    }
    if depth == 0 {
        return Err(Error::input("dyadic depth must be at least 1"));
    }
    let span = len - 1;
    if depth > usize::BITS as usize || span < 1usize << (depth - 1) {
        return Err(Error::input(format!(
            "{len} samples are too few for dyadic depth {depth} (need at least {})",
            (1usize << (depth - 1).min(62)) + 1
        )));
    }
    let mut windows = Vec::with_capacity((1 << depth) - 1);
    for level in 0..depth {
        let parts = 1usize << level;
        let split = |m: usize| round_half_up(m * span, parts);
        for m in 0..parts {
            windows.push(IndexWindow {
                start: split(m),
                end: split(m + 1),
                level,
            });
        }
    }
    Ok(windows)
}

/// Indices of `samples` frames spread uniformly over `frame_count` frames.
pub fn uniform_sample(frame_count: usize, samples: usize) -> Result<Vec<usize>> {
    if frame_count == 0 || samples == 0 {
        return Err(Error::input("frame count and sample count must be positive"));
    }
    if samples == 1 || frame_count == 1 {
        return Ok(vec![0; samples]);
    }
    Ok((0..samples)
        .map(|i| round_half_up(i * (frame_count - 1), samples - 1))
        .collect())
}

/// Completes a frame-major series of `dim`-vectors.
///
/// Interior gaps are filled by a natural cubic spline through the valid
/// frames (per coordinate), leading and trailing gaps hold the nearest valid
/// value, and a series without any valid frame becomes all zeros.
pub fn fill_missing(values: &[f64], dim: usize, valid: &[bool]) -> Result<Vec<f64>> {
    if dim == 0 || values.len() != valid.len() * dim {
        return Err(Error::input(format!(
            "series of {} values does not match {} frames of dimension {dim}",
            values.len(),
            valid.len()
        )));
    }
    let knots: Vec<usize> = (0..valid.len()).filter(|&i| valid[i]).collect();
    if knots.is_empty() {
        return Ok(vec![0.0; values.len()]);
    }
    let mut out = values.to_vec();
    if knots.len() == valid.len() {
        return Ok(out);
    }
    let first = knots[0];
    let last = *knots.last().unwrap();
    let xs: Vec<f64> = knots.iter().map(|&k| k as f64).collect();
    for c in 0..dim {
        let ys: Vec<f64> = knots.iter().map(|&k| values[k * dim + c]).collect();
        let spline = NaturalSpline::new(&xs, &ys);
        for f in 0..valid.len() {
            if valid[f] {
                continue;
            }
            out[f * dim + c] = if f < first {
                values[first * dim + c]
            } else if f > last {
                values[last * dim + c]
            } else {
                spline.eval(f as f64)
            };
        }
    }
    Ok(out)
}

/// Natural cubic spline (zero second derivative at both ends).
struct NaturalSpline<'a> {
    xs: &'a [f64],
    ys: &'a [f64],
    second: Vec<f64>,
}

impl<'a> NaturalSpline<'a> {
    fn new(xs: &'a [f64], ys: &'a [f64]) -> Self {
        let n = xs.len();
        let mut second = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second derivatives.
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            let mut upper = vec![0.0; m];
            for i in 0..m {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            for i in 1..m {
                let lower = xs[i + 1] - xs[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                second[i + 1] = (rhs[i] - upper[i] * second[i + 2]) / diag[i];
            }
        }
        Self { xs, ys, second }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 1 {
            return self.ys[0];
        }
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / 6.0
    }
}
