use crate::error::{Error, Result};

use super::DiscretePath;

/// Level-indexed iterated integrals of a path, truncated at `level`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSignature {
    dim: usize,
    level: usize,
    coeffs: Vec<f64>,
}

/// Number of stored coefficients for levels `1..=level`.
pub(crate) fn stored_len(dim: usize, level: usize) -> usize {
    (1..=level).map(|k| dim.pow(k as u32)).sum()
}

impl TruncatedSignature {
    /// The group identity: zeroth term 1, every stored coefficient 0.
    pub fn identity(dim: usize, level: usize) -> Result<Self> {
        check_shape(dim, level)?;
        Ok(Self {
            dim,
            level,
            coeffs: vec![0.0; stored_len(dim, level)],
        })
    }

    /// Wraps an existing coefficient buffer laid out level by level.
    pub fn from_coeffs(dim: usize, level: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_shape(dim, level)?;
        let expected = stored_len(dim, level);
        if coeffs.len() != expected {
            return Err(Error::input(format!(
                "expected {expected} coefficients for d={dim}, n={level}, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { dim, level, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// All stored coefficients, levels ascending.
    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn block_offset(&self, k: usize) -> usize {
        stored_len(self.dim, k - 1)
    }

    /// Coefficients of order `k` (1-based), `d^k` values.
    pub fn block(&self, k: usize) -> &[f64] {
        assert!(k >= 1 && k <= self.level, "level {k} outside 1..={}", self.level);
        let start = self.block_offset(k);
        &self.coeffs[start..start + self.dim.pow(k as u32)]
    }

    fn block_mut(&mut self, k: usize) -> &mut [f64] {
        let start = self.block_offset(k);
        let len = self.dim.pow(k as u32);
        &mut self.coeffs[start..start + len]
    }

    /// Coefficient for a 0-based multi-index; the empty index yields 1.
    pub fn get(&self, index: &[usize]) -> f64 {
        if index.is_empty() {
            return 1.0;
        }
        let flat = index.iter().fold(0usize, |acc, &i| {
            assert!(i < self.dim, "axis {i} out of range for d={}", self.dim);
            acc * self.dim + i
        });
        self.block(index.len())[flat]
    }

    /// Multiplies in, on the right, the signature of a straight segment with
    /// increment `delta`. Equivalent to `chen_concat(self, segment_signature(..))`.
    pub(crate) fn extend_by_increment(&mut self, delta: &[f64], scratch: &mut Scratch) {
        extend_in_place(&mut self.coeffs, self.dim, self.level, delta, scratch);
    }
}

/// In-place right multiplication by `exp(delta)` on a level-major buffer,
/// top level first so lower levels are still the old values. Level `k` uses
/// the Horner form `B_j = S_j + B_{j-1} (x) delta / (k - j + 1)`, `B_0 = 1`.
fn extend_in_place(coeffs: &mut [f64], d: usize, level: usize, delta: &[f64], scratch: &mut Scratch) {
    debug_assert_eq!(delta.len(), d);
    for k in (1..=level).rev() {
        let (acc, next) = scratch.buffers(d.pow(k as u32 - 1));
        acc.truncate(1);
        acc[0] = 1.0;
        for j in 1..k {
            let scale = 1.0 / (k - j + 1) as f64;
            next.clear();
            let offset = stored_len(d, j - 1);
            let lower = &coeffs[offset..offset + d.pow(j as u32)];
            let mut pos = 0;
            for &a in acc.iter() {
                let a = a * scale;
                for &x in delta {
                    next.push(lower[pos] + a * x);
                    pos += 1;
                }
            }
            std::mem::swap(acc, next);
        }
        let offset = stored_len(d, k - 1);
        let top = &mut coeffs[offset..offset + d.pow(k as u32)];
        let mut pos = 0;
        for &a in acc.iter() {
            for &x in delta {
                top[pos] += a * x;
                pos += 1;
            }
        }
    }
}

/// Signature of the piecewise-linear path in the row-major buffer `coords`,
/// written into `out` (which must hold exactly the stored coefficient count).
pub(crate) fn signature_into(
    coords: &[f64],
    dim: usize,
    level: usize,
    out: &mut [f64],
    scratch: &mut Scratch,
) {
    debug_assert_eq!(out.len(), stored_len(dim, level));
    out.fill(0.0);
    let mut delta = std::mem::take(&mut scratch.delta);
    delta.resize(dim, 0.0);
    for i in 1..coords.len() / dim {
        let prev = &coords[(i - 1) * dim..i * dim];
        let cur = &coords[i * dim..(i + 1) * dim];
        for ((x, &e), &s) in delta.iter_mut().zip(cur).zip(prev) {
            *x = e - s;
        }
        extend_in_place(out, dim, level, &delta, scratch);
    }
    scratch.delta = delta;
}

/// Reusable buffers for in-place signature updates.
#[derive(Default)]
pub(crate) struct Scratch {
    acc: Vec<f64>,
    next: Vec<f64>,
    delta: Vec<f64>,
}

impl Scratch {
    fn buffers(&mut self, capacity: usize) -> (&mut Vec<f64>, &mut Vec<f64>) {
        self.acc.reserve(capacity.saturating_sub(self.acc.len()));
        self.next.reserve(capacity.saturating_sub(self.next.len()));
        if self.acc.is_empty() {
            self.acc.push(0.0);
        }
        (&mut self.acc, &mut self.next)
    }
}

fn check_shape(dim: usize, level: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::input("signature dimension must be at least 1"));
    }
    if level == 0 {
        return Err(Error::input("truncation level must be at least 1"));
    }
    Ok(())
}

/// Signature of the straight segment from `start` to `end`: the order-`k`
/// coefficient at `(i_1..i_k)` is the product of the increments over `k!`.
pub fn segment_signature(start: &[f64], end: &[f64], level: usize) -> Result<TruncatedSignature> {
    if start.len() != end.len() {
        return Err(Error::input(format!(
            "segment endpoints have dimensions {} and {}",
            start.len(),
            end.len()
        )));
    }
    let d = start.len();
    let mut sig = TruncatedSignature::identity(d, level)?;
    let delta: Vec<f64> = end.iter().zip(start).map(|(e, s)| e - s).collect();
    // Level k is the outer product of level k-1 with delta, divided by k.
    sig.block_mut(1).copy_from_slice(&delta);
    for k in 2..=level {
        let offset_prev = stored_len(d, k - 2);
        let (lower, upper) = sig.coeffs.split_at_mut(stored_len(d, k - 1));
        let prev = &lower[offset_prev..];
        let inv_k = 1.0 / k as f64;
        let mut pos = 0;
        for &p in prev {
            let p = p * inv_k;
            for &x in &delta {
                upper[pos] = p * x;
                pos += 1;
            }
        }
    }
    Ok(sig)
}

/// Chen's identity: the signature of `a` followed by `b`.
///
/// Both inputs must share dimension and truncation level.
pub fn chen_concat(a: &TruncatedSignature, b: &TruncatedSignature) -> Result<TruncatedSignature> {
    if a.dim != b.dim || a.level != b.level {
        return Err(Error::input(format!(
            "cannot concatenate signatures with (d, n) = ({}, {}) and ({}, {})",
            a.dim, a.level, b.dim, b.level
        )));
    }
    let mut out = TruncatedSignature::identity(a.dim, a.level)?;
    for k in 1..=a.level {
        let target = out.block_mut(k);
        target.copy_from_slice(a.block(k));
        for (t, &v) in target.iter_mut().zip(b.block(k)) {
            *t += v;
        }
        // a_m (x) b_{k-m}: the flat index of (I, J) is idx(I) * d^{k-m} + idx(J).
        for m in 1..k {
            let left = a.block(m);
            let right = b.block(k - m);
            let width = right.len();
            for (i, &l) in left.iter().enumerate() {
                if l == 0.0 {
                    continue;
                }
                let row = &mut target[i * width..(i + 1) * width];
                for (t, &r) in row.iter_mut().zip(right) {
                    *t += l * r;
                }
            }
        }
    }
    Ok(out)
}

/// Signature of a piecewise-linear path: Chen-fold of its segment signatures.
/// A single-point path yields the identity.
pub fn path_signature(path: &DiscretePath, level: usize) -> Result<TruncatedSignature> {
    let mut sig = TruncatedSignature::identity(path.dim(), level)?;
    let mut scratch = Scratch::default();
    let mut delta = vec![0.0; path.dim()];
    let mut points = path.points();
    let Some(mut prev) = points.next() else {
        return Ok(sig);
    };
    for p in points {
        for ((d, &e), &s) in delta.iter_mut().zip(p).zip(prev) {
            *d = e - s;
        }
        sig.extend_by_increment(&delta, &mut scratch);
        prev = p;
    }
    Ok(sig)
}

/// Signed area term `S^{12} - S^{21}` of a two-dimensional signature.
pub fn levy_area(sig: &TruncatedSignature) -> Result<f64> {
    if sig.dim != 2 || sig.level < 2 {
        return Err(Error::input(format!(
            "levy area needs d = 2 and n >= 2, got d = {}, n = {}",
            sig.dim, sig.level
        )));
    }
    let second = sig.block(2);
    Ok(second[1] - second[2])
}

/// Coefficient count of a signature truncated at `level`, in 128-bit arithmetic.
pub fn signature_dimension(dim: u64, level: u32, include_zeroth: bool) -> u128 {
    let d = dim as u128;
    let without = if d == 1 {
        level as u128
    } else {
        (d.pow(level + 1) - d) / (d - 1)
    };
    without + u128::from(include_zeroth)
}
