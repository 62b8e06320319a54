use crate::error::{Error, Result};

/// Ordered samples of a `d`-dimensional path, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePath {
    dim: usize,
    coords: Vec<f64>,
}

impl DiscretePath {
    /// Builds a path from a flat row-major buffer of `len * dim` coordinates.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("path dimension must be at least 1"));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::input(format!(
                "path buffer of {} values is not a non-empty multiple of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "non-finite coordinate at sample {}, axis {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::input("path needs at least one point"))?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::input(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    /// A one-dimensional path from a scalar series.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(1, values.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    /// Sub-path over samples `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::input(format!(
                "slice {start}..{end} out of range for path of length {}",
                self.len()
            )));
        }
        Ok(Self {
            dim: self.dim,
            coords: self.coords[start * self.dim..end * self.dim].to_vec(),
        })
    }

    /// The same samples traversed backwards.
    pub fn reversed(&self) -> Self {
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .rev()
            .flatten()
            .copied()
            .collect();
        Self {
            dim: self.dim,
            coords,
        }
    }

    pub fn translated(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.dim {
            return Err(Error::input("translation offset dimension mismatch"));
        }
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, v)| v + offset[i % self.dim])
            .collect();
        Self::new(self.dim, coords)
    }
}
