use crate::error::{Error, Result};

/// Per-dimension reciprocal-max-abs scaling fitted on training features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler {
    scales: Vec<f64>,
}

impl FeatureScaler {
    /// Max-abs per column over `rows`; all-zero columns get scale 1.
    pub fn fit<'a, I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut iter = rows.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::input("cannot fit a scaler on zero rows"))?;
        let mut scales: Vec<f64> = first.iter().map(|v| v.abs()).collect();
        for row in iter {
            if row.len() != scales.len() {
                return Err(Error::input("feature rows have inconsistent widths"));
            }
            for (s, v) in scales.iter_mut().zip(row) {
                *s = s.max(v.abs());
            }
        }
        for s in &mut scales {
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Ok(Self { scales })
    }

    pub fn from_scales(scales: Vec<f64>) -> Result<Self> {
        if scales.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::input("scaler entries must be positive and finite"));
        }
        Ok(Self { scales })
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn apply(&self, row: &mut [f64]) -> Result<()> {
        if row.len() != self.scales.len() {
            return Err(Error::input(format!(
                "row width {} differs from scaler width {}",
                row.len(),
                self.scales.len()
            )));
        }
        for (v, s) in row.iter_mut().zip(&self.scales) {
            *v /= s;
        }
        Ok(())
    }
}

/// Fits a scaler on `rows`.
pub fn fit_scaler(rows: &[Vec<f64>]) -> Result<FeatureScaler> {
    FeatureScaler::fit(rows.iter().map(Vec::as_slice))
}

/// Scaled copy of `row`.
pub fn apply_scaler(scaler: &FeatureScaler, row: &[f64]) -> Result<Vec<f64>> {
    let mut out = row.to_vec();
    scaler.apply(&mut out)?;
    Ok(out)
}
