//! `SIGFEAT1` feature matrices and plain-text label files.
//!
//! Layout: the 8-byte magic `SIGFEAT1`, little-endian `u64` row and column
//! counts, the row-major little-endian `f64` values, then a text footer with
//! one line per layout span: `<tag> <frame|-> <offset> <width>`.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::{BlockKind, BlockSpan, FeatureLayout};

pub const FEATURE_MAGIC: &[u8; 8] = b"SIGFEAT1";

/// Dense row-major feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
    pub layout: FeatureLayout,
}

impl FeatureMatrix {
    pub fn new(cols: usize, layout: FeatureLayout) -> Self {
        Self {
            rows: 0,
            cols,
            data: Vec::new(),
            layout,
        }
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::input(format!(
                "row of width {} does not fit a matrix of {} columns",
                row.len(),
                self.cols
            )));
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + self.data.len() * 8);
        out.extend_from_slice(FEATURE_MAGIC);
        out.extend_from_slice(&(self.rows as u64).to_le_bytes());
        out.extend_from_slice(&(self.cols as u64).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for s in &self.layout.spans {
            let frame = s.frame.map_or_else(|| "-".to_string(), |f| f.to_string());
            // Infallible on Vec.
            let _ = writeln!(out, "{} {} {} {}", s.kind.tag(), frame, s.offset, s.width);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |offset: usize, message: String| Error::Binary {
            offset: offset as u64,
            message,
        };
        if bytes.len() < 8 || &bytes[..8] != FEATURE_MAGIC {
            return Err(bad(0, "missing SIGFEAT1 magic".into()));
        }
        if bytes.len() < 24 {
            return Err(bad(bytes.len(), "truncated header".into()));
        }
        let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
        let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
        let count = rows
            .checked_mul(cols)
            .and_then(|c| c.checked_mul(8))
            .and_then(|c| usize::try_from(c).ok())
            .ok_or_else(|| bad(8, format!("matrix {rows}x{cols} is too large")))?;
        let end = 24 + count;
        if bytes.len() < end {
            return Err(bad(
                bytes.len(),
                format!("truncated data: expected {count} value bytes after the header"),
            ));
        }
        let data = bytes[24..end]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let footer = std::str::from_utf8(&bytes[end..])
            .map_err(|e| bad(end + e.valid_up_to(), "layout footer is not UTF-8".into()))?;
        let mut layout = FeatureLayout::default();
        for line in footer.lines().filter(|l| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parsed = (|| {
                if parts.len() != 4 {
                    return None;
                }
                let kind = BlockKind::from_tag(parts[0])?;
                let frame = match parts[1] {
                    "-" => None,
                    f => Some(f.parse().ok()?),
                };
                Some(BlockSpan {
                    kind,
                    frame,
                    offset: parts[2].parse().ok()?,
                    width: parts[3].parse().ok()?,
                })
            })();
            let span = parsed.ok_or_else(|| bad(end, format!("bad layout line `{line}`")))?;
            layout.spans.push(span);
        }
        Ok(Self {
            rows: rows as usize,
            cols: cols as usize,
            data,
            layout,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes).map_err(|e| match e {
            Error::Binary { offset, message } => Error::format(path, None, format!("byte {offset}: {message}")),
            other => other,
        })
    }
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let text: String = labels.iter().map(|l| format!("{l}\n")).collect();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| Error::format(path, Some(i as u64 + 1), format!("`{l}` is not a label index")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FeatureMatrix {
        let mut layout = FeatureLayout::default();
        layout.spans.push(BlockSpan {
            kind: BlockKind::Joints,
            frame: Some(0),
            offset: 0,
            width: 2,
        });
        layout.spans.push(BlockSpan {
            kind: BlockKind::TemporalJoints,
            frame: None,
            offset: 2,
            width: 1,
        });
        let mut m = FeatureMatrix::new(3, layout);
        m.push_row(&[1.0, -2.5, 3.0]).unwrap();
        m.push_row(&[0.0, f64::MIN_POSITIVE, 1e300]).unwrap();
        m
    }

    #[test]
    fn header_layout_is_bit_exact() {
        let bytes = sample().to_bytes();
        assert_eq!(&bytes[..8], b"SIGFEAT1");
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(bytes[32..40].try_into().unwrap()), -2.5);
        let footer = std::str::from_utf8(&bytes[24 + 48..]).unwrap();
        assert_eq!(footer, "S-J 0 0 2\nT-J-PSF - 2 1\n");
        assert_eq!(FeatureMatrix::from_bytes(&bytes).unwrap(), sample());
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let mut bytes = sample().to_bytes();
        assert!(FeatureMatrix::from_bytes(&bytes[..30]).is_err());
        bytes[0] = b'X';
        assert!(FeatureMatrix::from_bytes(&bytes).is_err());
    }
}
