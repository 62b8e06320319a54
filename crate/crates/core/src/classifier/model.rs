use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::TrainConfig;

pub const MODEL_MAGIC: &[u8; 7] = b"SIGNET1";
pub const MODEL_VERSION: u8 = 1;

/// `input -> hidden` (identity activation) `-> classes` (softmax).
///
/// `w1` is `input x hidden` and `w2` is `hidden x classes`, both row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearNetModel {
    input: usize,
    hidden: usize,
    classes: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub config: TrainConfig,
}

/// Sorted flat indices of the `w1` entries kept in one training step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DropMask {
    pub kept: Vec<usize>,
}

impl DropMask {
    pub fn all(len: usize) -> Self {
        Self {
            kept: (0..len).collect(),
        }
    }

    /// Keeps each of `len` entries independently with probability `1 - p`,
    /// sampling the gaps between kept entries geometrically.
    pub fn sample<R: Rng>(len: usize, p: f64, rng: &mut R) -> Self {
        if p <= 0.0 {
            return Self::all(len);
        }
        let gaps = GapSampler::new(p);
        let mut kept = Vec::with_capacity(((1.0 - p) * len as f64 * 1.1) as usize + 16);
        let mut next = 0usize;
        loop {
            next = next.saturating_add(gaps.sample(rng));
            if next >= len {
                break;
            }
            kept.push(next);
            next += 1;
        }
        Self { kept }
    }
}

/// Geometric gaps `P(g) = (1 - p) p^g` by Walker's alias method over
/// `0..GAP_BINS`; the last bin carries the whole tail `g >= GAP_BINS - 1`
/// and is resolved by memorylessness (add and draw again).
struct GapSampler {
    prob: [f64; GAP_BINS],
    alias: [u16; GAP_BINS],
}

const GAP_BITS: u32 = 10;
const GAP_BINS: usize = 1 << GAP_BITS;

impl GapSampler {
    fn new(p: f64) -> Self {
        let mut mass = [0.0; GAP_BINS];
        let mut pw = 1.0;
        for m in mass.iter_mut().take(GAP_BINS - 1) {
            *m = (1.0 - p) * pw;
            pw *= p;
        }
        mass[GAP_BINS - 1] = pw;
        let mut prob = [0.0; GAP_BINS];
        let mut alias = [0u16; GAP_BINS];
        let scaled: Vec<f64> = mass.iter().map(|m| m * GAP_BINS as f64).collect();
        let mut work = scaled.clone();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..GAP_BINS).partition(|&i| scaled[i] < 1.0);
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s] = work[s];
            alias[s] = l as u16;
            work[l] -= 1.0 - work[s];
            if work[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        for i in small.into_iter().chain(large) {
            prob[i] = 1.0;
            alias[i] = i as u16;
        }
        Self { prob, alias }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let mut total = 0usize;
        loop {
            let r = rng.next_u64();
            let bin = (r >> (64 - GAP_BITS)) as usize;
            let u = (r & ((1 << 53) - 1)) as f64 * (1.0 / (1u64 << 53) as f64);
            let g = if u < self.prob[bin] { bin } else { self.alias[bin] as usize };
            total += g;
            if g < GAP_BINS - 1 {
                return total;
            }
        }
    }
}

pub fn softmax(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in logits.iter_mut() {
        *v /= sum;
    }
}

impl LinearNetModel {
    pub fn zeros(input: usize, hidden: usize, classes: usize, config: TrainConfig) -> Result<Self> {
        if input == 0 || hidden == 0 || classes == 0 {
            return Err(Error::input("model dimensions must be positive"));
        }
        Ok(Self {
            input,
            hidden,
            classes,
            w1: vec![0.0; input * hidden],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden * classes],
            b2: vec![0.0; classes],
            config,
        })
    }

    /// Glorot-uniform weights and zero biases, seeded from `config.seed`.
    pub fn new(input: usize, classes: usize, config: TrainConfig) -> Result<Self> {
        let mut model = Self::zeros(input, config.hidden, classes, config)?;
        let mut rng = ChaCha8Rng::seed_from_u64(model.config.seed ^ 0x5EED_0F_1A7E5);
        let limit1 = (6.0 / (input + model.hidden) as f64).sqrt();
        model.w1.iter_mut().for_each(|w| *w = rng.gen_range(-limit1..limit1));
        let limit2 = (6.0 / (model.hidden + classes) as f64).sqrt();
        model.w2.iter_mut().for_each(|w| *w = rng.gen_range(-limit2..limit2));
        Ok(model)
    }

    pub fn input_dim(&self) -> usize {
        self.input
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input {
            return Err(Error::input(format!(
                "input has dimension {}, model expects {}",
                x.len(),
                self.input
            )));
        }
        Ok(())
    }

    fn output(&self, hidden: &[f64]) -> Vec<f64> {
        let mut logits = self.b2.clone();
        for (j, &h) in hidden.iter().enumerate() {
            let row = &self.w2[j * self.classes..(j + 1) * self.classes];
            for (l, &w) in logits.iter_mut().zip(row) {
                *l += h * w;
            }
        }
        softmax(&mut logits);
        logits
    }

    /// Inference: input weights scaled by the keep probability `1 - p`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let keep = 1.0 - self.config.dropconnect_p;
        let mut h = vec![0.0; self.hidden];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &self.w1[i * self.hidden..(i + 1) * self.hidden];
            for (hj, &w) in h.iter_mut().zip(row) {
                *hj += w * xi;
            }
        }
        for (hj, b) in h.iter_mut().zip(&self.b1) {
            *hj = keep * *hj + b;
        }
        Ok(self.output(&h))
    }

    /// Training-mode forward with only the masked-in input weights.
    pub fn forward_masked(&self, x: &[f64], mask: &DropMask) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut h = self.b1.clone();
        for &k in &mask.kept {
            h[k % self.hidden] += self.w1[k] * x[k / self.hidden];
        }
        Ok(self.output(&h))
    }

    pub fn predict(&self, x: &[f64]) -> Result<(usize, f64)> {
        let p = self.forward(x)?;
        let (best, prob) = p
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        Ok((best, prob))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 24 + 8 * (self.w1.len() + self.w2.len() + 256));
        out.extend_from_slice(MODEL_MAGIC);
        out.push(MODEL_VERSION);
        for n in [self.input, self.hidden, self.classes] {
            out.extend_from_slice(&(n as u64).to_le_bytes());
        }
        for block in [&self.w1, &self.b1, &self.w2, &self.b2] {
            for v in block.iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let text = toml::to_string(&self.config).expect("train config serializes");
        out.extend_from_slice(&(text.len() as u64).to_le_bytes());
        out.extend_from_slice(text.as_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(7, "magic")? != MODEL_MAGIC {
            return Err(Error::Binary {
                offset: 0,
                message: "missing SIGNET1 magic".into(),
            });
        }
        let version = r.take(1, "version byte")?[0];
        if version != MODEL_VERSION {
            return Err(Error::Binary {
                offset: 7,
                message: format!("unsupported model version {version}"),
            });
        }
        let input = r.u64("input dimension")? as usize;
        let hidden = r.u64("hidden size")? as usize;
        let classes = r.u64("class count")? as usize;
        let w1 = r.floats(input.saturating_mul(hidden), "W1")?;
        let b1 = r.floats(hidden, "b1")?;
        let w2 = r.floats(hidden.saturating_mul(classes), "W2")?;
        let b2 = r.floats(classes, "b2")?;
        let len = r.u64("config length")? as usize;
        let at = r.pos;
        let text = std::str::from_utf8(r.take(len, "config text")?).map_err(|_| Error::Binary {
            offset: at as u64,
            message: "config block is not UTF-8".into(),
        })?;
        let config: TrainConfig = toml::from_str(text).map_err(|e| Error::Binary {
            offset: at as u64,
            message: format!("bad config block: {e}"),
        })?;
        if r.pos != bytes.len() {
            return Err(Error::Binary {
                offset: r.pos as u64,
                message: format!("{} trailing bytes", bytes.len() - r.pos),
            });
        }
        Ok(Self {
            input,
            hidden,
            classes,
            w1,
            b1,
            w2,
            b2,
            config,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes).map_err(|e| match e {
            Error::Binary { offset, message } => {
                Error::format(path, None, format!("byte {offset}: {message}"))
            }
            other => other,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(Error::Binary {
                offset: self.pos as u64,
                message: format!(
                    "truncated while reading {what}: need {n} bytes, {} left",
                    self.bytes.len() - self.pos
                ),
            });
        };
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn floats(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        let bytes = self.take(n.saturating_mul(8), what)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}
