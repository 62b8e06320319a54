use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::skeleton::FeatureMatrix;

use super::model::softmax;
use super::{DropMask, LinearNetModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden: usize,
    pub batch_size: usize,
    pub momentum: f64,
    pub learning_rate: f64,
    /// Exponential learning-rate decay per epoch.
    pub decay: f64,
    pub max_epochs: usize,
    pub dropconnect_p: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: 64,
            batch_size: 30,
            momentum: 0.7,
            learning_rate: 0.01,
            decay: 0.005,
            max_epochs: 200,
            dropconnect_p: 0.95,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.batch_size == 0 {
            return Err(Error::input("hidden size and batch size must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropconnect_p) {
            return Err(Error::input("dropconnect probability must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::input("momentum must lie in [0, 1)"));
        }
        if !(self.learning_rate >= 0.0 && self.decay >= 0.0) {
            return Err(Error::input("learning rate and decay must be non-negative"));
        }
        Ok(())
    }
}

/// `alpha0 * exp(-decay * epoch)`, `epoch` counting completed epochs.
pub fn lr_schedule(epoch: usize, config: &TrainConfig) -> f64 {
    config.learning_rate * (-config.decay * epoch as f64).exp()
}

/// Mean mini-batch loss and accuracy seen during one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub learning_rate: f64,
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: LinearNetModel,
    pub history: Vec<EpochStats>,
}

/// Gradients of the mean cross-entropy; `w1` is aligned with the mask's
/// `kept` list.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub loss: f64,
    pub correct: usize,
}

/// Reusable batch buffers.
#[derive(Default)]
struct Workspace {
    /// One tile of inputs transposed to `input x batch`.
    tile: Vec<f64>,
    /// Hidden activations and their gradients, `hidden x batch`.
    h: Vec<f64>,
    dh: Vec<f64>,
}

/// Input weight with its velocity and the step it was last brought up to.
#[derive(Debug, Clone, Copy)]
struct Slot {
    w: f64,
    v: f64,
    synced: u64,
}

/// Heavy-ball updates on the kept entries. Entries left out of a step get
/// zero gradient, so their pending updates reduce to `v *= mu` and
/// `w += v`; those are replayed in closed form when the entry is next
/// touched.
struct LazyMomentum {
    slots: Vec<Slot>,
    /// `decay[s] = mu^s`, `drift[s] = mu + ... + mu^s`.
    decay: Vec<f64>,
    drift: Vec<f64>,
    step: u64,
    mu: f64,
    lr: f64,
}

impl LazyMomentum {
    fn new(w1: &[f64], mu: f64, steps: usize) -> Self {
        let mut decay = Vec::with_capacity(steps + 1);
        let mut drift = Vec::with_capacity(steps + 1);
        let (mut pw, mut sum) = (1.0f64, 0.0f64);
        for _ in 0..=steps {
            decay.push(pw);
            drift.push(sum);
            pw *= mu;
            sum += pw;
        }
        Self {
            slots: w1.iter().map(|&w| Slot { w, v: 0.0, synced: 0 }).collect(),
            decay,
            drift,
            step: 0,
            mu,
            lr: 0.0,
        }
    }

    fn sync(&self, slot: &mut Slot, to: u64) {
        let lag = (to - slot.synced) as usize;
        if lag > 0 {
            slot.w += slot.v * self.drift[lag];
            slot.v *= self.decay[lag];
            slot.synced = to;
        }
    }

    fn finish(mut self, w1: &mut [f64]) {
        let step = self.step;
        let mut slots = std::mem::take(&mut self.slots);
        for (w, slot) in w1.iter_mut().zip(slots.iter_mut()) {
            self.sync(slot, step);
            *w = slot.w;
        }
    }
}

impl LazyMomentum {
    /// Brings the kept entries up to date and returns their values.
    fn gather(&mut self, kept: &[usize], out: &mut Vec<f64>) {
        out.clear();
        let (step, drift, decay) = (self.step, &self.drift, &self.decay);
        for &k in kept {
            let slot = &mut self.slots[k];
            let lag = (step - slot.synced) as usize;
            if lag > 0 {
                slot.w += slot.v * drift[lag];
                slot.v *= decay[lag];
            }
            out.push(slot.w);
        }
    }

    fn apply(&mut self, kept: &[usize], grads: &[f64]) {
        let (mu, lr, next) = (self.mu, self.lr, self.step + 1);
        for (&k, &g) in kept.iter().zip(grads) {
            let slot = &mut self.slots[k];
            slot.v = mu * slot.v - lr * g;
            slot.w += slot.v;
            slot.synced = next;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Gradients of a batch; `w1` is aligned with the kept list.
struct BatchResult {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
    loss: f64,
    correct: usize,
}

/// Copies columns `start..start + tile.len() / b` of the batch rows into
/// `tile`, laid out `input x batch`.
fn transpose_tile(rows: &[&[f64]], start: usize, tile: &mut [f64]) {
    let b = rows.len();
    for (s, row) in rows.iter().enumerate() {
        for (off, &v) in row[start..start + tile.len() / b].iter().enumerate() {
            tile[off * b + s] = v;
        }
    }
}

/// Columns per transposed tile; small enough that a tile of a 30-row batch
/// stays in L2.
const TILE: usize = 256;

/// Walks `kept` tile by tile, handing each entry's kept position, input row
/// of the tile and hidden unit to `visit`.
fn for_each_kept(
    rows: &[&[f64]],
    kept: &[usize],
    hidden: usize,
    tile: &mut Vec<f64>,
    mut visit: impl FnMut(usize, &[f64], usize),
) {
    let (d, b) = (rows[0].len(), rows.len());
    let mut n = 0;
    for start in (0..d).step_by(TILE) {
        let end = (start + TILE).min(d);
        let limit = end * hidden;
        if kept.get(n).map_or(true, |&k| k >= limit) {
            continue;
        }
        tile.resize((end - start) * b, 0.0);
        transpose_tile(rows, start, tile);
        // Row offset of the current input within the tile, tracked
        // incrementally since `kept` is sorted.
        let (mut i, mut base) = (0, start * hidden);
        while n < kept.len() && kept[n] < limit {
            let k = kept[n];
            while k >= base + hidden {
                i += 1;
                base += hidden;
            }
            visit(n, &tile[i * b..(i + 1) * b], k - base);
            n += 1;
        }
    }
}

/// `weights` holds the current values of the kept input weights.
fn batch_gradients(
    model: &LinearNetModel,
    rows: &[&[f64]],
    labels: &[usize],
    kept: &[usize],
    weights: &[f64],
    ws: &mut Workspace,
) -> BatchResult {
    let (hn, c) = (model.hidden_dim(), model.class_count());
    let b = rows.len();
    ws.h.clear();
    for j in 0..hn {
        ws.h.extend(std::iter::repeat(model.b1[j]).take(b));
    }
    let h = &mut ws.h;
    for_each_kept(rows, kept, hn, &mut ws.tile, |n, x, j| {
        let w = weights[n];
        for (hs, &xs) in h[j * b..(j + 1) * b].iter_mut().zip(x) {
            *hs += w * xs;
        }
    });

    let mut out = BatchResult {
        w1: vec![0.0; kept.len()],
        b1: vec![0.0; hn],
        w2: vec![0.0; hn * c],
        b2: vec![0.0; c],
        loss: 0.0,
        correct: 0,
    };
    // Output layer per sample; dlogits = (p - onehot) / b.
    let mut dlogits = vec![0.0; b * c];
    let mut logits = vec![0.0; c];
    for s in 0..b {
        logits.copy_from_slice(&model.b2);
        for j in 0..hn {
            let h = ws.h[j * b + s];
            for (l, &w) in logits.iter_mut().zip(&model.w2[j * c..(j + 1) * c]) {
                *l += h * w;
            }
        }
        softmax(&mut logits);
        let label = labels[s];
        let best = logits
            .iter()
            .enumerate()
            .fold(0, |best, (k, &v)| if v > logits[best] { k } else { best });
        out.correct += usize::from(best == label);
        out.loss -= logits[label].max(f64::MIN_POSITIVE).ln();
        for k in 0..c {
            let target = if k == label { 1.0 } else { 0.0 };
            dlogits[s * c + k] = (logits[k] - target) / b as f64;
        }
    }
    out.loss /= b as f64;

    ws.dh.clear();
    ws.dh.resize(hn * b, 0.0);
    for s in 0..b {
        let dl = &dlogits[s * c..(s + 1) * c];
        for (k, &g) in dl.iter().enumerate() {
            out.b2[k] += g;
        }
        for j in 0..hn {
            let h = ws.h[j * b + s];
            let w2 = &model.w2[j * c..(j + 1) * c];
            let gw2 = &mut out.w2[j * c..(j + 1) * c];
            let mut acc = 0.0;
            for k in 0..c {
                gw2[k] += h * dl[k];
                acc += w2[k] * dl[k];
            }
            ws.dh[j * b + s] = acc;
        }
    }
    for j in 0..hn {
        out.b1[j] = ws.dh[j * b..(j + 1) * b].iter().sum();
    }
    let (dh, gw1) = (&ws.dh, &mut out.w1);
    for_each_kept(rows, kept, hn, &mut ws.tile, |n, x, j| {
        gw1[n] = dot(x, &dh[j * b..(j + 1) * b]);
    });
    out
}

/// Loss and gradients of a batch in training mode under `mask`.
pub fn loss_and_gradients(
    model: &LinearNetModel,
    rows: &[&[f64]],
    labels: &[usize],
    mask: &DropMask,
) -> Result<Gradients> {
    if rows.is_empty() || rows.len() != labels.len() {
        return Err(Error::input("batch needs matching non-empty rows and labels"));
    }
    if rows.iter().any(|r| r.len() != model.input_dim()) {
        return Err(Error::input("batch row dimension differs from model input"));
    }
    if labels.iter().any(|&l| l >= model.class_count()) {
        return Err(Error::input("label out of range"));
    }
    if mask.kept.windows(2).any(|w| w[0] >= w[1]) || mask.kept.last().is_some_and(|&k| k >= model.w1.len()) {
        return Err(Error::input("mask indices must be sorted, unique and in range"));
    }
    let weights: Vec<f64> = mask.kept.iter().map(|&k| model.w1[k]).collect();
    let r = batch_gradients(model, rows, labels, &mask.kept, &weights, &mut Workspace::default());
    Ok(Gradients {
        w1: r.w1,
        b1: r.b1,
        w2: r.w2,
        b2: r.b2,
        loss: r.loss,
        correct: r.correct,
    })
}

/// Momentum SGD on the mean softmax cross-entropy with a fresh dropconnect
/// mask per mini-batch.
///
/// Input weights outside the mask receive zero gradient, so their momentum
/// updates are deferred and applied in closed form the next time the entry
/// is kept (and once more when training ends).
pub fn train(
    model: LinearNetModel,
    features: &FeatureMatrix,
    labels: &[usize],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    let mut model = model;
    if features.rows == 0 {
        return Err(Error::input("empty training set"));
    }
    if features.rows != labels.len() {
        return Err(Error::input(format!(
            "{} feature rows but {} labels",
            features.rows,
            labels.len()
        )));
    }
    if features.cols != model.input_dim() {
        return Err(Error::input("feature width differs from model input"));
    }
    if labels.iter().any(|&l| l >= model.class_count()) {
        return Err(Error::input("label out of range for the model"));
    }
    model.config = config.clone();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = features.rows;
    let total_steps = n.div_ceil(config.batch_size) * config.max_epochs;
    let mu = config.momentum;
    let mut lazy = LazyMomentum::new(&model.w1, mu, total_steps);
    let mut vb1 = vec![0.0; model.b1.len()];
    let mut v2 = vec![0.0; model.w2.len()];
    let mut vb2 = vec![0.0; model.b2.len()];
    let mut order: Vec<usize> = (0..n).collect();
    let mut ws = Workspace::default();
    let mut weights = Vec::new();
    let mut history = Vec::with_capacity(config.max_epochs);

    for epoch in 0..config.max_epochs {
        let lr = lr_schedule(epoch, config);
        lazy.lr = lr;
        order.shuffle(&mut rng);
        let (mut loss_sum, mut correct) = (0.0, 0usize);
        for chunk in order.chunks(config.batch_size) {
            let rows: Vec<&[f64]> = chunk.iter().map(|&r| features.row(r)).collect();
            let batch_labels: Vec<usize> = chunk.iter().map(|&r| labels[r]).collect();
            let mask = DropMask::sample(model.w1.len(), config.dropconnect_p, &mut rng);
            lazy.gather(&mask.kept, &mut weights);
            let g = batch_gradients(&model, &rows, &batch_labels, &mask.kept, &weights, &mut ws);
            lazy.apply(&mask.kept, &g.w1);
            loss_sum += g.loss * chunk.len() as f64;
            correct += g.correct;
            for (params, vel, grad) in [
                (&mut model.b1, &mut vb1, &g.b1),
                (&mut model.w2, &mut v2, &g.w2),
                (&mut model.b2, &mut vb2, &g.b2),
            ] {
                for ((p, v), gr) in params.iter_mut().zip(vel.iter_mut()).zip(grad) {
                    *v = mu * *v - lr * gr;
                    *p += *v;
                }
            }
            lazy.step += 1;
        }
        history.push(EpochStats {
            epoch,
            learning_rate: lr,
            loss: loss_sum / n as f64,
            accuracy: correct as f64 / n as f64,
        });
    }
    lazy.finish(&mut model.w1);
    Ok(TrainOutcome { model, history })
}

/// Largest relative disagreement between analytic gradients (all input
/// weights kept) and central differences with step `1e-5`, over every
/// parameter. Magnitudes below `1e-6` are measured against `1e-6`.
pub fn gradient_check(model: &LinearNetModel, x: &[f64], label: usize) -> Result<f64> {
    let mask = DropMask::all(model.w1.len());
    let analytic = loss_and_gradients(model, &[x], &[label], &mask)?;
    let loss = |m: &LinearNetModel| -> f64 {
        let p = m.forward_masked(x, &mask).expect("dimension checked");
        -p[label].ln()
    };
    let step = 1e-5;
    let mut worst: f64 = 0.0;
    let mut probe = model.clone();
    let mut check = |select: fn(&mut LinearNetModel) -> &mut Vec<f64>, grads: &[f64]| {
        for (idx, &g) in grads.iter().enumerate() {
            let orig = select(&mut probe)[idx];
            select(&mut probe)[idx] = orig + step;
            let up = loss(&probe);
            select(&mut probe)[idx] = orig - step;
            let down = loss(&probe);
            select(&mut probe)[idx] = orig;
            let numeric = (up - down) / (2.0 * step);
            let rel = (g - numeric).abs() / g.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        }
    };
    check(|m| &mut m.w1, &analytic.w1);
    check(|m| &mut m.b1, &analytic.b1);
    check(|m| &mut m.w2, &analytic.w2);
    check(|m| &mut m.b2, &analytic.b2);
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use rand::Rng;

    use super::*;

    #[test]
    fn schedule_values() {
        let c = TrainConfig::default();
        assert_eq!(lr_schedule(0, &c), 0.01);
        assert_relative_eq!(lr_schedule(200, &c), 0.01 * (-1.0f64).exp(), epsilon = 1e-18);
        assert_relative_eq!(lr_schedule(200, &c), 0.0036788, epsilon = 1e-7);
        let flat = TrainConfig { decay: 0.0, ..c };
        assert_eq!(lr_schedule(123, &flat), 0.01);
    }

    #[test]
    fn paper_defaults() {
        let c = TrainConfig::default();
        assert_eq!((c.hidden, c.batch_size, c.max_epochs), (64, 30, 200));
        assert_eq!((c.momentum, c.learning_rate, c.decay, c.dropconnect_p), (0.7, 0.01, 0.005, 0.95));
    }

    fn small_model(seed: u64) -> LinearNetModel {
        let cfg = TrainConfig {
            hidden: 4,
            dropconnect_p: 0.0,
            seed,
            ..TrainConfig::default()
        };
        let mut m = LinearNetModel::new(6, 3, cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        m.b1.iter_mut().for_each(|b| *b = rng.gen_range(-0.5..0.5));
        m.b2.iter_mut().for_each(|b| *b = rng.gen_range(-0.5..0.5));
        m
    }

    #[test]
    fn gradient_check_small_model() {
        let m = small_model(1);
        let x = [0.5, -1.2, 0.3, 2.0, -0.7, 0.1];
        let err = gradient_check(&m, &x, 2).unwrap();
        assert!(err < 1e-4, "max relative error {err}");
    }

    #[test]
    fn zero_input_gives_zero_w1_gradient() {
        let m = small_model(2);
        let g = loss_and_gradients(&m, &[&[0.0; 6]], &[1], &DropMask::all(24)).unwrap();
        assert!(g.w1.iter().all(|&v| v == 0.0));
        assert!(g.b1.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn symmetric_model_has_symmetric_gradients() {
        // Two identical hidden units feeding identical output weights.
        let cfg = TrainConfig {
            hidden: 2,
            dropconnect_p: 0.0,
            ..TrainConfig::default()
        };
        let mut m = LinearNetModel::zeros(3, 2, 2, cfg).unwrap();
        m.w1 = vec![0.2, 0.2, -0.4, -0.4, 0.1, 0.1];
        m.w2 = vec![0.3, -0.3, 0.3, -0.3];
        let g = loss_and_gradients(&m, &[&[1.0, 0.5, -2.0]], &[0], &DropMask::all(6)).unwrap();
        for i in 0..3 {
            assert_eq!(g.w1[2 * i], g.w1[2 * i + 1]);
        }
        assert_eq!(g.b1[0], g.b1[1]);
    }

    #[test]
    fn rejects_empty_training_set() {
        let m = small_model(3);
        let empty = FeatureMatrix::new(6, Default::default());
        assert!(train(m, &empty, &[], &TrainConfig::default()).is_err());
    }
}
