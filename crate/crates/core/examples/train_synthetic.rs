//! End-to-end run on generated skeleton clips with the default pipeline:
//! augmentation, signature features, scaling, dropconnect training.
//!
//! `cargo run --release --example train_synthetic [seed]`

use std::time::Instant;

use skelsig::classifier::{train, LinearNetModel, TrainConfig};
use skelsig::skeleton::synthetic::{generate, SyntheticConfig};
use skelsig::skeleton::{extract_clips, ExtractConfig, FeatureScaler};

fn main() -> skelsig::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let data = generate(&SyntheticConfig { seed, ..Default::default() })?;
    let extract = ExtractConfig::default();

    let start = Instant::now();
    let (mut train_x, train_y) = extract_clips(&data.train, &data.descriptor, &extract, true)?;
    let (mut test_x, test_y) = extract_clips(&data.test, &data.descriptor, &extract, false)?;
    let scaler = FeatureScaler::fit(train_x.iter_rows())?;
    for m in [&mut train_x, &mut test_x] {
        for r in 0..m.rows {
            scaler.apply(m.row_mut(r))?;
        }
    }
    println!(
        "features: {} train rows, {} test rows, width {} ({:.1}s)",
        train_x.rows,
        test_x.rows,
        train_x.cols,
        start.elapsed().as_secs_f64()
    );

    let config = TrainConfig { seed, ..Default::default() };
    let model = LinearNetModel::new(train_x.cols, data.descriptor.class_names.len(), config.clone())?;
    let start = Instant::now();
    let outcome = train(model, &train_x, &train_y, &config)?;
    for e in outcome.history.iter().filter(|e| e.epoch % 20 == 0) {
        println!("epoch {:3}  lr {:.5}  loss {:.4}  train acc {:.3}", e.epoch, e.learning_rate, e.loss, e.accuracy);
    }
    println!("training: {:.1}s", start.elapsed().as_secs_f64());

    let mut correct = 0;
    for (r, &y) in test_x.iter_rows().zip(&test_y) {
        if outcome.model.predict(r)?.0 == y {
            correct += 1;
        }
    }
    println!("test accuracy: {:.4} ({correct}/{})", correct as f64 / test_y.len() as f64, test_y.len());
    Ok(())
}
