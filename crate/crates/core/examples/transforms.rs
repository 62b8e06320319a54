//! Path transforms applied before signatures: time augmentation, lead-lag,
//! dyadic windows, uniform frame sampling and spline gap filling.
//!
//! `cargo run --example transforms`

use skelsig::sigcore::{path_signature, DiscretePath};
use skelsig::transforms::{add_time, dyadic_windows, fill_missing, lead_lag, uniform_sample};

fn main() -> skelsig::Result<()> {
    // A back-and-forth path is tree-like: its signature is trivial.
    let there_and_back = DiscretePath::from_scalars(&[0.0, 1.0, 2.0, 1.0, 0.0])?;
    println!("tree-like path: {:?}", path_signature(&there_and_back, 2)?.as_slice());
    let timed = add_time(&there_and_back);
    println!("with time added: {:?}", path_signature(&timed, 2)?.as_slice());

    let ll = lead_lag(&[1.0, 3.0, 2.0, 4.0], 3)?;
    println!("lead-lag (3 copies) of [1,3,2,4]:");
    for p in ll.points() {
        println!("  {p:?}");
    }

    println!("dyadic windows over 11 samples, depth 3:");
    for w in dyadic_windows(11, 3)? {
        println!("  level {}: {}..={}", w.level, w.start, w.end);
    }

    println!("10 of 37 frames: {:?}", uniform_sample(37, 10)?);

    let values = [0.0, 0.0, 1.0, 1.0, -9.0, -9.0, 3.0, 3.0, -9.0, -9.0];
    let valid = [true, true, false, true, false];
    println!("gap filling (2D, frames 1 and 4 missing): {:?}", fill_missing(&values, 2, &valid)?);
    Ok(())
}
