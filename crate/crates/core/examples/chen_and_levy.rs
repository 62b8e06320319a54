//! Chen's identity (signatures of concatenated paths multiply), the inverse
//! given by the reversed path, and the Lévy area of 2D paths.
//!
//! `cargo run --example chen_and_levy`

use skelsig::sigcore::{chen_concat, levy_area, path_signature, DiscretePath};

fn main() -> skelsig::Result<()> {
    let path = DiscretePath::from_points(&[[0.0, 0.0], [2.0, 1.0], [1.0, 3.0], [-1.0, 2.0], [0.5, -0.5]])?;
    let whole = path_signature(&path, 4)?;
    let left = path_signature(&path.slice(0, 3)?, 4)?;
    let right = path_signature(&path.slice(2, path.len())?, 4)?;
    let joined = chen_concat(&left, &right)?;
    let worst = whole
        .as_slice()
        .iter()
        .zip(joined.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("split at sample 2: max |whole - left*right| = {worst:.2e}");

    let back = path_signature(&path.reversed(), 4)?;
    let loop_sig = chen_concat(&whole, &back)?;
    let largest = loop_sig.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!("path followed by its reversal: largest coefficient {largest:.2e}");

    // Counter-clockwise and clockwise right angles.
    for (name, pts) in [
        ("right then up", [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]),
        ("up then right", [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
    ] {
        let s = path_signature(&DiscretePath::from_points(&pts)?, 2)?;
        println!("{name}: level 2 {:?}, Levy area {}", s.block(2), levy_area(&s)?);
    }
    Ok(())
}
