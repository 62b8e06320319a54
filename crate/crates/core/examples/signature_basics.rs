//! Truncated signatures of piecewise-linear paths: storage layout, lookup by
//! multi-index, the closed form of a single segment, and the dimension count.
//!
//! `cargo run --example signature_basics`

use skelsig::sigcore::{path_signature, segment_signature, signature_dimension, DiscretePath};

fn main() -> skelsig::Result<()> {
    let seg = segment_signature(&[0.0, 0.0], &[3.0, 4.0], 2)?;
    println!("segment (0,0)->(3,4), level 2: {:?}", seg.as_slice());

    let path = DiscretePath::from_points(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])?;
    let sig = path_signature(&path, 3)?;
    println!("three sides of the unit square, level 3 ({} coefficients)", sig.len());
    for k in 1..=3 {
        println!("  level {k}: {:?}", sig.block(k));
    }
    // `get` takes 0-based axes; printed names use 1-based letters.
    println!("  S^(1,2) = {}, S^(2,1) = {}", sig.get(&[0, 1]), sig.get(&[1, 0]));

    let scalar = DiscretePath::from_scalars(&[0.0, 5.0, -1.0, 2.0])?;
    println!("1D path with total increment 2, level 4: {:?}", path_signature(&scalar, 4)?.as_slice());

    for (d, n) in [(2, 2), (2, 4), (3, 5), (60, 4)] {
        println!("d = {d}, level {n}: {} coefficients", signature_dimension(d, n, false));
    }
    Ok(())
}
