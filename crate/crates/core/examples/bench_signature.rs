//! Times the signature of a 100-sample random walk in 60 dimensions at
//! level 4 (over 13 million coefficients).
//!
//! `cargo run --release --example bench_signature [dim level points repeats]`

use skelsig::cli::run_bench;

fn main() -> skelsig::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let arg = |i: usize, default: usize| args.get(i).copied().unwrap_or(default);
    let report = run_bench(arg(0, 60), arg(1, 4), arg(2, 100), arg(3, 3), 0)?;
    println!("{report}");
    Ok(())
}
