mod common;

use common::{close, max_rel_diff, random_path};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skelsig::sigcore::{
    chen_concat, path_signature, segment_signature, signature_bruteforce, signature_dimension, DiscretePath,
    TruncatedSignature,
};

fn path_strategy(max_dim: usize, max_len: usize) -> impl Strategy<Value = DiscretePath> {
    (1..=max_dim, 1..=max_len).prop_flat_map(|(d, l)| {
        prop::collection::vec(-2.0f64..2.0, d * l).prop_map(move |c| DiscretePath::new(d, c).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chen_split_matches_whole(path in path_strategy(4, 20), level in 1usize..=4, cut in 0.0f64..1.0) {
        let split = (cut * (path.len() - 1) as f64) as usize;
        let whole = path_signature(&path, level).unwrap();
        let left = path_signature(&path.slice(0, split + 1).unwrap(), level).unwrap();
        let right = path_signature(&path.slice(split, path.len()).unwrap(), level).unwrap();
        let joined = chen_concat(&left, &right).unwrap();
        prop_assert!(max_rel_diff(&whole, &joined) <= 1e-10);
    }

    #[test]
    fn collinear_insertion_is_invisible(path in path_strategy(4, 12), level in 1usize..=4, t in 0.0f64..1.0, at in 0usize..100) {
        prop_assume!(path.len() >= 2);
        let seg = at % (path.len() - 1);
        let (a, b) = (path.point(seg), path.point(seg + 1));
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
        let mut pts: Vec<Vec<f64>> = path.points().map(<[f64]>::to_vec).collect();
        pts.insert(seg + 1, mid);
        let refined = DiscretePath::from_points(&pts).unwrap();
        let d = max_rel_diff(&path_signature(&path, level).unwrap(), &path_signature(&refined, level).unwrap());
        prop_assert!(d <= 1e-10);
    }

    #[test]
    fn reversal_cancels(path in path_strategy(4, 12), level in 1usize..=4) {
        let fwd = path_signature(&path, level).unwrap();
        let back = path_signature(&path.reversed(), level).unwrap();
        let prod = chen_concat(&fwd, &back).unwrap();
        prop_assert!(prod.as_slice().iter().all(|c| c.abs() <= 1e-10 * fwd.as_slice().iter().fold(1.0f64, |m, v| m.max(v.abs()))));
    }

    #[test]
    fn translation_is_bit_identical(path in path_strategy(4, 12), level in 1usize..=4, shift in -5.0f64..5.0) {
        let offset = vec![shift; path.dim()];
        let moved = path.translated(&offset).unwrap();
        // Increments can differ in the last bit after the shift, so compare
        // on integer-valued paths where the arithmetic is exact.
        let snap = |p: &DiscretePath| DiscretePath::new(p.dim(), p.as_slice().iter().map(|v| (v * 8.0).round()).collect()).unwrap();
        let int_shift = vec![shift.round(); path.dim()];
        let a = path_signature(&snap(&path), level).unwrap();
        let b = path_signature(&snap(&path).translated(&int_shift).unwrap(), level).unwrap();
        prop_assert_eq!(a.as_slice(), b.as_slice());
        prop_assert!(max_rel_diff(&path_signature(&path, level).unwrap(), &path_signature(&moved, level).unwrap()) <= 1e-10);
    }

    #[test]
    fn one_dimensional_closed_form(delta in -10.0f64..10.0, level in 1usize..=6, len in 2usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(delta.to_bits());
        // Random interior points; only the total increment matters in 1D.
        let mut pts: Vec<f64> = (0..len).map(|_| rng.gen_range(-3.0..3.0)).collect();
        pts[len - 1] = pts[0] + delta;
        let sig = path_signature(&DiscretePath::from_scalars(&pts).unwrap(), level).unwrap();
        let mut fact = 1.0;
        for k in 1..=level {
            fact *= k as f64;
            prop_assert!(close(sig.block(k)[0], delta.powi(k as i32) / fact, 1e-12));
        }
    }

    #[test]
    fn shuffle_identity_in_2d(path in path_strategy(2, 20).prop_filter("2d", |p| p.dim() == 2)) {
        let s = path_signature(&path, 2).unwrap();
        let lhs = s.get(&[0]) * s.get(&[1]);
        let rhs = s.get(&[0, 1]) + s.get(&[1, 0]);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }
}

#[test]
fn stored_size_independent_of_length() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (d, n) in [(1, 3), (2, 4), (3, 3), (5, 2)] {
        let expected = signature_dimension(d as u64, n as u32, false) as usize;
        for len in 1..=100 {
            let sig = path_signature(&random_path(&mut rng, d, len), n).unwrap();
            assert_eq!(sig.len(), expected, "d={d} n={n} L={len}");
        }
    }
}

#[test]
fn oracle_agrees_on_random_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let d = rng.gen_range(1..=3);
        let len = rng.gen_range(2..=8);
        let path = random_path(&mut rng, d, len);
        let exact = path_signature(&path, 3).unwrap();
        let brute = signature_bruteforce(&path, 3, 10_000).unwrap();
        for (a, b) in exact.as_slice().iter().zip(brute.as_slice()) {
            assert!(close(*a, *b, 1e-3), "{a} vs {b}");
        }
    }
}

#[test]
fn identity_is_neutral_for_concat() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let path = random_path(&mut rng, 3, 6);
    let s = path_signature(&path, 3).unwrap();
    let e = TruncatedSignature::identity(3, 3).unwrap();
    assert!(max_rel_diff(&chen_concat(&e, &s).unwrap(), &s) == 0.0);
    assert!(max_rel_diff(&chen_concat(&s, &e).unwrap(), &s) == 0.0);
}

#[test]
fn segment_equals_two_point_path() {
    let s = segment_signature(&[0.5, -1.0, 2.0], &[1.5, 0.0, -1.0], 4).unwrap();
    let p = DiscretePath::from_points(&[[0.5, -1.0, 2.0], [1.5, 0.0, -1.0]]).unwrap();
    assert!(max_rel_diff(&s, &path_signature(&p, 4).unwrap()) <= 1e-15);
}
