mod common;

use common::*;
use corrchol::oracle::{numerical_jacobian_logdet, numerical_jacobian_logdet_with, DEFAULT_STEP};
use corrchol::transform::forward_variant;
use corrchol::{forward, BoundsSpec, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn identity_case_matches_finite_differences() {
    for n in 2..=5 {
        let bounds = BoundsSpec::scalar(n, -1.0, 1.0).unwrap();
        let x = vec![0.0; n * (n - 1) / 2];
        let analytic = forward(&x, &bounds).unwrap().log_abs_det_jacobian;
        let numeric = numerical_jacobian_logdet(&x, &bounds, DEFAULT_STEP).unwrap();
        assert!((analytic - numeric).abs() < 1e-5, "n={n}: {analytic} vs {numeric}");
    }
}

#[test]
fn random_draws_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for variant in [Variant::Standard, Variant::Stable] {
        for n in 2..=5 {
            let mut done = 0;
            while done < 20 {
                let bounds = random_bounds(&mut rng, n);
                let x = random_x(&mut rng, n, 3.0);
                let Ok(r) = forward_variant(&x, &bounds, variant) else { continue };
                let Ok(numeric) = numerical_jacobian_logdet_with(variant, &x, &bounds, DEFAULT_STEP) else {
                    continue;
                };
                let diff = (r.log_abs_det_jacobian - numeric).abs();
                assert!(diff < 1e-5, "{variant:?} n={n} x={x:?}: diff {diff}");
                done += 1;
            }
        }
    }
}

#[test]
fn per_entry_bounds_change_the_jacobian_consistently() {
    let bounds = BoundsSpec::from_fn(4, |e| if e.col == 1 { (-0.5, 0.9) } else { (-0.8, 0.3) }).unwrap();
    let x = [0.4, -1.1, 0.9, 0.2, -0.3, 1.4];
    let analytic = forward(&x, &bounds).unwrap().log_abs_det_jacobian;
    let numeric = numerical_jacobian_logdet(&x, &bounds, DEFAULT_STEP).unwrap();
    assert!((analytic - numeric).abs() < 1e-5);
}
