#![no_main]

use corrchol::io::parse_factor_line;
use corrchol::{inverse, to_correlation, BoundsSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let n = 2 + usize::from(n % 5);
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let Ok(l) = parse_factor_line(text, n) else { return };
    let c = to_correlation(&l);
    for i in 0..n {
        assert!((c[(i, i)] - 1.0).abs() < 1e-10);
    }
    let _ = inverse(&l, &BoundsSpec::scalar(n, -1.0, 1.0).unwrap());
});
