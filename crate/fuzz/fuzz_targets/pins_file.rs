#![no_main]

use corrchol::io::parse_pins_file;
use corrchol::{forward_with_fixed, to_correlation, BoundsSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let n = 2 + usize::from(n % 7);
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let Ok(pins) = parse_pins_file(text, n) else { return };
    let bounds = BoundsSpec::scalar(n, -1.0, 1.0).unwrap();
    let x = vec![0.0; n * (n - 1) / 2 - pins.len()];
    if let Ok(r) = forward_with_fixed(&x, &bounds, &pins) {
        let c = to_correlation(&r.factor);
        for (e, p) in pins.iter() {
            assert!((c[(e.row - 1, e.col - 1)] - p).abs() < 1e-12);
        }
    }
});
