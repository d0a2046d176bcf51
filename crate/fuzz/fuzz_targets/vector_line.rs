#![no_main]

use corrchol::io::{format_f64, parse_vector_line};
use corrchol::{forward, inverse, BoundsSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(x) = parse_vector_line(text) else { return };
    for v in &x {
        assert_eq!(format_f64(*v).parse::<f64>().unwrap().to_bits(), v.to_bits());
    }
    // accept only lengths that are a triangular number
    let n = (2..=12).find(|n| n * (n - 1) / 2 == x.len());
    let Some(n) = n else { return };
    let bounds = BoundsSpec::scalar(n, -1.0, 1.0).unwrap();
    if let Ok(r) = forward(&x, &bounds) {
        let _ = inverse(&r.factor, &bounds);
    }
});
