#![no_main]

use corrchol::io::parse_bounds_file;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(bounds) = parse_bounds_file(text) else { return };
    if bounds.n() <= 12 {
        let d = bounds.n() * (bounds.n() - 1) / 2;
        if let Ok(r) = corrchol::forward(&vec![0.0; d], &bounds) {
            assert!(r.log_abs_det_jacobian.is_finite());
        }
    }
});
