#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = gtlab::matcore::json::parse_matrix(text) {
            assert!(m.frobenius_norm().is_finite());
        }
    }
});
