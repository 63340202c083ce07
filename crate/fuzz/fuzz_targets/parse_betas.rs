#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(betas) = gtlab::cli::parse_betas(text) {
            assert!(!betas.is_empty());
            assert!(betas.iter().all(|b| b.is_finite() && *b > 0.0));
        }
    }
});
