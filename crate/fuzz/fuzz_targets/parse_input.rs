#![no_main]

use gtlab::cli::{evaluate_input, parse_input, Inequality};
use gtlab::report::SLACK_REL;
use libfuzzer_sys::fuzz_target;

const ALL: [Inequality; 6] = [
    Inequality::GtMulti,
    Inequality::ClassicalGt,
    Inequality::Interpolation,
    Inequality::Lemma,
    Inequality::GtLogdiff,
    Inequality::GtExtended,
];

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(input) = parse_input(text) else {
        return;
    };
    for inequality in ALL {
        let _ = evaluate_input(inequality, &input, SLACK_REL, false);
    }
});
