#![no_main]

use lanecode::sweep::{SweepSpec, MAX_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = text.parse::<SweepSpec>() else {
        return;
    };
    let values = spec.values();
    assert!(!values.is_empty() && values.len() <= MAX_POINTS + 1);
    assert!(values.iter().all(|v| v.is_finite() && *v >= spec.lo));
    let again: SweepSpec = spec.to_string().parse().expect("displayed sweep parses");
    assert_eq!(again, spec);
});
