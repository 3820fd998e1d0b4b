#![no_main]

use lanecode::DelayVector;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(d) = text.parse::<DelayVector>() else {
        return;
    };
    assert!(!d.is_empty());
    assert!(d.as_slice().windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(d.tau_up(0).unwrap(), d.max() - d.min());
    assert!(d.d_min_count() >= 1 && d.d_max_count() >= 1);
    let again: DelayVector = d.to_string().parse().expect("displayed vector parses");
    assert_eq!(again, d);
});
