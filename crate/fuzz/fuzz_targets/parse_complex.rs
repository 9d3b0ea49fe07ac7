#![no_main]

use delaylog::{format_complex, parse_complex};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(z) = parse_complex(text) {
        assert!(z.is_finite());
        let again = parse_complex(&format_complex(z)).expect("formatted value parses");
        assert_eq!(again, z);
    }
});
