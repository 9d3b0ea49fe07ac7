#![no_main]

use delaylog::cycle::PointVerdict;
use delaylog::recipes::RecipeName;
use delaylog::OrbitStatus;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(status) = text.parse::<OrbitStatus>() {
        assert_eq!(status.to_string().parse::<OrbitStatus>().unwrap(), status);
    }
    if let Ok(verdict) = text.parse::<PointVerdict>() {
        assert_eq!(verdict.to_string().parse::<PointVerdict>().unwrap(), verdict);
    }
    if let Ok(name) = text.parse::<RecipeName>() {
        assert_eq!(name.as_str(), text);
    }
});
