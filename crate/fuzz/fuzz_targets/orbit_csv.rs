#![no_main]

use delaylog::io::read_orbit_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_orbit_csv(data);
});
