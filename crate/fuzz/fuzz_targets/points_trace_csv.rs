#![no_main]

use delaylog::io::{read_points_csv, read_trace_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_points_csv(data);
    let _ = read_trace_csv(data);
});
