#![no_main]

use delaylog::io::{read_sweep_csv, write_sweep_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(result) = read_sweep_csv(data) {
        let mut buf = Vec::new();
        write_sweep_csv(&result, &mut buf).expect("write");
        let again = read_sweep_csv(buf.as_slice()).expect("reread");
        assert_eq!(again.records.len(), result.records.len());
    }
});
