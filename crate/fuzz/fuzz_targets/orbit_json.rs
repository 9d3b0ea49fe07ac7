#![no_main]

use delaylog::io::{read_orbit_json, write_orbit_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(doc) = read_orbit_json(data) {
        let mut buf = Vec::new();
        write_orbit_json(&doc.params(), &doc.orbit(), &mut buf).expect("write");
        let again = read_orbit_json(buf.as_slice()).expect("reread");
        assert_eq!(again.status, doc.status);
        assert_eq!(again.points.len(), doc.points.len());
    }
});
