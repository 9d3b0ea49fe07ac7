#![no_main]

use delaylog_cli::config::Config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = Config::from_json(text) {
        for z in [cfg.alpha, cfg.beta, cfg.z0, cfg.z_minus1, cfg.fixed].into_iter().flatten() {
            assert!(z.0.is_finite());
        }
    }
});
