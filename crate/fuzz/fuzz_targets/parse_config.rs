//! Config parser must never panic and accepted configs must be a fixed
//! point of emit -> parse.

#![no_main]

use libfuzzer_sys::fuzz_target;
use slabnoise_cli::config::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = Config::parse(text) {
        let canonical = cfg.emit();
        let again = Config::parse(&canonical).expect("canonical config must reparse");
        assert_eq!(again, cfg);
        assert_eq!(again.emit(), canonical);
    }
});
