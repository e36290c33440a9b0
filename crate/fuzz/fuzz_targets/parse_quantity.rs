//! Quantity parser must never panic, and every accepted value must
//! round-trip losslessly through its canonical text form.

#![no_main]

use libfuzzer_sys::fuzz_target;
use slabnoise_cli::units::Quantity;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(q) = text.parse::<Quantity>() {
        assert!(q.value.is_finite());
        assert!(q.si().is_finite());
        let canonical = q.to_string();
        let back: Quantity = canonical.parse().expect("canonical form must reparse");
        assert_eq!(back, q);
        assert_eq!(back.to_string(), canonical);
    }
});
