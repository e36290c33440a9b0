//! Bath fixture deserialization must never panic; accepted baths must
//! satisfy the validated invariants and survive a JSON round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use slabnoise::bath::DiscreteBath;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(bath) = DiscreteBath::from_json(text) {
        for o in bath.oscillators() {
            assert!(o.omega > 0.0 && o.beta_sq >= 0.0);
        }
        let again = DiscreteBath::from_json(&bath.to_json()).expect("round trip");
        assert_eq!(again.len(), bath.len());
        // cheap sums must stay finite on any accepted bath
        assert!(bath
            .exact_spin_entanglement(slabnoise::Vec3::Z, 1.0)
            .is_finite());
    }
});
