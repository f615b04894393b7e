#![no_main]

use libfuzzer_sys::fuzz_target;
use wgqed::scenario::Scenario;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = Scenario::from_json_bytes(data) {
        // Validation guarantees every sweep point builds.
        for doc in s.point_docs().unwrap() {
            doc.build().unwrap();
        }
    }
});
