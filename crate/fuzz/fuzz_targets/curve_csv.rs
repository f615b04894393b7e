#![no_main]

use libfuzzer_sys::fuzz_target;
use wgqed::scenario::{fit_rates, parse_curve_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(curve) = parse_curve_csv(data) {
        assert!(curve.times.windows(2).all(|w| w[0] < w[1]));
        let _ = fit_rates(&curve.times, &curve.values, curve.times.last().copied().unwrap_or(0.0) / 2.0);
        // Accepted curves survive a write/parse cycle.
        let again = parse_curve_csv(curve.to_csv_string().as_bytes()).unwrap();
        assert_eq!(again, curve);
    }
});
