#![no_main]

use libfuzzer_sys::fuzz_target;
use wgqed::model::{BasisLayout, ConfigDoc};

fuzz_target!(|data: &[u8]| {
    let Ok(doc) = serde_json::from_slice::<ConfigDoc>(data) else { return };
    if let Ok((config, init)) = doc.build() {
        if config.dim() > 5000 {
            return;
        }
        let psi = init.to_vector(&config).unwrap();
        assert_eq!(psi.len(), BasisLayout::of(&config).dim());
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-10);
    }
});
