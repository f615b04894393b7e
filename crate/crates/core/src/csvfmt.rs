//! Fixed CSV number formatting so outputs are byte-identical across runs.

/// Scientific notation with 16 fractional digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    #[test]
    fn round_trips_exactly() {
        for v in [0.0, 1.0, -2.5e-300, std::f64::consts::PI, 1e300] {
            assert_eq!(super::num(v).parse::<f64>().unwrap(), v);
        }
    }
}
