//! The lattice field transmitted past the scatterers against the stationary
//! transmission spectrum weighted by the emitted momentum distribution.

use num_complex::Complex64 as C64;
use serde_json::json;
use wgqed::model::ConfigDoc;
use wgqed::oracle::{evolve, EvolveOptions, Trajectory};
use wgqed::scattering::spectrum_point;

const DX: usize = 150;
const N_SITES: usize = 900;
const T_OBS: f64 = 280.0;

fn run(m_b: usize) -> Trajectory {
    let d: ConfigDoc = serde_json::from_value(json!({
        "J2": 1.0, "VA_over_2J": 0.15, "VB_over_2J": 0.2, "DeltaA_over_2J": 0.0, "DeltaB_over_2J": 0.0,
        "MA": 1, "MB": m_b, "dx": DX, "n_sites": N_SITES
    }))
    .unwrap();
    let (c, init) = d.build().unwrap();
    let opts = EvolveOptions { dt_out: T_OBS / 10.0, field_stride: Some(10), ..EvolveOptions::default() };
    evolve(&c, &init, T_OBS, &opts).unwrap()
}

fn last_field(traj: &Trajectory) -> &[C64] {
    let f = traj.field.as_ref().unwrap();
    assert_eq!(*f.time_index.last().unwrap(), traj.len() - 1);
    f.amplitudes.last().unwrap()
}

#[test]
fn transmitted_fraction_matches_spectrum() {
    let with = run(1);
    let bare = run(0);
    let x_a = with.config.emitters.position;
    let x_b = with.config.scatterers.position;
    assert_eq!(x_b, x_a + DX);
    // Emission is over (exp(-Gamma_1 t) ~ 3e-6) and the reflected part
    // has not yet returned to the emitter. What remains is mostly the
    // scattering delay of components near resonance, a few 1e-3.
    assert!(with.emitter_population().last().unwrap() < &1e-3);

    let transmitted: f64 = last_field(&with)[x_b + 1..].iter().map(|c| c.norm_sqr()).sum();

    let right: Vec<(usize, C64)> = last_field(&bare).iter().copied().enumerate().skip(x_b + 1).collect();
    // Bare-run photons still between emitter and scatterer position have not
    // met the scatterers yet and are left out of both sides.
    let m = 4096;
    let mut predicted = 0.0;
    for i in 0..m {
        let k = -std::f64::consts::PI + (i as f64 + 0.5) * 2.0 * std::f64::consts::PI / m as f64;
        let phi: C64 = right.iter().map(|&(x, a)| a * C64::from_polar(1.0, -k * x as f64)).sum();
        predicted += spectrum_point(k, &with.config).unwrap().transmittance * phi.norm_sqr();
    }
    predicted /= m as f64;
    let right_total: f64 = right.iter().map(|(_, a)| a.norm_sqr()).sum();
    assert!((right_total - 0.5).abs() < 1e-2, "right-moving share {right_total}");
    assert!(predicted < 0.9 * right_total, "the scatterer should remove a visible part of the spectrum");
    assert!((transmitted - predicted).abs() < 5e-3, "lattice {transmitted} vs spectrum {predicted}");
}
