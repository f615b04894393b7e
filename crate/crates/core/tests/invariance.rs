//! Unit-choice invariance and solver agreement on random configurations.

use proptest::prelude::*;
use serde_json::json;
use wgqed::closed_forms::{alpha_beta, hyperradiant_rate, normal_rate};
use wgqed::model::{ConfigDoc, InitialState, SystemConfig};
use wgqed::oracle::{evolve, EvolveOptions, PropagatorKind};
use wgqed::resolvent::{find_bound_states, ResolventContext};
use wgqed::scattering::{k_grid, spectrum};
use wgqed::Error;

fn build(v: serde_json::Value) -> (SystemConfig, InitialState) {
    serde_json::from_value::<ConfigDoc>(v).unwrap().build().unwrap()
}

fn opts(kind: PropagatorKind) -> EvolveOptions {
    EvolveOptions { dt_out: 0.5, propagator: kind, field_stride: None, n_sites: None }
}

fn fig2a_like(j2: f64, omega_c: f64) -> (SystemConfig, InitialState) {
    build(json!({"J2": j2, "omega_c": omega_c, "VA_over_2J": 0.08, "VB_over_2J": 1.8, "DeltaA_over_2J": 0.0,
        "DeltaB_over_2J": 0.1, "MA": 2, "MB": 2, "dx": 5, "initial": {"type": "single", "j": 1}}))
}

#[test]
fn curves_in_units_of_2j_do_not_depend_on_j_or_band_center() {
    let (c1, i1) = fig2a_like(1.0, 0.0);
    let (c2, i2) = fig2a_like(2.5, -3.0);
    let a = evolve(&c1, &i1, 30.0, &opts(PropagatorKind::Eigen)).unwrap();
    let b = evolve(&c2, &i2, 30.0, &opts(PropagatorKind::Eigen)).unwrap();
    assert_eq!(a.time_grid, b.time_grid);
    for (x, y) in a.excited_population(0).unwrap().iter().zip(b.excited_population(0).unwrap()) {
        assert!((x - y).abs() < 1e-10);
    }
    let ra = ResolventContext::new(&c1, &i1).unwrap().excited_population(0, &[5.0, 15.0, 25.0]).unwrap();
    let rb = ResolventContext::new(&c2, &i2).unwrap().excited_population(0, &[5.0, 15.0, 25.0]).unwrap();
    for (x, y) in ra.iter().zip(&rb) {
        assert!((x - y).abs() < 1e-8);
    }
    let ea: Vec<f64> = find_bound_states(&c1).unwrap().iter().map(|b| b.energy_2j).collect();
    let eb: Vec<f64> = find_bound_states(&c2).unwrap().iter().map(|b| b.energy_2j).collect();
    assert_eq!(ea.len(), eb.len());
    for (x, y) in ea.iter().zip(&eb) {
        assert!((x - y).abs() < 1e-10);
    }
    assert!((normal_rate(&c1) - normal_rate(&c2)).abs() < 1e-15);
    let (al1, be1) = alpha_beta(&c1);
    let (al2, be2) = alpha_beta(&c2);
    assert!((al1 - al2).abs() < 1e-14 && (be1 - be2).abs() < 1e-12);
    assert!((hyperradiant_rate(&c1).unwrap() - hyperradiant_rate(&c2).unwrap()).abs() < 1e-14);
    let sa = spectrum(&c1, &k_grid(101)).unwrap();
    let sb = spectrum(&c2, &k_grid(101)).unwrap();
    for (p, q) in sa.iter().zip(&sb) {
        assert!((p.reflectance - q.reflectance).abs() < 1e-12);
    }
}

fn random_config() -> impl Strategy<Value = serde_json::Value> {
    (1usize..=3, 0usize..=3, 1usize..=6, 0.02f64..0.12, 0.0f64..1.5, -0.6f64..0.6, -1.5f64..1.5).prop_map(
        |(ma, mb, dx, va, vb, da, db)| {
            json!({"J2": 1.0, "VA_over_2J": va, "VB_over_2J": vb, "DeltaA_over_2J": da, "DeltaB_over_2J": db,
                "MA": ma, "MB": mb, "dx": dx})
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagators_agree(v in random_config()) {
        let (c, init) = build(v);
        let a = evolve(&c, &init, 25.0, &opts(PropagatorKind::Eigen)).unwrap();
        let b = evolve(&c, &init, 25.0, &opts(PropagatorKind::Chebyshev)).unwrap();
        for (x, y) in a.amp_a.iter().zip(&b.amp_a) {
            for (p, q) in x.iter().zip(y) {
                prop_assert!((p - q).norm() < 1e-8);
            }
        }
        prop_assert!(b.max_norm_error() < 1e-10);
    }

    #[test]
    fn resolvent_matches_oracle(v in random_config()) {
        let (c, init) = build(v);
        let ctx = match ResolventContext::new(&c, &init) {
            Err(Error::DegenerateRoot { .. }) => return Ok(()),
            r => r.unwrap(),
        };
        let traj = evolve(&c, &init, 30.0, &opts(PropagatorKind::Auto)).unwrap();
        let times: Vec<f64> = traj.time_grid.iter().copied().step_by(6).collect();
        let amps = ctx.amplitudes(&times).unwrap();
        for (k, row) in amps.iter().enumerate() {
            let exact = &traj.amp_a[6 * k];
            for (p, q) in row.iter().zip(exact) {
                prop_assert!(p.norm() <= 1.0 + 1e-6, "|C| = {}", p.norm());
                prop_assert!((p.norm_sqr() - q.norm_sqr()).abs() < 2e-2,
                    "t = {}: {} vs {}", times[k], p.norm_sqr(), q.norm_sqr());
            }
        }
    }
}
