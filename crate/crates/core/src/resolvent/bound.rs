//! Out-of-band roots of `G(-iE) = 0`: the localized photon-atom dressed states.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::green::decay_factor;
use super::structure::Params;
use crate::error::{Error, Result};
use crate::model::SystemConfig;

/// Largest allowed scan step in `E / 2J`.
pub const SCAN_STEP: f64 = 1e-3;
/// Root refinement tolerance in `E / 2J`.
pub const ROOT_TOL: f64 = 1e-12;
/// Below this `|G'|` a root is treated as degenerate.
pub const MIN_G_PRIME: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundState {
    /// Energy relative to the band centre, absolute units.
    pub energy: f64,
    /// Same in units of `2J`.
    pub energy_2j: f64,
    /// `dG/ds` at `s = -iE` (equals `i dG/dz`).
    pub g_prime: C64,
    /// Sites over which the bound field falls by `1/e`.
    pub field_decay_length: f64,
}

impl BoundState {
    /// `dG/dz` at the root.
    pub fn dg_dz(&self) -> C64 {
        -C64::i() * self.g_prime
    }
}

/// All roots of `G(-iE) = 0` with `2J < |E| <= E_max`, where
/// `E_max = 4J + 4 sqrt(max(M_A V_A^2, M_B V_B^2))`, sorted by energy.
///
/// The scan runs on `E = ±2J cosh u`, which keeps the step in `E` below
/// `SCAN_STEP * 2J` and refines it toward the band edges, where weakly bound
/// states live. The scanned function is `(E^2 - 4J^2) G`, finite at the
/// edges. Without scatterers the trivial factor `K_B = z - Omega_B` is
/// divided out so no spurious root appears at `Omega_B`.
pub fn find_bound_states(config: &SystemConfig) -> Result<Vec<BoundState>> {
    let p = Params::of(config);
    let two_j = p.two_j();
    let coupling = (p.ma * p.va * p.va).max(p.mb * p.vb * p.vb).sqrt();
    let e_max = 2.0 * two_j + 4.0 * coupling;
    let u_max = (e_max / two_j).acosh();
    let scan = |sign: f64, u: f64| -> f64 {
        let z = C64::new(sign * two_j * u.cosh(), 0.0);
        let s = p.at_energy(z);
        let g = if p.mb == 0.0 { s.g / s.k_b } else { s.g };
        (two_j * u.sinh()).powi(2) * g.re
    };

    let mut out = Vec::new();
    for sign in [-1.0, 1.0] {
        let mut u = 1e-7;
        let mut prev = scan(sign, u);
        while u < u_max {
            let du = SCAN_STEP.min(SCAN_STEP / u.sinh());
            let next_u = (u + du).min(u_max);
            let cur = scan(sign, next_u);
            if prev == 0.0 || prev.signum() != cur.signum() {
                let root_u = bisect(|v| scan(sign, v), u, next_u, prev);
                out.push(make_state(&p, sign * two_j * root_u.cosh())?);
            }
            prev = cur;
            u = next_u;
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    out.dedup_by(|a, b| (a.energy - b.energy).abs() < 10.0 * ROOT_TOL * two_j);
    Ok(out)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    if f_lo == 0.0 {
        return lo;
    }
    let s_lo = f_lo.signum();
    // `E` changes by at most `2J sinh(u) du` per step in `u`.
    while (hi - lo) * hi.sinh().max(hi) > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn make_state(p: &Params, energy: f64) -> Result<BoundState> {
    let z = C64::new(energy, 0.0);
    let dg = p.dg_dz(z);
    if dg.norm() < MIN_G_PRIME {
        return Err(Error::DegenerateRoot { energy_2j: energy / p.two_j(), g_prime_abs: dg.norm() });
    }
    let zeta = decay_factor(z, p.j);
    Ok(BoundState {
        energy,
        energy_2j: energy / p.two_j(),
        g_prime: C64::i() * dg,
        field_decay_length: -1.0 / zeta.ln(),
    })
}
