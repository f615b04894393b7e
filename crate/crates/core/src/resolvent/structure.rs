//! The Laplace-domain structure functions `K_A`, `K_B`, `L1`, `L2`, `G` and
//! their band-edge boundary values `U`, `Q1`, `Q2`.

use num_complex::Complex64 as C64;

use super::green::{f_cut, g0, g0_dz, CutSide};
use crate::error::{Error, Result};
use crate::model::SystemConfig;

/// Parameters with energies measured from the band centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Params {
    pub j: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub va: f64,
    pub vb: f64,
    pub ma: f64,
    pub mb: f64,
    pub dx: i64,
}

impl Params {
    pub fn of(config: &SystemConfig) -> Self {
        let wc = config.waveguide.omega_c;
        Self {
            j: config.j(),
            omega_a: config.emitters.omega - wc,
            omega_b: config.scatterers.omega - wc,
            va: config.emitters.coupling,
            vb: config.scatterers.coupling,
            ma: config.emitters.count as f64,
            mb: config.scatterers.count as f64,
            dx: config.dx() as i64,
        }
    }

    pub fn two_j(&self) -> f64 {
        2.0 * self.j
    }

    /// `L1`, `L2` from the local and transfer propagators.
    fn combine(&self, z: C64, f0: C64, fd: C64) -> StructureFunctions {
        let va2 = self.va * self.va;
        let vb2 = self.vb * self.vb;
        let k_a = z - self.omega_a - self.ma * va2 * f0;
        let k_a_rest = z - self.omega_a - (self.ma - 1.0) * va2 * f0;
        let k_b = z - self.omega_b - self.mb * vb2 * f0;
        let x2 = va2 * vb2 * fd * fd;
        let l1 = k_a_rest * k_b - (self.ma - 1.0) * self.mb * x2;
        let l2 = k_b * va2 * f0 + self.mb * x2;
        StructureFunctions { k_a, k_a_rest, k_b, l1, l2, g: l1 - l2 }
    }

    /// Structure functions at energy `z` off the band.
    pub fn at_energy(&self, z: C64) -> StructureFunctions {
        self.combine(z, g0(z, 0, self.j), g0(z, self.dx, self.j))
    }

    /// `dG/dz` from `G = (z - Omega_A) K_B - M_A L2`.
    pub fn dg_dz(&self, z: C64) -> C64 {
        let va2 = self.va * self.va;
        let vb2 = self.vb * self.vb;
        let f0 = g0(z, 0, self.j);
        let fd = g0(z, self.dx, self.j);
        let df0 = g0_dz(z, 0, self.j);
        let dfd = g0_dz(z, self.dx, self.j);
        let k_b = z - self.omega_b - self.mb * vb2 * f0;
        let dk_b = 1.0 - self.mb * vb2 * df0;
        let dl2 = dk_b * va2 * f0 + k_b * va2 * df0 + 2.0 * self.mb * va2 * vb2 * fd * dfd;
        k_b + (z - self.omega_a) * dk_b - self.ma * dl2
    }

    /// Boundary values on side `side` of the cut at `E = -2Jy`.
    pub fn on_cut(&self, y: f64, side: CutSide) -> StructureFunctions {
        let z = C64::new(-self.two_j() * y, 0.0);
        self.combine(z, f_cut(y, 0, self.j, side), f_cut(y, self.dx, self.j, side))
    }
}

/// Values of the structure functions at one point. `k_a` uses all `M_A`
/// emitters, `k_a_rest` the `M_A - 1` others.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureFunctions {
    pub k_a: C64,
    pub k_a_rest: C64,
    pub k_b: C64,
    pub l1: C64,
    pub l2: C64,
    pub g: C64,
}

/// `K_A`, `K_B`, `L1`, `L2`, `G` at Laplace variable `s` (absolute units,
/// `z = i s` measured from the band centre).
pub fn structure_functions(s: C64, config: &SystemConfig) -> Result<StructureFunctions> {
    let p = Params::of(config);
    super::green::green_f(s, 0, p.j)?;
    Ok(p.at_energy(C64::i() * s))
}

/// `(Q1^α, Q2^α)` on the band at `y ∈ (-1, 1)`, built from
/// `U_i^α(y, M) = -2Jy - Omega_i - M V_i^2 f_α(y, 0)`.
pub fn branch_cut_integrand(y: f64, side: CutSide, config: &SystemConfig) -> Result<(C64, C64)> {
    if !(y.abs() < 1.0) {
        return Err(Error::Domain(format!("cut variable y = {y} must satisfy |y| < 1")));
    }
    let s = Params::of(config).on_cut(y, side);
    Ok((s.l1, s.l2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WaveguideParams;

    fn cfg(dx: usize, ma: usize, mb: usize, va: f64, vb: f64, da: f64, db: f64) -> SystemConfig {
        let wg = WaveguideParams::new(0.0, 0.5, 4 * dx + 40).unwrap();
        SystemConfig::centered(wg, dx, (ma, da, va), (mb, db, vb)).unwrap()
    }

    #[test]
    fn uncoupled_reduces_to_free_poles() {
        let c = cfg(3, 2, 2, 0.0, 0.0, 0.1, -0.2);
        let s = C64::new(0.3, 0.7);
        let f = structure_functions(s, &c).unwrap();
        let z = C64::i() * s;
        assert!((f.k_a - (z - 0.1)).norm() < 1e-15);
        assert!((f.k_b - (z + 0.2)).norm() < 1e-15);
        assert_eq!(f.l2, C64::default());
        assert!((f.g - (z - 0.1) * (z + 0.2)).norm() < 1e-15);
    }

    #[test]
    fn no_scatterers_factorizes() {
        let c = cfg(3, 2, 0, 0.08, 0.0, 0.0, 0.3);
        let s = C64::new(0.2, -1.4);
        let f = structure_functions(s, &c).unwrap();
        let z = C64::i() * s;
        let f0 = g0(z, 0, 0.5);
        assert!((f.l2 - 0.08 * 0.08 * f0 * (z - 0.3)).norm() < 1e-14);
        assert!((f.g - (z - 0.3) * f.k_a).norm() < 1e-14);
    }

    #[test]
    fn g_is_l1_minus_l2_and_dicke_form() {
        let c = cfg(5, 3, 2, 0.1, 0.6, 0.05, -0.1);
        let p = Params::of(&c);
        for z in [C64::new(1.4, 0.0), C64::new(0.3, 0.2)] {
            let f = p.at_energy(z);
            let alt = (z - p.omega_a) * f.k_b - p.ma * f.l2;
            assert!((f.g - alt).norm() < 1e-13);
        }
    }

    #[test]
    fn dg_dz_matches_finite_difference() {
        let c = cfg(7, 2, 2, 0.16, 1.8, 0.0, 0.0);
        let p = Params::of(&c);
        for z in [C64::new(1.3, 0.0), C64::new(-1.1, 0.0), C64::new(0.1, 0.3)] {
            let h = 1e-6;
            let fd = (p.at_energy(z + h).g - p.at_energy(z - h).g) / (2.0 * h);
            let an = p.dg_dz(z);
            assert!((fd - an).norm() < 1e-6 * (1.0 + an.norm()), "{fd} vs {an}");
        }
    }

    #[test]
    fn cut_without_scatterer_coupling() {
        let c = cfg(4, 1, 2, 0.08, 0.0, 0.0, 0.0);
        let p = Params::of(&c);
        for side in CutSide::BOTH {
            let (_, q2) = branch_cut_integrand(0.3, side, &c).unwrap();
            let u_b = -0.3 - p.omega_b;
            let want = u_b * 0.08 * 0.08 * f_cut(0.3, 0, 0.5, side);
            assert!((q2 - want).norm() < 1e-15);
        }
        assert!(branch_cut_integrand(-1.0, CutSide::Plus, &c).is_err());
    }
}
