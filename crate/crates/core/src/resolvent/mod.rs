//! Semi-analytic emitter amplitudes from the inverse Laplace transform.
//!
//! For emitter `j` with initial amplitude `a = C_j(0)` and `b` the sum of the
//! other initial emitter amplitudes, the transform is
//! `C_j(s) = i (a L1 + b L2) / ((is - Omega_A) G)`. Closing the Bromwich
//! contour leaves three pieces: the pole at `s = -i Omega_A`, the residues at
//! the bound-state roots of `G`, and the integral around the band cut
//! `[-2iJ, 2iJ]`. Because `L1 = L2 + G`, every piece except the free
//! `a e^{-i Omega_A t}` depends on the initial state only through `a + b`.

pub mod bound;
pub mod green;
pub mod structure;

use num_complex::Complex64 as C64;
use serde::Serialize;

pub use bound::{find_bound_states, BoundState};
pub use green::{green_f, green_f_cut, CutSide};
pub use structure::{branch_cut_integrand, structure_functions, StructureFunctions};

use crate::error::{Error, Result};
use crate::model::{InitialState, SystemConfig};
use crate::quad::{integrate, QuadOptions};
use structure::Params;

/// Offsets above the real axis, in units of `2J`, for the pole limit when
/// `Omega_A` is a root of `G`.
pub const POLE_EPSILONS: [f64; 3] = [1e-4, 5e-5, 2.5e-5];

/// Conditions under which the result was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeFlag {
    /// `Omega_A` lies in the band, so the free pole sits on the cut and its
    /// residue is taken as the limit from above.
    PoleOnCut,
}

/// The three contributions to one emitter amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AmplitudeTerms {
    pub pole: C64,
    pub bound: C64,
    pub cut: C64,
}

impl AmplitudeTerms {
    pub fn total(&self) -> C64 {
        self.pole + self.bound + self.cut
    }
}

/// Everything needed to evaluate emitter amplitudes of one configuration
/// and initial state at arbitrary times.
#[derive(Debug, Clone)]
pub struct ResolventContext {
    config: SystemConfig,
    params: Params,
    init: InitialState,
    /// Sum of all initial emitter amplitudes.
    bright: C64,
    bound_states: Vec<BoundState>,
    /// `L2 / G` at `z = Omega_A`.
    pole_weight: C64,
    /// `L2 / ((E_m - Omega_A) dG/dz)` per bound state.
    bound_weights: Vec<C64>,
    flags: Vec<RegimeFlag>,
    quad: QuadOptions,
}

impl ResolventContext {
    pub fn new(config: &SystemConfig, init: &InitialState) -> Result<Self> {
        init.check_against(config)?;
        if init.excited_count() > 2 {
            return Err(Error::Unsupported(format!(
                "the resolvent solution covers at most two initially excited emitters, got {}",
                init.excited_count()
            )));
        }
        let params = Params::of(config);
        let bright: C64 = init.amplitudes().iter().map(|(_, c)| c).sum();
        let bound_states = find_bound_states(config)?;
        let (pole_weight, flags) = pole_weight(&params)?;
        let bound_weights = bound_states
            .iter()
            .map(|b| {
                let z = C64::new(b.energy, 0.0);
                params.at_energy(z).l2 / ((b.energy - params.omega_a) * b.dg_dz())
            })
            .collect();
        Ok(Self {
            config: *config,
            params,
            init: init.clone(),
            bright,
            bound_states,
            pole_weight,
            bound_weights,
            flags,
            quad: QuadOptions::default(),
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn bound_states(&self) -> &[BoundState] {
        &self.bound_states
    }

    pub fn flags(&self) -> &[RegimeFlag] {
        &self.flags
    }

    /// Emitter whose amplitude `amplitude` returns: the first excited one.
    pub fn primary_emitter(&self) -> usize {
        self.init.amplitudes().first().map(|(j, _)| *j).unwrap_or(0)
    }

    /// `C_{j1}^A(t)` for the first initially excited emitter, `t` in units of
    /// `1/(2J)`.
    pub fn amplitude(&self, t_2j: f64) -> Result<C64> {
        self.amplitude_of(self.primary_emitter(), t_2j)
    }

    pub fn amplitude_of(&self, j: usize, t_2j: f64) -> Result<C64> {
        Ok(self.terms(j, &[t_2j])?[0].total())
    }

    /// Pole, bound-state and cut contributions to `C_j^A` at each time.
    pub fn terms(&self, j: usize, times_2j: &[f64]) -> Result<Vec<AmplitudeTerms>> {
        if j >= self.config.emitters.count {
            return Err(Error::Domain(format!(
                "emitter index {j} out of range (M_A = {})",
                self.config.emitters.count
            )));
        }
        let a = self.init.amplitude_of(j);
        let bright = self.bright_parts(times_2j)?;
        Ok(bright
            .into_iter()
            .zip(times_2j)
            .map(|(mut t, &time)| {
                let free = C64::from_polar(1.0, -self.params.omega_a * time / self.params.two_j());
                let shift = C64::from_polar(1.0, -self.config.waveguide.omega_c * time / self.params.two_j());
                t.pole = (t.pole + a * free) * shift;
                t.bound *= shift;
                t.cut *= shift;
                t
            })
            .collect())
    }

    /// All emitter amplitudes, `out[time][emitter]`.
    pub fn amplitudes(&self, times_2j: &[f64]) -> Result<Vec<Vec<C64>>> {
        let m_a = self.config.emitters.count;
        let bright = self.bright_parts(times_2j)?;
        let two_j = self.params.two_j();
        Ok(bright
            .iter()
            .zip(times_2j)
            .map(|(t, &time)| {
                let free = C64::from_polar(1.0, -self.params.omega_a * time / two_j);
                let shift = C64::from_polar(1.0, -self.config.waveguide.omega_c * time / two_j);
                (0..m_a).map(|j| (self.init.amplitude_of(j) * free + t.total()) * shift).collect()
            })
            .collect())
    }

    /// `|C_j^A(t)|^2` over `times_2j`.
    pub fn excited_population(&self, j: usize, times_2j: &[f64]) -> Result<Vec<f64>> {
        Ok(self.terms(j, times_2j)?.iter().map(|t| t.total().norm_sqr()).collect())
    }

    /// Contributions proportional to the summed initial amplitude, before the
    /// band-centre phase.
    fn bright_parts(&self, times_2j: &[f64]) -> Result<Vec<AmplitudeTerms>> {
        if let Some(t) = times_2j.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
        }
        if self.bright == C64::default() {
            return Ok(vec![AmplitudeTerms::default(); times_2j.len()]);
        }
        let p = &self.params;
        let two_j = p.two_j();
        let cut = self.cut_integral(times_2j)?;
        Ok(times_2j
            .iter()
            .zip(cut)
            .map(|(&t, cut)| {
                let pole = self.pole_weight * C64::from_polar(1.0, -p.omega_a * t / two_j);
                let bound: C64 = self
                    .bound_states
                    .iter()
                    .zip(&self.bound_weights)
                    .map(|(b, w)| w * C64::from_polar(1.0, -b.energy_2j * t))
                    .sum();
                AmplitudeTerms { pole: self.bright * pole, bound: self.bright * bound, cut: self.bright * cut }
            })
            .collect())
    }

    /// `(i / 2π) ∫ S(y) e^{i y t} / (y + Omega_A/2J) dy` over the band, with
    /// `S = Σ_α α Q2^α / (Q1^α - Q2^α)` and `y = cos θ`.
    ///
    /// At `y = -Omega_A/2J` both sides give `Q2/G = -1/M_A`, so `S` vanishes
    /// and the integrand stays finite; the panel split there only keeps the
    /// quadrature away from the cancellation.
    fn cut_integral(&self, times_2j: &[f64]) -> Result<Vec<C64>> {
        let p = self.params;
        let wa = p.omega_a / p.two_j();
        let t_max = times_2j.iter().copied().fold(0.0, f64::max);
        let breaks: Vec<f64> = if wa.abs() < 1.0 { vec![(-wa).acos()] } else { Vec::new() };
        let opts = QuadOptions { initial_density: (4.0 + t_max / 2.0) / std::f64::consts::PI, ..self.quad };
        let integrand = |theta: f64, out: &mut [C64]| {
            let (sin, y) = theta.sin_cos();
            let s: C64 = CutSide::BOTH
                .iter()
                .map(|&side| {
                    let f = p.on_cut(y, side);
                    side.sign() * f.l2 / f.g
                })
                .sum();
            let base = s / (y + wa) * sin;
            for (o, &t) in out.iter_mut().zip(times_2j) {
                *o = base * C64::from_polar(1.0, y * t);
            }
        };
        let raw = integrate(integrand, 0.0, std::f64::consts::PI, &breaks, times_2j.len(), &opts)
            .map_err(|e| e.context("branch-cut integral"))?;
        let factor = C64::new(0.0, 1.0 / (2.0 * std::f64::consts::PI));
        Ok(raw.into_iter().map(|v| v * factor).collect())
    }
}

/// Largest `|K_B / L2| 2J` at `Omega_A` for which the pole weight is taken
/// as exactly `-1/M_A`; beyond it `L2` vanishes at `Omega_A` to working
/// precision and the limit is extrapolated instead.
const PLAIN_POLE_MAX_RESPONSE: f64 = 1e8;

/// Limit of `L2 / G` at `z = Omega_A` from above the real axis.
///
/// At `z = Omega_A` the emitter self-energy term of `L1` reduces to
/// `-(M_A - 1) L2`, so `G = -M_A L2` and the weight is `-1/M_A` whenever `L2`
/// does not vanish there. When it does, `Omega_A` is itself a root of `G`
/// (a bound state in the continuum when in band) and the ratio is approached
/// from above and extrapolated to zero offset.
fn pole_weight(p: &Params) -> Result<(C64, Vec<RegimeFlag>)> {
    let two_j = p.two_j();
    let in_band = p.omega_a.abs() <= two_j;
    let flags = if in_band { vec![RegimeFlag::PoleOnCut] } else { Vec::new() };
    let at = |eps_2j: f64| p.at_energy(C64::new(p.omega_a, eps_2j * two_j));
    let s0 = at(if in_band { 1e-13 } else { 0.0 });
    if (s0.k_b / s0.l2).norm() * two_j < PLAIN_POLE_MAX_RESPONSE {
        return Ok((C64::new(-1.0 / p.ma, 0.0), flags));
    }
    let f: Vec<C64> = POLE_EPSILONS
        .iter()
        .map(|&e| {
            let s = at(e);
            s.l2 / s.g
        })
        .collect();
    // Offsets halve at each step: two rounds of Richardson extrapolation.
    let r1 = 2.0 * f[1] - f[0];
    let r2 = 2.0 * f[2] - f[1];
    let limit = (4.0 * r2 - r1) / 3.0;
    if !limit.is_finite() {
        return Err(Error::Regime(format!("pole term at Omega_A/2J = {} is not finite", p.omega_a / two_j)));
    }
    Ok((limit, flags))
}

/// `C_{j1}^A(t)` for a one-off evaluation; build a [`ResolventContext`] to
/// reuse bound states across many times.
pub fn amplitude(config: &SystemConfig, init: &InitialState, t_2j: f64) -> Result<C64> {
    ResolventContext::new(config, init)?.amplitude(t_2j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WaveguideParams;
    use crate::oracle::{evolve, EvolveOptions};

    fn cfg(dx: usize, ma: usize, mb: usize, va: f64, vb: f64, da: f64, db: f64) -> SystemConfig {
        let wg = WaveguideParams::new(0.0, 0.5, 2 * dx + 40).unwrap();
        SystemConfig::centered(wg, dx, (ma, da, va), (mb, db, vb)).unwrap()
    }

    fn max_dev(c: &SystemConfig, init: &InitialState, t_max: f64) -> f64 {
        let ctx = ResolventContext::new(c, init).unwrap();
        let traj =
            evolve(c, init, t_max, &EvolveOptions { dt_out: 0.5, field_stride: None, ..Default::default() }).unwrap();
        let j = ctx.primary_emitter();
        let res = ctx.excited_population(j, &traj.time_grid).unwrap();
        let ora = traj.excited_population(j).unwrap();
        res.iter().zip(&ora).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn sum_rule_at_zero() {
        for (c, init) in [
            (cfg(7, 1, 2, 0.08, 1.8, 0.0, 0.0), InitialState::single(0)),
            (cfg(1, 2, 2, 0.08, 1.27, 0.0, 0.0), InitialState::symmetric_pair(0, 1).unwrap()),
            (cfg(4, 2, 1, 0.1, 0.5, 0.2, -0.1), InitialState::single(1)),
            (cfg(3, 1, 0, 0.2, 0.0, 1.5, 0.0), InitialState::single(0)),
        ] {
            let ctx = ResolventContext::new(&c, &init).unwrap();
            for j in 0..c.emitters.count {
                let v = ctx.amplitude_of(j, 0.0).unwrap();
                assert!((v - init.amplitude_of(j)).norm() < 1e-6, "{c:?} j = {j}: {v}");
            }
        }
    }

    #[test]
    fn agrees_with_oracle() {
        assert!(max_dev(&cfg(7, 1, 2, 0.08, 1.8, 0.0, 0.0), &InitialState::single(0), 30.0) < 2e-2);
        assert!(max_dev(&cfg(8, 1, 2, 0.08, 1.8, 0.0, 0.0), &InitialState::single(0), 40.0) < 2e-2);
        assert!(max_dev(&cfg(5, 1, 2, 0.08, 1.0, 0.0, 0.3), &InitialState::single(0), 40.0) < 2e-2);
        assert!(max_dev(&cfg(3, 1, 0, 0.2, 0.0, 1.5, 0.0), &InitialState::single(0), 40.0) < 2e-2);
    }

    #[test]
    fn dark_pair_needs_no_integral() {
        let c = cfg(3, 2, 2, 0.08, 1.0, 0.0, 0.0);
        let ctx = ResolventContext::new(&c, &InitialState::antisymmetric_pair(0, 1).unwrap()).unwrap();
        for t in [0.0, 10.0, 100.0] {
            assert!((ctx.amplitude(t).unwrap().norm_sqr() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_three_excited() {
        let c = cfg(3, 3, 2, 0.08, 1.0, 0.0, 0.0);
        let err = ResolventContext::new(&c, &InitialState::uniform(3).unwrap()).unwrap_err();
        assert_eq!(err.kind(), "unsupported");
    }

    #[test]
    fn pole_on_cut_flag() {
        let c = cfg(7, 1, 2, 0.08, 1.8, 0.0, 0.0);
        let ctx = ResolventContext::new(&c, &InitialState::single(0)).unwrap();
        assert_eq!(ctx.flags(), &[RegimeFlag::PoleOnCut]);
        let c = cfg(3, 1, 0, 0.2, 0.0, 1.5, 0.0);
        let ctx = ResolventContext::new(&c, &InitialState::single(0)).unwrap();
        assert!(ctx.flags().is_empty());
        assert!(ctx.amplitude(-1.0).is_err());
    }
}
