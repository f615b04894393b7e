//! Closed-form decay rates and approximate amplitudes. Rates are returned
//! in units of `2J` and times taken in units of `1/(2J)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SystemConfig;

/// Which regime assumptions hold for a configuration. Computed, never assumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValidityFlags {
    /// `V_A / 2J <= 0.1`.
    pub weak_emitter: bool,
    /// `sqrt(M_B) V_B / 2J` within `[0.3, 3]`.
    pub strong_scatterer: bool,
    /// `dx V_A^2 / J^2 <= 0.5`.
    pub small_dx: bool,
    /// `Delta_A = 0`.
    pub emitter_resonant: bool,
    /// `Delta_B = 0`.
    pub scatterer_resonant: bool,
    pub odd_dx: bool,
}

impl ValidityFlags {
    pub fn of(config: &SystemConfig) -> Self {
        let j = config.j();
        let va = config.emitters.coupling;
        let mb = config.scatterers.count as f64;
        let sb = mb.sqrt() * config.vb_2j();
        Self {
            weak_emitter: config.va_2j() <= 0.1,
            strong_scatterer: (0.3..=3.0).contains(&sb),
            small_dx: config.dx() as f64 * va * va / (j * j) <= 0.5,
            emitter_resonant: config.delta_a() == 0.0,
            scatterer_resonant: config.delta_b() == 0.0,
            odd_dx: config.dx() % 2 == 1,
        }
    }

    /// All assumptions behind the enhanced-emission formulas hold.
    pub fn all(&self) -> bool {
        self.weak_emitter
            && self.strong_scatterer
            && self.small_dx
            && self.emitter_resonant
            && self.scatterer_resonant
            && self.odd_dx
    }
}

/// An exponential law `prefactor * exp(-rate t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePrediction {
    /// Units of `2J`.
    pub rate: f64,
    pub prefactor: f64,
    pub validity: ValidityFlags,
}

impl RatePrediction {
    pub fn at(&self, t_2j: f64) -> f64 {
        self.prefactor * (-self.rate * t_2j).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Enhanced,
    Suppressed,
}

/// Odd separations return the reflected photon in phase with the emitter
/// dipole (enhanced emission), even ones out of phase.
pub fn predicted_parity(dx: usize) -> Parity {
    if dx % 2 == 1 {
        Parity::Enhanced
    } else {
        Parity::Suppressed
    }
}

/// Single-emitter rate `Gamma_1 = V_A^2 / J`.
pub fn normal_rate(config: &SystemConfig) -> f64 {
    let v = config.emitters.coupling;
    v * v / config.j() / config.two_j()
}

/// Tight-binding density of states `D(Delta) = 1 / (pi sqrt(4J^2 - Delta^2))`,
/// with `Delta` in units of `2J` and `D` in units of `1/(2J)`.
pub fn density_of_states(delta_2j: f64) -> Result<f64> {
    if !(delta_2j.abs() < 1.0) {
        return Err(Error::Domain(format!("detuning {delta_2j} (units of 2J) is outside the band")));
    }
    Ok(1.0 / (std::f64::consts::PI * (1.0 - delta_2j * delta_2j).sqrt()))
}

/// Two-emitter Markovian rate `Gamma_s(Delta_A) = 4 pi V_A^2 D(Delta_A)`, all
/// quantities in units of `2J`.
pub fn markovian_rate(delta_a_2j: f64, va_2j: f64) -> Result<f64> {
    Ok(4.0 * std::f64::consts::PI * va_2j * va_2j * density_of_states(delta_a_2j)?)
}

/// Dicke rate `M_A V_A^2 / J` in units of `2J`.
pub fn dicke_rate(m_a: usize, va_2j: f64) -> f64 {
    2.0 * m_a as f64 * va_2j * va_2j
}

/// `(alpha_1, beta_1)`, dimensionless.
pub fn alpha_beta(config: &SystemConfig) -> (f64, f64) {
    alpha_beta_at(config, config.dx() as f64)
}

/// `(alpha_1, beta_1)` with the separation replaced by a continuous `dx`,
/// for taking the `dx -> 0` limit.
pub fn alpha_beta_at(config: &SystemConfig, dx: f64) -> (f64, f64) {
    let j = config.j();
    let va2 = config.emitters.coupling.powi(2);
    let vb2 = config.scatterers.coupling.powi(2);
    let mb = config.scatterers.count as f64;
    let alpha = va2 / (j * j - dx * va2 / 2.0);
    let j4 = j.powi(4);
    let beta = ((2.0 * j * j * mb * vb2 - dx * mb * va2 * vb2) / (8.0 * j4)).powi(2) - mb * va2 * vb2 / (2.0 * j4);
    (alpha, beta)
}

/// Enhanced single-emitter decay after the first reflection:
/// `P_e(t) ≈ [M_B V_B^2/(4J^2) - alpha_1/2]^2 exp(-2J alpha_1 t) / beta_1`.
pub fn enhanced_single_prediction(config: &SystemConfig) -> Result<RatePrediction> {
    let (alpha, beta) = alpha_beta(config);
    if !(beta > 0.0) {
        return Err(Error::Regime(format!("beta_1 = {beta:e} is not positive")));
    }
    let j = config.j();
    let mb = config.scatterers.count as f64;
    let vb2 = config.scatterers.coupling.powi(2);
    let amp = mb * vb2 / (4.0 * j * j) - alpha / 2.0;
    Ok(RatePrediction { rate: alpha, prefactor: amp * amp / beta, validity: ValidityFlags::of(config) })
}

pub fn enhanced_single(config: &SystemConfig, t_2j: f64) -> Result<f64> {
    Ok(enhanced_single_prediction(config)?.at(t_2j))
}

/// `Gamma_h = 4 J V_A^2 / (J^2 - dx V_A^2)` in units of `2J`.
pub fn hyperradiant_rate(config: &SystemConfig) -> Result<f64> {
    hyperradiant_rate_at(config, config.dx() as f64)
}

/// [`hyperradiant_rate`] at a continuous separation `dx`.
pub fn hyperradiant_rate_at(config: &SystemConfig, dx: f64) -> Result<f64> {
    let j = config.j();
    let va2 = config.emitters.coupling.powi(2);
    let den = j * j - dx * va2;
    if !(den > 0.0) {
        return Err(Error::Regime("dx V_A^2 must stay below J^2".into()));
    }
    Ok(4.0 * j * va2 / den / config.two_j())
}

/// Two-emitter hyperradiant amplitude
/// `C_2(t) ≈ (M_B V_B^2 - J Gamma_h) exp(-Gamma_h t / 2) / sqrt(2 (chi^2 - 16 M_B V_A^2 V_B^2))`.
/// The returned prefactor and rate describe the amplitude; the total excited
/// population is `2 |C_2|^2`.
pub fn hyperradiance_prediction(config: &SystemConfig) -> Result<RatePrediction> {
    let j = config.j();
    let va2 = config.emitters.coupling.powi(2);
    let vb2 = config.scatterers.coupling.powi(2);
    let mb = config.scatterers.count as f64;
    let dx = config.dx() as f64;
    let gamma_h_2j = hyperradiant_rate(config)?;
    let gamma_h = gamma_h_2j * config.two_j();
    let chi = mb * vb2 - dx * mb * va2 * vb2 / (j * j);
    let disc = chi * chi - 16.0 * mb * va2 * vb2;
    if !(disc > 0.0) {
        return Err(Error::Regime(format!("chi^2 - 16 M_B V_A^2 V_B^2 = {disc:e} is not positive")));
    }
    Ok(RatePrediction {
        rate: gamma_h_2j / 2.0,
        prefactor: (mb * vb2 - j * gamma_h) / (2.0 * disc).sqrt(),
        validity: ValidityFlags::of(config),
    })
}

pub fn hyperradiance(config: &SystemConfig, t_2j: f64) -> Result<f64> {
    Ok(hyperradiance_prediction(config)?.at(t_2j))
}
