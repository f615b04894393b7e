//! Single-photon reflection and transmission off the scatterer ensemble.

use std::io::Write;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::csvfmt::num;
use crate::error::{Error, Result};
use crate::model::{dispersion, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub k: f64,
    /// `omega_k / 2J`.
    pub omega_2j: f64,
    pub r: C64,
    pub t: C64,
    pub reflectance: f64,
    pub transmittance: f64,
    /// `k = 0` or `k = π`: complete reflection of a mode that does not
    /// propagate and so cannot interfere with the emitter.
    pub zero_group_velocity: bool,
}

/// `r_k = -i M_B V_B^2 / (2J |sin k| (omega_k - Omega_B) + i M_B V_B^2)`.
///
/// Depends on the scatterers only through `M_B V_B^2`. Returns zero without
/// coupling; elsewhere `k = 0, π` give `-1`.
pub fn reflection_amplitude(k: f64, config: &SystemConfig) -> C64 {
    reflection(k.sin().abs(), dispersion(k, &config.waveguide), config)
}

/// `r` for a photon of in-band energy `omega_2j` (units of `2J`, including
/// `omega_c`). Exactly `-1` at `omega = Omega_B`.
pub fn reflection_at_energy(omega_2j: f64, config: &SystemConfig) -> Result<C64> {
    let c = (omega_2j - config.waveguide.omega_c / config.two_j()).clamp(-2.0, 2.0);
    if !(c.abs() <= 1.0) {
        return Err(Error::Domain(format!("energy {omega_2j} (units of 2J) is outside the band")));
    }
    Ok(reflection((1.0 - c * c).sqrt(), omega_2j * config.two_j(), config))
}

fn reflection(sin_k: f64, omega: f64, config: &SystemConfig) -> C64 {
    let a = config.scatterers.collective_coupling_sq();
    if a == 0.0 {
        return C64::default();
    }
    let d = 2.0 * config.j() * sin_k * (omega - config.scatterers.omega);
    // -i a / (d + i a), arranged so r = -1 exactly when d = 0.
    -C64::new(a * a, a * d) / (d * d + a * a)
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k > -std::f64::consts::PI - 1e-12 && k <= std::f64::consts::PI + 1e-12) {
        return Err(Error::Domain(format!("wavevector {k} outside (-π, π]")));
    }
    Ok(())
}

pub fn spectrum_point(k: f64, config: &SystemConfig) -> Result<SpectrumPoint> {
    check_k(k)?;
    let r = reflection_amplitude(k, config);
    let t = 1.0 + r;
    let zero_v = k.sin().abs() < 1e-12;
    Ok(SpectrumPoint {
        k,
        omega_2j: dispersion(k, &config.waveguide) / config.two_j(),
        r,
        t,
        reflectance: r.norm_sqr(),
        transmittance: t.norm_sqr(),
        zero_group_velocity: zero_v,
    })
}

pub fn spectrum(config: &SystemConfig, k_grid: &[f64]) -> Result<Vec<SpectrumPoint>> {
    k_grid.iter().map(|&k| spectrum_point(k, config)).collect()
}

/// `n` evenly spaced wavevectors covering `[0, π]`.
pub fn k_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![std::f64::consts::FRAC_PI_2],
        _ => (0..n).map(|i| std::f64::consts::PI * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Writes `k, omega_2J, Re(r), Im(r), R, T`.
pub fn write_spectrum_csv<W: Write>(points: &[SpectrumPoint], mut w: W) -> Result<()> {
    writeln!(w, "k,omega_2J,Re(r),Im(r),R,T")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            num(p.k),
            num(p.omega_2j),
            num(p.r.re),
            num(p.r.im),
            num(p.reflectance),
            num(p.transmittance)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceWidth {
    /// Wavevector at the resonance, `omega_k = Omega_B`.
    pub k_res: f64,
    /// Half-maximum wavevectors below and above `k_res`.
    pub k0: (f64, f64),
    /// `M_B V_B^2 / |J sin k0|`, averaged over the two half-maximum points,
    /// in units of `2J`.
    pub formula_2j: f64,
    /// Full width at half maximum of `R(omega)` from a grid scan, units of `2J`.
    pub measured_fwhm_2j: f64,
}

/// Points per side used for the numerical half-width scan.
const FWHM_SAMPLES: usize = 200_000;

/// Breit-Wigner width of the reflection line: solves
/// `4J^2 sin^2 k (omega_k - Omega_B)^2 = M_B^2 V_B^4` on each side of the
/// resonance, nearest to it, and compares with a measured FWHM.
pub fn resonance_width(config: &SystemConfig) -> Result<ResonanceWidth> {
    let j = config.j();
    let two_j = config.two_j();
    let a = config.scatterers.collective_coupling_sq();
    let cos_res = config.delta_b() / two_j;
    if !(cos_res.abs() < 1.0) {
        return Err(Error::Domain("scatterer resonance lies outside the band".into()));
    }
    if a == 0.0 {
        return Err(Error::Domain("scatterers are uncoupled; there is no resonance".into()));
    }
    let k_res = cos_res.acos();
    let h = |k: f64| {
        let d = two_j * k.sin() * (dispersion(k, &config.waveguide) - config.scatterers.omega);
        d * d - a * a
    };
    let lo = half_max_crossing(&h, k_res, 0.0)?;
    let hi = half_max_crossing(&h, k_res, std::f64::consts::PI)?;
    let formula = 0.5 * (a / (j * lo.sin()) + a / (j * hi.sin())) / two_j;

    // Scan R(omega) outward from the resonance until it drops below 1/2.
    let omega_edge = |target: f64| -> Result<f64> {
        let omega_res = config.scatterers.omega;
        let end = config.waveguide.omega_c + target * two_j;
        let r_at = |w: f64| {
            let c = ((w - config.waveguide.omega_c) / two_j).clamp(-1.0, 1.0);
            reflection_amplitude(c.acos(), config).norm_sqr() - 0.5
        };
        let step = (end - omega_res) / FWHM_SAMPLES as f64;
        let mut prev = (omega_res, r_at(omega_res));
        for i in 1..=FWHM_SAMPLES {
            let w = omega_res + i as f64 * step;
            let v = r_at(w);
            if v <= 0.0 {
                let frac = prev.1 / (prev.1 - v);
                return Ok(prev.0 + frac * (w - prev.0));
            }
            prev = (w, v);
        }
        Err(Error::Domain("reflectance never drops to one half inside the band".into()))
    };
    let measured = (omega_edge(1.0)? - omega_edge(-1.0)?) / two_j;
    Ok(ResonanceWidth { k_res, k0: (lo, hi), formula_2j: formula, measured_fwhm_2j: measured })
}

/// First root of `h` walking from `from` (where `h < 0`) toward `to`,
/// refined by bisection.
fn half_max_crossing(h: &impl Fn(f64) -> f64, from: f64, to: f64) -> Result<f64> {
    let steps = 100_000;
    let dk = (to - from) / steps as f64;
    let mut prev = from;
    for i in 1..steps {
        let k = from + i as f64 * dk;
        if h(k) > 0.0 {
            let (mut a, mut b) = (prev, k);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if h(m) > 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        prev = k;
    }
    Err(Error::Domain("no half-maximum point of the reflection line inside the band".into()))
}
