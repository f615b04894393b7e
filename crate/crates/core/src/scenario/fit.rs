//! Exponential rate fits and onset detection on population curves.

use serde::Serialize;

use crate::error::{Error, Result};

/// Populations below this are not used in log fits.
pub const FIT_FLOOR: f64 = 1e-12;
/// Minimum number of samples in a fit window.
const MIN_POINTS: usize = 3;
/// Two-sided 95% normal quantile for the rate half-widths.
const Z95: f64 = 1.959_963_984_540_054;

/// Least-squares line through `ln P` over one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpFit {
    /// Decay rate `-d ln P / dt`, units of `2J`.
    pub rate: f64,
    /// 95% half-width of `rate`.
    pub rate_half_width: f64,
    /// `exp` of the intercept.
    pub prefactor: f64,
    /// Window actually used, after dropping samples below [`FIT_FLOOR`].
    pub window: (f64, f64),
    pub n_points: usize,
    /// RMS residual of `ln P`.
    pub residual_rms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    /// Kinematic round-trip time passed in as a hint.
    pub t0: f64,
    /// Detected onset of the rate change; `None` when the curve shows none.
    pub t_change: Option<f64>,
    pub before: ExpFit,
    pub after: ExpFit,
}

impl RateFit {
    pub fn change_detected(&self) -> bool {
        self.t_change.is_some()
    }
}

/// Fits `ln P = ln A - rate t` on samples with `t` in `[lo, hi]`. The window
/// is cut short at the first sample below [`FIT_FLOOR`].
pub fn fit_exponential(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<ExpFit> {
    if times.len() != values.len() {
        return Err(Error::Domain("times and values differ in length".into()));
    }
    let (lo, hi) = window;
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t < lo - 1e-12 || t > hi + 1e-12 {
            continue;
        }
        if !(v > FIT_FLOOR) || !v.is_finite() {
            break;
        }
        ts.push(t);
        ys.push(v.ln());
    }
    let n = ts.len();
    if n < MIN_POINTS {
        return Err(Error::Unfittable(format!("only {n} usable samples in window [{lo}, {hi}]")));
    }
    let nf = n as f64;
    let tm = ts.iter().sum::<f64>() / nf;
    let ym = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    if sxx == 0.0 {
        return Err(Error::Unfittable("fit window has zero width".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * tm;
    let ss: f64 = ts.iter().zip(&ys).map(|(t, y)| (y - intercept - slope * t).powi(2)).sum();
    let se = if n > 2 { (ss / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(ExpFit {
        rate: -slope,
        rate_half_width: Z95 * se,
        prefactor: intercept.exp(),
        window: (ts[0], ts[n - 1]),
        n_points: n,
        residual_rms: (ss / nf).sqrt(),
    })
}

/// Piecewise fit around the reflection onset: `[0.1 t0, 0.9 t0]` before and
/// `[1.2 t0, min(3 t0, end)]` after. The onset itself is the largest
/// curvature of the 5-point smoothed `ln P` within `[0.5 t0, 1.5 t0]`.
pub fn fit_rates(times: &[f64], values: &[f64], t0: f64) -> Result<RateFit> {
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(Error::Domain(format!("onset hint must be positive, got {t0}")));
    }
    let end = times.last().copied().unwrap_or(0.0);
    let before = fit_exponential(times, values, (0.1 * t0, 0.9 * t0))?;
    let after = fit_exponential(times, values, (1.2 * t0, (3.0 * t0).min(end)))?;
    Ok(RateFit { t0, t_change: detect_change(times, values, t0), before, after })
}

/// Largest `|Δ² ln P|` after 5-point smoothing, searched in `[0.5 t0, 1.5 t0]`.
///
/// The second difference is taken at a lag of `t0 / 4` rather than between
/// neighbouring samples: a slope change then shows as a peak of height
/// `lag * Δrate`, while band-edge oscillations of period near `2π` stay bounded.
/// The peak counts as a detection when it is at least `1e-8` and twice the
/// median over the search window.
pub fn detect_change(times: &[f64], values: &[f64], t0: f64) -> Option<f64> {
    let n = times.len().min(values.len());
    if n < 7 || !(t0 > 0.0) {
        return None;
    }
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt > 0.0) {
        return None;
    }
    let lag = ((0.25 * t0 / dt).round() as usize).max(1);
    let logs: Vec<f64> = values[..n].iter().map(|v| v.max(FIT_FLOOR).ln()).collect();
    let smooth: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(n - 1);
            logs[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    let curv: Vec<(f64, f64)> = (lag..n.saturating_sub(lag))
        .filter(|&i| times[i] >= 0.5 * t0 && times[i] <= 1.5 * t0)
        .map(|i| (times[i], (smooth[i + lag] - 2.0 * smooth[i] + smooth[i - lag]).abs()))
        .collect();
    if curv.is_empty() {
        return None;
    }
    let (t_best, peak) = curv.iter().copied().fold((f64::NAN, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
    let mut mags: Vec<f64> = curv.iter().map(|c| c.1).collect();
    mags.sort_by(f64::total_cmp);
    let median = mags[mags.len() / 2];
    (peak > 1e-8 && peak > 2.0 * median).then_some(t_best)
}
