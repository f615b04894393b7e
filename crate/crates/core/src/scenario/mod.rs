//! Scenario documents, figure presets, sweeps and reproducible output.

pub mod curve;
pub mod fit;
pub mod presets;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub use curve::{parse_curve_csv, parse_curve_str, Curve, Solver};
pub use fit::{detect_change, fit_exponential, fit_rates, ExpFit, RateFit};
pub use presets::{preset, preset_json, PRESET_NAMES};

use crate::closed_forms::{self, normal_rate, predicted_parity, Parity, ValidityFlags};
use crate::error::{Error, Result};
use crate::model::{kinematic_t0_2j, ConfigDoc, InitialState, SystemConfig};
use crate::oracle::{evolve, long_time_population, EvolveOptions, LongTimePopulation, Trajectory};
use crate::resolvent::{BoundState, RegimeFlag, ResolventContext};
use crate::scattering::{k_grid, resonance_width, spectrum, write_spectrum_csv, ResonanceWidth, SpectrumPoint};

/// Keys accepted in a scenario document besides the system keys.
const SCENARIO_KEYS: [&str; 11] = [
    "name",
    "t_max",
    "dt_out",
    "sweep",
    "solvers",
    "mode",
    "k_points",
    "observable",
    "long_time",
    "note",
    "field_stride",
];
const CONFIG_KEYS: [&str; 11] = [
    "J2",
    "omega_c",
    "VA_over_2J",
    "VB_over_2J",
    "DeltaA_over_2J",
    "DeltaB_over_2J",
    "MA",
    "MB",
    "dx",
    "n_sites",
    "initial",
];

const MAX_T: f64 = 1e5;
const MAX_SAMPLES: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Dynamics,
    Spectrum,
}

/// What a dynamics curve reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `|C_{j1}^A(t)|^2` of the first initially excited emitter.
    #[default]
    Pe,
    /// `sum_j |C_j^A(t)|^2`.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "DeltaA_over_2J")]
    DeltaA,
    #[serde(rename = "DeltaB_over_2J")]
    DeltaB,
    #[serde(rename = "VA_over_2J")]
    Va,
    #[serde(rename = "VB_over_2J")]
    Vb,
    #[serde(rename = "MA")]
    Ma,
    #[serde(rename = "MB")]
    Mb,
    #[serde(rename = "dx")]
    Dx,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::DeltaA => "DeltaA_over_2J",
            SweepParam::DeltaB => "DeltaB_over_2J",
            SweepParam::Va => "VA_over_2J",
            SweepParam::Vb => "VB_over_2J",
            SweepParam::Ma => "MA",
            SweepParam::Mb => "MB",
            SweepParam::Dx => "dx",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, SweepParam::Ma | SweepParam::Mb | SweepParam::Dx)
    }

    /// `doc` with this parameter set to `value`.
    pub fn apply(self, doc: &ConfigDoc, value: f64) -> Result<ConfigDoc> {
        let mut d = doc.clone();
        let int = || -> Result<usize> {
            if value.fract() != 0.0 || !(0.0..=1e6).contains(&value) {
                return Err(Error::config(
                    format!("sweep.values[{}]", self.key()),
                    format!("{value} is not a valid count"),
                ));
            }
            Ok(value as usize)
        };
        match self {
            SweepParam::DeltaA => d.delta_a_over_2j = value,
            SweepParam::DeltaB => d.delta_b_over_2j = value,
            SweepParam::Va => d.va_over_2j = value,
            SweepParam::Vb => d.vb_over_2j = value,
            SweepParam::Ma => d.m_a = int()?,
            SweepParam::Mb => d.m_b = int()?,
            SweepParam::Dx => {
                d.dx = int()?;
                if doc.n_sites.is_some_and(|n| n < ConfigDoc::default_sites(d.dx)) {
                    d.n_sites = None;
                }
            }
        }
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioKeys {
    name: String,
    #[serde(default)]
    t_max: Option<f64>,
    #[serde(default)]
    dt_out: Option<f64>,
    #[serde(default)]
    sweep: Option<Sweep>,
    #[serde(default)]
    solvers: Option<Vec<Solver>>,
    #[serde(default)]
    mode: Mode,
    #[serde(default)]
    k_points: Option<usize>,
    #[serde(default)]
    observable: Observable,
    #[serde(default)]
    long_time: bool,
    #[serde(default)]
    note: Option<String>,
    #[serde(default)]
    field_stride: Option<usize>,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub base: ConfigDoc,
    /// Units of `1/(2J)`; zero in spectrum mode.
    pub t_max: f64,
    pub dt_out: f64,
    pub sweep: Option<Sweep>,
    /// Always contains [`Solver::Oracle`]; sorted, no duplicates.
    pub solvers: Vec<Solver>,
    pub mode: Mode,
    pub k_points: usize,
    pub observable: Observable,
    pub long_time: bool,
    pub note: Option<String>,
    pub field_stride: Option<usize>,
    /// Git-style SHA-256 of the source text.
    pub content_hash: String,
}

/// `sha256("blob <len>\0" + bytes)`, hex encoded.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

/// SHA-256 of the compact JSON form of a system document.
pub fn config_hash(doc: &ConfigDoc) -> String {
    let text = serde_json::to_string(doc).expect("config documents always serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let Value::Object(map) = value else {
            return Err(Error::config("<root>", "scenario must be a JSON object"));
        };
        let mut config = Map::new();
        let mut keys = Map::new();
        for (k, v) in map {
            if CONFIG_KEYS.contains(&k.as_str()) {
                config.insert(k, v);
            } else if SCENARIO_KEYS.contains(&k.as_str()) {
                keys.insert(k, v);
            } else {
                return Err(Error::config(k, "unknown key"));
            }
        }
        let base: ConfigDoc = serde_json::from_value(Value::Object(config))?;
        let keys: ScenarioKeys = serde_json::from_value(Value::Object(keys))?;
        let scenario = Self::validate(base, keys, content_hash(text.as_bytes()))?;
        Ok(scenario)
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse(format!("scenario is not UTF-8: {e}")))?;
        Self::from_json_str(text)
    }

    fn validate(base: ConfigDoc, k: ScenarioKeys, hash: String) -> Result<Self> {
        if k.name.is_empty() || !k.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::config("name", "must be non-empty and use only [A-Za-z0-9_-]"));
        }
        let (t_max, dt_out) = match k.mode {
            Mode::Dynamics => {
                let t_max = k.t_max.ok_or_else(|| Error::config("t_max", "required in dynamics mode"))?;
                let dt = k.dt_out.unwrap_or(0.1);
                if !(t_max.is_finite() && t_max > 0.0 && t_max <= MAX_T) {
                    return Err(Error::config("t_max", format!("must lie in (0, {MAX_T}]")));
                }
                if !(dt.is_finite() && dt > 0.0) || t_max / dt > MAX_SAMPLES {
                    return Err(Error::config("dt_out", "must be positive with at most 1e6 samples"));
                }
                (t_max, dt)
            }
            Mode::Spectrum => (0.0, 0.0),
        };
        let k_points = k.k_points.unwrap_or(1001);
        if k.mode == Mode::Spectrum && !(2..=1_000_000).contains(&k_points) {
            return Err(Error::config("k_points", "must lie in [2, 1e6]"));
        }
        let mut solvers = k.solvers.unwrap_or_default();
        if solvers.is_empty() && k.mode == Mode::Dynamics {
            solvers.push(Solver::Oracle);
        }
        solvers.push(Solver::Oracle);
        solvers.sort();
        solvers.dedup();
        if k.field_stride == Some(0) {
            return Err(Error::config("field_stride", "must be >= 1"));
        }
        let sweep = match k.sweep {
            Some(s) if s.values.is_empty() => None,
            Some(s) => {
                if s.values.len() > 1000 {
                    return Err(Error::config("sweep.values", "at most 1000 values"));
                }
                for &v in &s.values {
                    if !v.is_finite() || (s.param.is_integer() && (v.fract() != 0.0 || v < 0.0)) {
                        return Err(Error::config("sweep.values", format!("{v} is not valid for {}", s.param.key())));
                    }
                }
                Some(s)
            }
            None => None,
        };
        let scenario = Self {
            name: k.name,
            base,
            t_max,
            dt_out,
            sweep,
            solvers,
            mode: k.mode,
            k_points,
            observable: k.observable,
            long_time: k.long_time,
            note: k.note,
            field_stride: k.field_stride,
            content_hash: hash,
        };
        for doc in scenario.point_docs()? {
            doc.build()?;
        }
        Ok(scenario)
    }

    /// System document at every sweep point, in sweep order.
    pub fn point_docs(&self) -> Result<Vec<ConfigDoc>> {
        match &self.sweep {
            None => Ok(vec![self.base.clone()]),
            Some(s) => s.values.iter().map(|&v| s.param.apply(&self.base, v)).collect(),
        }
    }

    pub fn wants(&self, solver: Solver) -> bool {
        self.solvers.contains(&solver)
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
    Scenario::from_json_bytes(&bytes)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolventSummary {
    pub bound_states: Vec<BoundState>,
    pub flags: Vec<RegimeFlag>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormSummary {
    pub formula: &'static str,
    /// Rate of the predicted observable, units of `2J`.
    pub rate: f64,
    pub validity: Option<ValidityFlags>,
    /// First time at which the curve is emitted.
    pub valid_from: f64,
}

/// Everything computed at one sweep point.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub index: usize,
    pub coordinate: Option<f64>,
    pub doc: ConfigDoc,
    pub config: SystemConfig,
    pub config_hash: String,
    /// Kinematic round trip `2 dx`, when there are scatterers.
    pub t0: Option<f64>,
    pub gamma1: f64,
    pub curves: Vec<Curve>,
    pub fit: Option<std::result::Result<RateFit, String>>,
    pub decay_fit: Option<std::result::Result<ExpFit, String>>,
    pub predicted_parity: Option<Parity>,
    pub closed_form: Option<std::result::Result<ClosedFormSummary, String>>,
    pub resolvent: Option<ResolventSummary>,
    pub long_time: Option<LongTimePopulation>,
    pub long_time_baseline: Option<LongTimePopulation>,
    pub max_norm_error: f64,
    pub n_sites: usize,
    pub trajectory: Option<Trajectory>,
}

impl PointResult {
    pub fn curve(&self, solver: Solver) -> Option<&Curve> {
        self.curves.iter().find(|c| c.solver == solver)
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub points: Vec<SpectrumPoint>,
    pub width: std::result::Result<ResonanceWidth, String>,
}

#[derive(Debug, Clone)]
pub struct RunBundle {
    pub scenario: Scenario,
    pub points: Vec<PointResult>,
    pub spectrum: Option<SpectrumResult>,
}

/// Runs every sweep point (in parallel) and collects results in sweep order.
pub fn run(scenario: &Scenario) -> Result<RunBundle> {
    let docs = scenario.point_docs()?;
    let coords: Vec<Option<f64>> = match &scenario.sweep {
        None => vec![None],
        Some(s) => s.values.iter().map(|v| Some(*v)).collect(),
    };
    if scenario.mode == Mode::Spectrum {
        let (config, _) = docs[0].build()?;
        let points = spectrum(&config, &k_grid(scenario.k_points))?;
        let width = resonance_width(&config).map_err(|e| e.to_string());
        return Ok(RunBundle {
            scenario: scenario.clone(),
            points: Vec::new(),
            spectrum: Some(SpectrumResult { points, width }),
        });
    }
    let points = docs
        .into_par_iter()
        .zip(coords)
        .enumerate()
        .map(|(i, (doc, coord))| {
            run_point(scenario, i, doc, coord).map_err(|e| match (coord, &scenario.sweep) {
                (Some(v), Some(s)) => e.context(format!("sweep point {} = {v}", s.param.key())),
                _ => e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunBundle { scenario: scenario.clone(), points, spectrum: None })
}

fn observe(obs: Observable, primary: usize, amps: &[C64]) -> f64 {
    match obs {
        Observable::Pe => amps[primary].norm_sqr(),
        Observable::Total => amps.iter().map(|c| c.norm_sqr()).sum(),
    }
}

fn run_point(sc: &Scenario, index: usize, doc: ConfigDoc, coordinate: Option<f64>) -> Result<PointResult> {
    let (config, init) = doc.build()?;
    let primary = init.amplitudes().first().map(|(j, _)| *j).unwrap_or(0);
    let opts = EvolveOptions { dt_out: sc.dt_out, field_stride: sc.field_stride, ..EvolveOptions::default() };
    let traj = evolve(&config, &init, sc.t_max, &opts)?;
    let times = traj.time_grid.clone();
    let oracle_values: Vec<f64> = traj.amp_a.iter().map(|a| observe(sc.observable, primary, a)).collect();
    let mut curves = vec![Curve::new(Solver::Oracle, times.clone(), oracle_values.clone())];

    let mut resolvent = None;
    if sc.wants(Solver::Resolvent) {
        let ctx = ResolventContext::new(&config, &init)?;
        let amps = ctx.amplitudes(&times)?;
        let values = amps.iter().map(|a| observe(sc.observable, primary, a)).collect();
        curves.push(Curve::new(Solver::Resolvent, times.clone(), values));
        resolvent = Some(ResolventSummary { bound_states: ctx.bound_states().to_vec(), flags: ctx.flags().to_vec() });
    }

    let t0 = config.has_scatterers().then(|| kinematic_t0_2j(config.dx()));
    let closed_form = if sc.wants(Solver::ClosedForm) {
        let r = closed_form_curve(&config, &init, sc.observable, primary, &times);
        Some(r.map(|(summary, curve)| {
            curves.push(curve);
            summary
        }))
    } else {
        None
    };

    let (fit, decay_fit) = match t0 {
        Some(t0) => (Some(fit_rates(&times, &oracle_values, t0).map_err(|e| e.to_string())), None),
        None => (
            None,
            Some(fit_exponential(&times, &oracle_values, (0.1 * sc.t_max, 0.9 * sc.t_max)).map_err(|e| e.to_string())),
        ),
    };

    let (long_time, long_time_baseline) = if sc.long_time {
        let lt = long_time_population(&config, &init)?;
        let mut bare = config;
        bare.scatterers.count = 0;
        (Some(lt), Some(long_time_population(&bare, &init)?))
    } else {
        (None, None)
    };

    Ok(PointResult {
        index,
        coordinate,
        config_hash: config_hash(&doc),
        doc,
        config,
        t0,
        gamma1: normal_rate(&config),
        curves,
        fit,
        decay_fit,
        predicted_parity: t0.map(|_| predicted_parity(config.dx())),
        closed_form: closed_form.map(|r| r.map_err(|e| e.to_string())),
        resolvent,
        long_time,
        long_time_baseline,
        max_norm_error: traj.max_norm_error(),
        n_sites: traj.config.waveguide.n_sites,
        trajectory: sc.field_stride.is_some().then_some(traj),
    })
}

/// Closed-form prediction of the observable.
///
/// Without scatterers this is the Markovian collective decay: the component
/// along the symmetric state decays at the Dicke rate, the rest is dark.
/// With scatterers it is the enhanced single-emitter law (one emitter) or the
/// hyperradiant pair law (two emitters, symmetric pair), emitted from `t0`.
fn closed_form_curve(
    config: &SystemConfig,
    init: &InitialState,
    obs: Observable,
    primary: usize,
    times: &[f64],
) -> Result<(ClosedFormSummary, Curve)> {
    let m_a = config.emitters.count;
    if !config.has_scatterers() {
        let rate = closed_forms::dicke_rate(m_a, config.va_2j());
        let mean: C64 = init.amplitudes().iter().map(|(_, c)| c).sum::<C64>() / m_a as f64;
        let values = times
            .iter()
            .map(|&t| {
                let bright = mean * (-rate * t / 2.0).exp();
                let amps: Vec<C64> = (0..m_a).map(|j| init.amplitude_of(j) - mean + bright).collect();
                observe(obs, primary, &amps)
            })
            .collect();
        let summary = ClosedFormSummary { formula: "dicke", rate, validity: None, valid_from: 0.0 };
        return Ok((summary, Curve::new(Solver::ClosedForm, times.to_vec(), values)));
    }
    let t0 = kinematic_t0_2j(config.dx());
    let start = times.iter().position(|&t| t >= t0 - 1e-9).unwrap_or(times.len());
    let ts = times[start..].to_vec();
    let sym_pair = init.excited_count() == 2 && {
        let a = init.amplitudes();
        (a[0].1 - a[1].1).norm() < 1e-12
    };
    let (formula, pred, weight) = if m_a == 1 && init.excited_count() == 1 {
        ("enhanced_single", closed_forms::enhanced_single_prediction(config)?, 1.0)
    } else if m_a == 2 && sym_pair {
        let p = closed_forms::hyperradiance_prediction(config)?;
        let weight = if obs == Observable::Total { 2.0 } else { 1.0 };
        // The law is for the amplitude; square it for populations.
        let pop = closed_forms::RatePrediction {
            rate: 2.0 * p.rate,
            prefactor: p.prefactor * p.prefactor,
            validity: p.validity,
        };
        ("hyperradiance", pop, weight)
    } else {
        return Err(Error::Unsupported(
            "no closed form for this ensemble and initial state with scatterers present".into(),
        ));
    };
    let values = ts.iter().map(|&t| weight * pred.at(t)).collect();
    let summary = ClosedFormSummary { formula, rate: pred.rate, validity: Some(pred.validity), valid_from: t0 };
    Ok((summary, Curve::new(Solver::ClosedForm, ts, values)))
}

/// One row of a parity sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ParityRow {
    pub dx: usize,
    pub t0: f64,
    /// `rate_after / Gamma_1`.
    pub ratio: f64,
    pub predicted: Parity,
    pub fit: RateFit,
}

/// Enhancement ratio `rate_after / Gamma_1` for each separation, with the
/// same couplings and a single excited emitter.
pub fn parity_sweep(base: &SystemConfig, dx_list: &[usize]) -> Result<Vec<ParityRow>> {
    if base.delta_b() != 0.0 {
        return Err(Error::Domain("parity sweeps assume resonant scatterers (Delta_B = 0)".into()));
    }
    let gamma1 = normal_rate(base);
    dx_list
        .par_iter()
        .map(|&dx| {
            let n = 2 * dx + 40;
            let wg = crate::model::WaveguideParams::new(base.waveguide.omega_c, base.j(), n)?;
            let c = SystemConfig::centered(
                wg,
                dx,
                (base.emitters.count, base.emitters.omega, base.emitters.coupling),
                (base.scatterers.count, base.scatterers.omega, base.scatterers.coupling),
            )?;
            let t0 = kinematic_t0_2j(dx);
            let opts = EvolveOptions { field_stride: None, ..EvolveOptions::default() };
            let traj = evolve(&c, &InitialState::single(0), 3.0 * t0 + 2.0, &opts)?;
            let pe = traj.excited_population(0)?;
            let fit = fit_rates(&traj.time_grid, &pe, t0).map_err(|e| e.context(format!("dx = {dx}")))?;
            Ok(ParityRow { dx, t0, ratio: fit.after.rate / gamma1, predicted: predicted_parity(dx), fit })
        })
        .collect()
}

#[derive(Serialize)]
struct ManifestPoint<'a> {
    index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    coordinate: Option<f64>,
    parameters: &'a ConfigDoc,
    config_hash: &'a str,
    n_sites: usize,
    max_norm_error: f64,
    gamma1_2j: f64,
    t0_2j: Option<f64>,
    predicted_parity: Option<Parity>,
    curves: Vec<BTreeMap<&'static str, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate_fit: Option<&'a RateFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decay_fit: Option<&'a ExpFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit_error: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<&'a ClosedFormSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_error: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolvent: Option<&'a ResolventSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    long_time_population: Option<&'a LongTimePopulation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    long_time_population_without_scatterers: Option<&'a LongTimePopulation>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    scenario: &'a str,
    scenario_hash: &'a str,
    mode: Mode,
    observable: Observable,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<&'a Sweep>,
    solvers: &'a [Solver],
    units: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    points: Vec<ManifestPoint<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<BTreeMap<&'static str, Value>>,
}

impl RunBundle {
    fn curve_file(&self, p: &PointResult, c: &Curve) -> String {
        format!("{}_{:03}_{}.csv", self.scenario.name, p.index, c.solver)
    }

    /// Output files as `(file name, contents)`, in a fixed order.
    pub fn files(&self) -> Result<Vec<(String, Vec<u8>)>> {
        let mut files = Vec::new();
        let mut mpoints = Vec::new();
        for p in &self.points {
            let mut curves = Vec::new();
            for c in &p.curves {
                let name = self.curve_file(p, c);
                files.push((name.clone(), c.to_csv_string().into_bytes()));
                let mut meta = BTreeMap::new();
                meta.insert("file", name);
                meta.insert("solver", c.solver.to_string());
                meta.insert("config_hash", p.config_hash.clone());
                meta.insert("scenario_hash", self.scenario.content_hash.clone());
                curves.push(meta);
            }
            if let Some(traj) = &p.trajectory {
                let mut buf = Vec::new();
                traj.write_field_csv(&mut buf)?;
                files.push((format!("{}_{:03}_field.csv", self.scenario.name, p.index), buf));
                let mut buf = Vec::new();
                traj.write_csv(&mut buf)?;
                files.push((format!("{}_{:03}_emitters.csv", self.scenario.name, p.index), buf));
            }
            let fit_error = match (&p.fit, &p.decay_fit) {
                (Some(Err(e)), _) | (_, Some(Err(e))) => Some(e.as_str()),
                _ => None,
            };
            mpoints.push(ManifestPoint {
                index: p.index,
                coordinate: p.coordinate,
                parameters: &p.doc,
                config_hash: &p.config_hash,
                n_sites: p.n_sites,
                max_norm_error: p.max_norm_error,
                gamma1_2j: p.gamma1,
                t0_2j: p.t0,
                predicted_parity: p.predicted_parity,
                curves,
                rate_fit: p.fit.as_ref().and_then(|f| f.as_ref().ok()),
                decay_fit: p.decay_fit.as_ref().and_then(|f| f.as_ref().ok()),
                fit_error,
                closed_form: p.closed_form.as_ref().and_then(|c| c.as_ref().ok()),
                closed_form_error: p.closed_form.as_ref().and_then(|c| c.as_ref().err()).map(String::as_str),
                resolvent: p.resolvent.as_ref(),
                long_time_population: p.long_time.as_ref(),
                long_time_population_without_scatterers: p.long_time_baseline.as_ref(),
            });
        }
        let spectrum = match &self.spectrum {
            Some(s) => {
                let name = format!("{}_spectrum.csv", self.scenario.name);
                let mut buf = Vec::new();
                write_spectrum_csv(&s.points, &mut buf)?;
                files.push((name.clone(), buf));
                let mut m = BTreeMap::new();
                m.insert("file", Value::String(name));
                m.insert("k_points", Value::from(s.points.len()));
                m.insert("config_hash", Value::String(config_hash(&self.scenario.base)));
                m.insert("parameters", serde_json::to_value(&self.scenario.base)?);
                match &s.width {
                    Ok(w) => m.insert("resonance_width", serde_json::to_value(w)?),
                    Err(e) => m.insert("resonance_width_error", Value::String(e.clone())),
                };
                Some(m)
            }
            None => None,
        };
        let manifest = Manifest {
            scenario: &self.scenario.name,
            scenario_hash: &self.scenario.content_hash,
            mode: self.scenario.mode,
            observable: self.scenario.observable,
            note: self.scenario.note.as_deref(),
            sweep: self.scenario.sweep.as_ref(),
            solvers: &self.scenario.solvers,
            units: "energies and rates in units of 2J, times in units of 1/(2J)",
            points: mpoints,
            spectrum,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        files.push((format!("{}_manifest.json", self.scenario.name), text.into_bytes()));
        Ok(files)
    }

    /// Writes all output files into `dir` (created if missing).
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for (name, bytes) in self.files()? {
            let path = dir.join(&name);
            std::fs::write(&path, bytes).map_err(|e| Error::from(e).context(format!("writing {}", path.display())))?;
            out.push(path);
        }
        Ok(out)
    }

    /// One line per sweep point, for terminal output.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            let _ = write!(s, "[{}] ", p.index);
            if let (Some(v), Some(sw)) = (p.coordinate, &self.scenario.sweep) {
                let _ = write!(s, "{}={v} ", sw.param.key());
            }
            match &p.fit {
                Some(Ok(f)) => {
                    let _ = write!(
                        s,
                        "t0={} t_change={} rate_before/G1={:.3} rate_after/G1={:.3}",
                        f.t0,
                        f.t_change.map_or("none".to_string(), |t| format!("{t:.1}")),
                        f.before.rate / p.gamma1,
                        f.after.rate / p.gamma1
                    );
                }
                Some(Err(e)) => {
                    let _ = write!(s, "fit failed: {e}");
                }
                None => {}
            }
            if let Some(Ok(f)) = &p.decay_fit {
                let _ = write!(s, "rate={:.5} (2J units)", f.rate);
            }
            if let (Some(lt), Some(b)) = (&p.long_time, &p.long_time_baseline) {
                let (a, b) = match self.scenario.observable {
                    Observable::Pe => (lt.mean, b.mean),
                    Observable::Total => (lt.total_mean, b.total_mean),
                };
                let _ = write!(s, " long_time={a:.4e} without_scatterers={b:.4e}");
            }
            s.push('\n');
        }
        if let Some(sp) = &self.spectrum {
            let _ = writeln!(s, "{} spectrum points", sp.points.len());
            if let Ok(w) = &sp.width {
                let _ = writeln!(s, "width formula={:.6} measured={:.6} (2J units)", w.formula_2j, w.measured_fwhm_2j);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tiny() -> String {
        serde_json::json!({
            "name": "tiny",
            "J2": 1.0,
            "VA_over_2J": 0.08,
            "VB_over_2J": 1.8,
            "DeltaA_over_2J": 0.0,
            "DeltaB_over_2J": 0.0,
            "MA": 1,
            "MB": 2,
            "dx": 3,
            "t_max": 20.0,
            "solvers": ["resolvent", "closed_form"]
        })
        .to_string()
    }

    #[test]
    fn unknown_and_missing_keys_are_named() {
        let mut v: Value = serde_json::from_str(&tiny()).unwrap();
        v["bogus"] = Value::from(1);
        let e = Scenario::from_json_str(&v.to_string()).unwrap_err();
        assert!(e.to_string().contains("bogus"));
        let mut v: Value = serde_json::from_str(&tiny()).unwrap();
        v.as_object_mut().unwrap().remove("J2");
        let e = Scenario::from_json_str(&v.to_string()).unwrap_err();
        assert!(e.to_string().contains("J2"), "{e}");
        let mut v: Value = serde_json::from_str(&tiny()).unwrap();
        v.as_object_mut().unwrap().remove("t_max");
        assert!(Scenario::from_json_str(&v.to_string()).is_err());
    }

    #[test]
    fn oracle_always_selected() {
        let s = Scenario::from_json_str(&tiny()).unwrap();
        assert_eq!(s.solvers, vec![Solver::Oracle, Solver::Resolvent, Solver::ClosedForm]);
    }

    #[test]
    fn empty_sweep_runs_once() {
        let mut v: Value = serde_json::from_str(&tiny()).unwrap();
        v["sweep"] = serde_json::json!({"param": "dx", "values": []});
        let s = Scenario::from_json_str(&v.to_string()).unwrap();
        let b = run(&s).unwrap();
        assert_eq!(b.points.len(), 1);
        assert_eq!(b.points[0].curves.len(), 3);
        let files = b.files().unwrap();
        assert_eq!(files.len(), 4);
        assert!(files.iter().any(|(n, _)| n == "tiny_manifest.json"));
    }

    #[test]
    fn bad_sweep_values() {
        for values in [serde_json::json!([1.5]), serde_json::json!([-1])] {
            let mut v: Value = serde_json::from_str(&tiny()).unwrap();
            v["sweep"] = serde_json::json!({"param": "dx", "values": values});
            assert!(Scenario::from_json_str(&v.to_string()).is_err());
        }
        let mut v: Value = serde_json::from_str(&tiny()).unwrap();
        v["sweep"] = serde_json::json!({"param": "J2", "values": [1.0]});
        assert!(Scenario::from_json_str(&v.to_string()).is_err());
    }

    #[test]
    fn markovian_closed_form_without_scatterers() {
        let mut v: Value = serde_json::from_str(&tiny()).unwrap();
        v["MB"] = Value::from(0);
        v["MA"] = Value::from(2);
        v["initial"] = serde_json::json!({"type": "sym_pair"});
        let b = run(&Scenario::from_json_str(&v.to_string()).unwrap()).unwrap();
        let cf = b.points[0].curve(Solver::ClosedForm).unwrap();
        assert!((cf.values[0] - 0.5).abs() < 1e-15);
        assert!(b.points[0].decay_fit.as_ref().unwrap().is_ok());
    }

    #[test]
    fn hashes_are_stable() {
        assert_eq!(content_hash(b""), "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813");
        let s = Scenario::from_json_str(&tiny()).unwrap();
        assert_eq!(config_hash(&s.base), config_hash(&s.base.clone()));
        assert_eq!(config_hash(&s.base).len(), 64);
    }

    fn parity_base(vb: f64) -> SystemConfig {
        let doc: ConfigDoc = serde_json::from_value(serde_json::json!({
            "J2": 1.0, "VA_over_2J": 0.08, "VB_over_2J": vb, "DeltaA_over_2J": 0.0, "DeltaB_over_2J": 0.0,
            "MA": 1, "MB": if vb > 0.0 { 2 } else { 0 }, "dx": 1
        }))
        .unwrap();
        doc.build().unwrap().0
    }

    #[test]
    fn parity_of_enhancement() {
        let rows = parity_sweep(&parity_base(1.8), &[1, 2, 3, 4, 5, 6]).unwrap();
        for r in &rows {
            match r.predicted {
                Parity::Enhanced => assert!(r.ratio > 1.0, "dx = {}: {}", r.dx, r.ratio),
                Parity::Suppressed => assert!(r.ratio < 1.0, "dx = {}: {}", r.dx, r.ratio),
            }
        }
        assert!((rows[0].ratio / 2.0 - 1.0).abs() < 0.1);
    }

    #[test]
    fn parity_without_scatterers_is_flat() {
        for r in parity_sweep(&parity_base(0.0), &[3, 4, 7, 8]).unwrap() {
            let tol = 0.05 + r.fit.after.rate_half_width / normal_rate(&parity_base(0.0));
            assert!((r.ratio - 1.0).abs() < tol, "dx = {}: {}", r.dx, r.ratio);
        }
    }

    #[test]
    fn parity_sweep_needs_resonant_scatterers() {
        let mut c = parity_base(1.8);
        c.scatterers.omega += 0.1;
        assert!(parity_sweep(&c, &[1]).is_err());
    }

    proptest! {
        #[test]
        fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
            let _ = Scenario::from_json_bytes(&bytes);
        }

        #[test]
        fn arbitrary_json_objects_never_panic(
            keys in proptest::collection::vec(proptest::sample::select(
                CONFIG_KEYS.iter().chain(SCENARIO_KEYS.iter()).copied().collect::<Vec<_>>()), 0..12),
            nums in proptest::collection::vec(-1e7f64..1e7, 12),
        ) {
            let mut m = Map::new();
            for (k, n) in keys.iter().zip(&nums) {
                m.insert(k.to_string(), Value::from(*n));
            }
            let _ = Scenario::from_json_str(&Value::Object(m).to_string());
        }
    }
}
