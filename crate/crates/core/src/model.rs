//! Physical parameters, initial states and the single-excitation Hamiltonian.
//!
//! Energies are stored in absolute units with an arbitrary hopping `J > 0`.
//! Everything that faces a user (JSON documents, times, rates, CSV columns)
//! is expressed in units of `2J`, so that results can be compared directly
//! against plots whose axes are scaled that way.
//!
//! Sites are indexed from zero. All emitters (ensemble A) sit on one site
//! `x1` and all scatterers (ensemble B) on one site `x2`.

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the norm of an initial state.
pub const NORM_TOL: f64 = 1e-12;

/// Tight-binding photonic lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideParams {
    pub omega_c: f64,
    pub j: f64,
    pub n_sites: usize,
}

impl WaveguideParams {
    /// Lattice constant; positions are integer site indices.
    pub const LATTICE_CONSTANT: f64 = 1.0;

    pub fn new(omega_c: f64, j: f64, n_sites: usize) -> Result<Self> {
        if !(j.is_finite() && j > 0.0) {
            return Err(Error::config("J", format!("hopping must be positive, got {j}")));
        }
        if !omega_c.is_finite() {
            return Err(Error::config("omega_c", "must be finite"));
        }
        if n_sites < 3 {
            return Err(Error::config("n_sites", format!("need at least 3 sites, got {n_sites}")));
        }
        Ok(Self { omega_c, j, n_sites })
    }

    pub fn two_j(&self) -> f64 {
        2.0 * self.j
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnsembleKind {
    /// Quantum emitters, ensemble A.
    Emitter,
    /// Quantum scatterers, ensemble B.
    Scatterer,
}

/// A collection of identical two-level atoms coupled to one lattice site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub kind: EnsembleKind,
    pub position: usize,
    pub count: usize,
    pub omega: f64,
    pub coupling: f64,
}

impl Ensemble {
    pub fn emitters(position: usize, count: usize, omega: f64, coupling: f64) -> Self {
        Self { kind: EnsembleKind::Emitter, position, count, omega, coupling }
    }

    pub fn scatterers(position: usize, count: usize, omega: f64, coupling: f64) -> Self {
        Self { kind: EnsembleKind::Scatterer, position, count, omega, coupling }
    }

    /// `M V^2`, the collective coupling strength squared.
    pub fn collective_coupling_sq(&self) -> f64 {
        self.count as f64 * self.coupling * self.coupling
    }
}

/// Waveguide plus emitter and scatterer ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub waveguide: WaveguideParams,
    pub emitters: Ensemble,
    pub scatterers: Ensemble,
}

impl SystemConfig {
    pub fn new(waveguide: WaveguideParams, emitters: Ensemble, scatterers: Ensemble) -> Result<Self> {
        let n = waveguide.n_sites;
        if emitters.kind != EnsembleKind::Emitter {
            return Err(Error::config("emitters", "ensemble A must have kind Emitter"));
        }
        if scatterers.kind != EnsembleKind::Scatterer {
            return Err(Error::config("scatterers", "ensemble B must have kind Scatterer"));
        }
        if emitters.count == 0 {
            return Err(Error::config("MA", "at least one emitter is required"));
        }
        for (name, e) in [("A", &emitters), ("B", &scatterers)] {
            if !(e.coupling.is_finite() && e.coupling >= 0.0) {
                return Err(Error::config(format!("V{name}"), "coupling must be finite and >= 0"));
            }
            if !e.omega.is_finite() {
                return Err(Error::config(format!("Omega{name}"), "frequency must be finite"));
            }
        }
        if emitters.position >= n {
            return Err(Error::config(
                "x1",
                format!("emitter site {} outside lattice of {n} sites", emitters.position),
            ));
        }
        if scatterers.count > 0 {
            if scatterers.position >= n {
                return Err(Error::config(
                    "x2",
                    format!("scatterer site {} outside lattice of {n} sites", scatterers.position),
                ));
            }
            if scatterers.position == emitters.position {
                return Err(Error::config("dx", "emitters and scatterers must occupy different sites"));
            }
        }
        let config = Self { waveguide, emitters, scatterers };
        if let Some(msg) = config.coherence_warning() {
            log::warn!("{msg}");
        }
        Ok(config)
    }

    /// Builds a configuration with both ensembles placed near the lattice
    /// centre: emitters at `ceil(n/2) - ceil(dx/2)` (one-based), scatterers
    /// `dx` sites to the right.
    pub fn centered(
        waveguide: WaveguideParams,
        dx: usize,
        emitters: (usize, f64, f64),
        scatterers: (usize, f64, f64),
    ) -> Result<Self> {
        let (x1, x2) = centered_positions(waveguide.n_sites, dx)?;
        Self::new(
            waveguide,
            Ensemble::emitters(x1, emitters.0, emitters.1, emitters.2),
            Ensemble::scatterers(x2, scatterers.0, scatterers.1, scatterers.2),
        )
    }

    /// Same physical system on a lattice of `n_sites`, re-centred.
    pub fn resized(&self, n_sites: usize) -> Result<Self> {
        let wg = WaveguideParams::new(self.waveguide.omega_c, self.waveguide.j, n_sites)?;
        let (x1, x2) = centered_positions(n_sites, self.dx())?;
        let mut a = self.emitters;
        let mut b = self.scatterers;
        a.position = x1;
        b.position = x2;
        Self::new(wg, a, b)
    }

    /// Emitter-scatterer separation `|x2 - x1|`.
    pub fn dx(&self) -> usize {
        self.emitters.position.abs_diff(self.scatterers.position)
    }

    pub fn j(&self) -> f64 {
        self.waveguide.j
    }

    pub fn two_j(&self) -> f64 {
        self.waveguide.two_j()
    }

    /// `Omega_A - omega_c` (absolute units).
    pub fn delta_a(&self) -> f64 {
        self.emitters.omega - self.waveguide.omega_c
    }

    /// `Omega_B - omega_c` (absolute units).
    pub fn delta_b(&self) -> f64 {
        self.scatterers.omega - self.waveguide.omega_c
    }

    pub fn delta_a_2j(&self) -> f64 {
        self.delta_a() / self.two_j()
    }

    pub fn delta_b_2j(&self) -> f64 {
        self.delta_b() / self.two_j()
    }

    pub fn va_2j(&self) -> f64 {
        self.emitters.coupling / self.two_j()
    }

    pub fn vb_2j(&self) -> f64 {
        self.scatterers.coupling / self.two_j()
    }

    pub fn has_scatterers(&self) -> bool {
        self.scatterers.count > 0
    }

    /// Total dimension of the single-excitation space.
    pub fn dim(&self) -> usize {
        self.emitters.count + self.scatterers.count + self.waveguide.n_sites
    }

    /// Returns a message when `dx` is not below half the coherence length
    /// `v_g / Gamma` of the emitted photon.
    pub fn coherence_warning(&self) -> Option<String> {
        if !self.has_scatterers() || self.emitters.coupling == 0.0 {
            return None;
        }
        let j = self.j();
        let gamma = self.emitters.coupling.powi(2) / j;
        let half_length = 2.0 * j / gamma / 2.0;
        (self.dx() as f64 >= half_length).then(|| {
            format!(
                "dx = {} is not below half the coherence length ({half_length:.1} sites); \
                 self-interference predictions may not apply",
                self.dx()
            )
        })
    }
}

/// Zero-based `(x1, x2)` for the centred placement rule.
pub fn centered_positions(n_sites: usize, dx: usize) -> Result<(usize, usize)> {
    let half_n = n_sites.div_ceil(2);
    let half_dx = dx.div_ceil(2);
    if half_n < half_dx + 1 || half_n - half_dx - 1 + dx >= n_sites {
        return Err(Error::config("n_sites", format!("lattice of {n_sites} sites cannot hold separation dx = {dx}")));
    }
    let x1 = half_n - half_dx - 1;
    Ok((x1, x1 + dx))
}

/// Nonzero emitter amplitudes at `t = 0`; scatterers and field start empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    amplitudes: Vec<(usize, C64)>,
}

impl InitialState {
    pub fn new(mut amplitudes: Vec<(usize, C64)>) -> Result<Self> {
        amplitudes.retain(|(_, c)| *c != C64::new(0.0, 0.0));
        amplitudes.sort_by_key(|(j, _)| *j);
        if amplitudes.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::config("initial", "duplicate emitter index"));
        }
        let norm: f64 = amplitudes.iter().map(|(_, c)| c.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::config("initial", format!("state is not normalized: sum |C|^2 = {norm}")));
        }
        Ok(Self { amplitudes })
    }

    pub fn single(j: usize) -> Self {
        Self { amplitudes: vec![(j, C64::new(1.0, 0.0))] }
    }

    /// `(|j1> + |j2>)/sqrt(2)`.
    pub fn symmetric_pair(j1: usize, j2: usize) -> Result<Self> {
        let c = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(vec![(j1, c), (j2, c)])
    }

    /// `(|j1> - |j2>)/sqrt(2)`, the dark state.
    pub fn antisymmetric_pair(j1: usize, j2: usize) -> Result<Self> {
        let c = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(vec![(j1, c), (j2, -c)])
    }

    /// Every emitter excited with amplitude `1/sqrt(M_A)`.
    pub fn uniform(m_a: usize) -> Result<Self> {
        if m_a == 0 {
            return Err(Error::config("MA", "uniform state needs at least one emitter"));
        }
        let c = C64::new(1.0 / (m_a as f64).sqrt(), 0.0);
        Ok(Self { amplitudes: (0..m_a).map(|j| (j, c)).collect() })
    }

    pub fn amplitudes(&self) -> &[(usize, C64)] {
        &self.amplitudes
    }

    /// Initial amplitude of emitter `j` (zero when not excited).
    pub fn amplitude_of(&self, j: usize) -> C64 {
        self.amplitudes.iter().find(|(i, _)| *i == j).map(|(_, c)| *c).unwrap_or_default()
    }

    pub fn excited_count(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn check_against(&self, config: &SystemConfig) -> Result<()> {
        match self.amplitudes.iter().find(|(j, _)| *j >= config.emitters.count) {
            Some((j, _)) => Err(Error::config(
                "initial",
                format!("emitter index {j} out of range for M_A = {}", config.emitters.count),
            )),
            None => Ok(()),
        }
    }

    /// Full state vector in the Hamiltonian basis.
    pub fn to_vector(&self, config: &SystemConfig) -> Result<Vec<C64>> {
        self.check_against(config)?;
        let mut psi = vec![C64::new(0.0, 0.0); config.dim()];
        for &(j, c) in &self.amplitudes {
            psi[j] = c;
        }
        Ok(psi)
    }
}

/// Index layout of the single-excitation basis:
/// `[emitters 0..M_A, scatterers 0..M_B, sites 0..n_sites]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLayout {
    pub n_emitters: usize,
    pub n_scatterers: usize,
    pub n_sites: usize,
}

impl BasisLayout {
    pub fn of(config: &SystemConfig) -> Self {
        Self {
            n_emitters: config.emitters.count,
            n_scatterers: config.scatterers.count,
            n_sites: config.waveguide.n_sites,
        }
    }

    pub fn dim(&self) -> usize {
        self.n_emitters + self.n_scatterers + self.n_sites
    }

    pub fn emitter(&self, j: usize) -> usize {
        j
    }

    pub fn scatterer(&self, j: usize) -> usize {
        self.n_emitters + j
    }

    pub fn site(&self, x: usize) -> usize {
        self.n_emitters + self.n_scatterers + x
    }

    pub fn field_offset(&self) -> usize {
        self.n_emitters + self.n_scatterers
    }
}

/// Real symmetric (hence Hermitian) single-excitation Hamiltonian.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub layout: BasisLayout,
    matrix: Mat<f64>,
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    /// Exact (bitwise) symmetry check.
    pub fn is_hermitian(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.matrix[(i, j)].to_bits() == self.matrix[(j, i)].to_bits()))
    }

    /// Nonzero entries as `(row, col, value)`, row-major.
    pub fn nonzeros(&self) -> Vec<Entry> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = self.matrix[(i, j)];
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// `(row, column, value)` of one Hamiltonian matrix element.
pub type Entry = (usize, usize, f64);

/// Nonzero Hamiltonian entries, row-major and sorted: open-boundary hopping
/// `J` between neighbouring sites, `V_A` from every emitter to `x1`, `V_B`
/// from every scatterer to `x2`, and `Omega_A`, `Omega_B`, `omega_c` on the
/// diagonal.
pub fn hamiltonian_entries(config: &SystemConfig) -> Result<(BasisLayout, Vec<Entry>)> {
    let layout = BasisLayout::of(config);
    let n = config.waveguide.n_sites;
    if config.emitters.position >= n {
        return Err(Error::config("x1", "emitter position outside the lattice"));
    }
    if config.scatterers.count > 0 && config.scatterers.position >= n {
        return Err(Error::config("x2", "scatterer position outside the lattice"));
    }
    let mut out = Vec::with_capacity(3 * layout.dim() + 2 * (config.emitters.count + config.scatterers.count));
    let mut set = |i: usize, j: usize, v: f64| {
        out.push((i, j, v));
        if i != j {
            out.push((j, i, v));
        }
    };
    let j_hop = config.waveguide.j;
    for x in 0..n {
        set(layout.site(x), layout.site(x), config.waveguide.omega_c);
        if x + 1 < n {
            set(layout.site(x), layout.site(x + 1), j_hop);
        }
    }
    let x1 = layout.site(config.emitters.position);
    for a in 0..config.emitters.count {
        set(layout.emitter(a), layout.emitter(a), config.emitters.omega);
        set(layout.emitter(a), x1, config.emitters.coupling);
    }
    if config.scatterers.count > 0 {
        let x2 = layout.site(config.scatterers.position);
        for b in 0..config.scatterers.count {
            set(layout.scatterer(b), layout.scatterer(b), config.scatterers.omega);
            set(layout.scatterer(b), x2, config.scatterers.coupling);
        }
    }
    out.retain(|&(_, _, v)| v != 0.0);
    out.sort_by_key(|&(i, j, _)| (i, j));
    Ok((layout, out))
}

/// Dense Hamiltonian assembled from [`hamiltonian_entries`].
pub fn build_hamiltonian(config: &SystemConfig) -> Result<Hamiltonian> {
    let (layout, entries) = hamiltonian_entries(config)?;
    let dim = layout.dim();
    let mut matrix = Mat::<f64>::zeros(dim, dim);
    for (i, j, v) in entries {
        matrix[(i, j)] = v;
    }
    Ok(Hamiltonian { layout, matrix })
}

/// Band energy `omega_c + 2J cos k`.
pub fn dispersion(k: f64, params: &WaveguideParams) -> f64 {
    params.omega_c + 2.0 * params.j * k.cos()
}

/// `d omega / dk = -2J sin k`; its magnitude peaks at `2J` for `k = ±pi/2`.
pub fn group_velocity(k: f64, params: &WaveguideParams) -> f64 {
    -2.0 * params.j * k.sin()
}

/// Arrival time of the photon reflected by the scatterers, `2 dx / (2J)`,
/// returned in units of `1/(2J)`.
pub fn round_trip_time(config: &SystemConfig) -> Result<f64> {
    if !config.has_scatterers() {
        return Err(Error::Domain("round-trip time is undefined without scatterers".into()));
    }
    Ok(kinematic_t0_2j(config.dx()))
}

/// `2 dx`: the round trip at peak group velocity, in units of `1/(2J)`.
pub fn kinematic_t0_2j(dx: usize) -> f64 {
    2.0 * dx as f64
}

/// Initial-state selector used in JSON documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDoc {
    /// One emitter excited; `j` is one-based (default 1).
    Single {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        j: Option<usize>,
    },
    SymPair {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        j: Option<[usize; 2]>,
    },
    AntisymPair {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        j: Option<[usize; 2]>,
    },
    Uniform,
}

impl Default for InitialDoc {
    fn default() -> Self {
        InitialDoc::Single { j: None }
    }
}

impl InitialDoc {
    pub fn build(&self, m_a: usize) -> Result<InitialState> {
        let zero_based =
            |j: usize| j.checked_sub(1).ok_or_else(|| Error::config("initial.j", "emitter indices are one-based"));
        let state = match self {
            InitialDoc::Single { j } => InitialState::single(zero_based(j.unwrap_or(1))?),
            InitialDoc::SymPair { j } => {
                let [a, b] = j.unwrap_or([1, 2]);
                InitialState::symmetric_pair(zero_based(a)?, zero_based(b)?)?
            }
            InitialDoc::AntisymPair { j } => {
                let [a, b] = j.unwrap_or([1, 2]);
                InitialState::antisymmetric_pair(zero_based(a)?, zero_based(b)?)?
            }
            InitialDoc::Uniform => InitialState::uniform(m_a)?,
        };
        if let Some((j, _)) = state.amplitudes().iter().find(|(j, _)| *j >= m_a) {
            return Err(Error::config("initial", format!("emitter index {} exceeds MA = {m_a}", j + 1)));
        }
        Ok(state)
    }
}

/// JSON form of a system: all energies in units of `2J`, `J2` the absolute
/// value of `2J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDoc {
    #[serde(rename = "J2")]
    pub j2: f64,
    #[serde(default)]
    pub omega_c: f64,
    #[serde(rename = "VA_over_2J")]
    pub va_over_2j: f64,
    #[serde(rename = "VB_over_2J")]
    pub vb_over_2j: f64,
    #[serde(rename = "DeltaA_over_2J")]
    pub delta_a_over_2j: f64,
    #[serde(rename = "DeltaB_over_2J")]
    pub delta_b_over_2j: f64,
    #[serde(rename = "MA")]
    pub m_a: usize,
    #[serde(rename = "MB")]
    pub m_b: usize,
    pub dx: usize,
    #[serde(default)]
    pub n_sites: Option<usize>,
    #[serde(default)]
    pub initial: InitialDoc,
}

impl ConfigDoc {
    /// Lattice size used when `n_sites` is absent.
    pub fn default_sites(dx: usize) -> usize {
        2 * dx + 40
    }

    pub fn build(&self) -> Result<(SystemConfig, InitialState)> {
        if !(self.j2.is_finite() && self.j2 > 0.0) {
            return Err(Error::config("J2", "must be positive"));
        }
        let finite = [
            ("omega_c", self.omega_c),
            ("VA_over_2J", self.va_over_2j),
            ("VB_over_2J", self.vb_over_2j),
            ("DeltaA_over_2J", self.delta_a_over_2j),
            ("DeltaB_over_2J", self.delta_b_over_2j),
        ];
        if let Some((k, _)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::config(*k, "must be finite"));
        }
        if self.dx == 0 && self.m_b > 0 {
            return Err(Error::config("dx", "must be >= 1 when MB > 0"));
        }
        if self.dx > 1_000_000 {
            return Err(Error::config("dx", "separation too large"));
        }
        let n = self.n_sites.unwrap_or_else(|| Self::default_sites(self.dx));
        if n > 200_000 {
            return Err(Error::config("n_sites", "lattice too large"));
        }
        let s = self.j2;
        let omega_c = self.omega_c * s;
        let wg = WaveguideParams::new(omega_c, s / 2.0, n)?;
        let config = SystemConfig::centered(
            wg,
            self.dx,
            (self.m_a, omega_c + self.delta_a_over_2j * s, self.va_over_2j * s),
            (self.m_b, omega_c + self.delta_b_over_2j * s, self.vb_over_2j * s),
        )?;
        let init = self.initial.build(self.m_a)?;
        Ok((config, init))
    }
}
