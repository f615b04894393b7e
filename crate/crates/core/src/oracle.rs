//! Brute-force time evolution of the single-excitation amplitudes on a
//! finite open lattice.
//!
//! The reference propagator diagonalizes the (real symmetric) Hamiltonian
//! once and applies `psi(t) = sum_n exp(-i E_n t) <n|psi0> |n>`. A Chebyshev
//! expansion of `exp(-i H dt)` with sparse products is used for lattices too
//! large to diagonalize comfortably; both paths agree to `1e-8`.

use std::io::Write;

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{
    build_hamiltonian, hamiltonian_entries, BasisLayout, Entry, Hamiltonian, InitialState, SystemConfig,
};

/// Tolerance on norm conservation along a trajectory.
pub const NORM_TOL: f64 = 1e-10;

/// Dimension above which `PropagatorKind::Auto` switches to Chebyshev.
pub const AUTO_EIGEN_MAX_DIM: usize = 1000;

/// Cap on stored field samples (complex numbers) before thinning.
const MAX_FIELD_VALUES: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PropagatorKind {
    #[default]
    Auto,
    Eigen,
    Chebyshev,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Output spacing in units of `1/(2J)`.
    pub dt_out: f64,
    pub propagator: PropagatorKind,
    /// Store the lattice amplitudes every `k`-th output time; `None` skips them.
    pub field_stride: Option<usize>,
    /// Lattice size override; still enlarged when too small.
    pub n_sites: Option<usize>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dt_out: 0.1, propagator: PropagatorKind::Auto, field_stride: Some(1), n_sites: None }
    }
}

/// Smallest lattice for which the fastest wavefront (speed `2J`) started at
/// the emitters cannot reach an edge before `t_max_2j`.
pub fn required_sites(t_max_2j: f64, dx: usize) -> usize {
    2 * (t_max_2j.ceil() as usize) + 2 * dx + 20
}

/// Exact propagator from a full eigendecomposition.
#[derive(Debug, Clone)]
pub struct EigenPropagator {
    energies: Vec<f64>,
    vectors: Mat<f64>,
}

impl EigenPropagator {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        let evd = h.matrix().self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let energies = evd.S().column_vector().iter().copied().collect();
        Ok(Self { energies, vectors: evd.U().to_owned() })
    }

    /// Eigenvalues in ascending order (absolute units).
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    fn project(&self, psi0: &[C64]) -> (Mat<f64>, Mat<f64>) {
        let n = self.energies.len();
        let re = Mat::<f64>::from_fn(n, 1, |i, _| psi0[i].re);
        let im = Mat::<f64>::from_fn(n, 1, |i, _| psi0[i].im);
        (self.vectors.transpose() * &re, self.vectors.transpose() * &im)
    }

    /// `exp(-i H t) psi0` for physical time `t`.
    pub fn apply(&self, psi0: &[C64], t: f64) -> Vec<C64> {
        self.apply_many(psi0, &[t]).pop().unwrap_or_default()
    }

    /// Evolved states at each physical time in `times`.
    pub fn apply_many(&self, psi0: &[C64], times: &[f64]) -> Vec<Vec<C64>> {
        let (cr, ci) = self.project(psi0);
        let n = self.energies.len();
        let mut out = Vec::with_capacity(times.len());
        const BLOCK: usize = 64;
        for chunk in times.chunks(BLOCK) {
            let m = chunk.len();
            let mut pr = Mat::<f64>::zeros(n, m);
            let mut pi = Mat::<f64>::zeros(n, m);
            for (col, &t) in chunk.iter().enumerate() {
                for k in 0..n {
                    let (s, c) = (self.energies[k] * t).sin_cos();
                    let (a, b) = (cr[(k, 0)], ci[(k, 0)]);
                    // (a + ib)(c - is)
                    pr[(k, col)] = a * c + b * s;
                    pi[(k, col)] = b * c - a * s;
                }
            }
            let yr = &self.vectors * &pr;
            let yi = &self.vectors * &pi;
            for col in 0..m {
                out.push((0..n).map(|i| C64::new(yr[(i, col)], yi[(i, col)])).collect());
            }
        }
        out
    }
}

/// Chebyshev expansion of `exp(-i H t)` using sparse matrix-vector products.
#[derive(Debug, Clone)]
pub struct ChebyshevPropagator {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    center: f64,
    half_width: f64,
}

impl ChebyshevPropagator {
    pub fn new(h: &Hamiltonian) -> Self {
        Self::from_entries(h.dim(), &h.nonzeros())
    }

    /// Builds the sparse operator without a dense matrix.
    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        let (layout, entries) = hamiltonian_entries(config)?;
        Ok(Self::from_entries(layout.dim(), &entries))
    }

    /// `entries` must be row-major sorted `(row, col, value)` triplets.
    fn from_entries(n: usize, nz: &[Entry]) -> Self {
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut it = nz.iter().peekable();
        for i in 0..n {
            let mut diag = 0.0;
            let mut radius = 0.0;
            while let Some(&&(r, c, v)) = it.peek() {
                if r != i {
                    break;
                }
                if c == i {
                    diag = v;
                } else {
                    radius += v.abs();
                }
                cols.push(c);
                vals.push(v);
                it.next();
            }
            row_ptr[i + 1] = cols.len();
            lo = lo.min(diag - radius);
            hi = hi.max(diag + radius);
        }
        let half_width = ((hi - lo) / 2.0).max(1e-12) * 1.01;
        Self { row_ptr, cols, vals, center: (hi + lo) / 2.0, half_width }
    }

    /// `out = (H - center) / half_width * v`
    fn scaled_apply(&self, v: &[C64], out: &mut [C64]) {
        let inv = 1.0 / self.half_width;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = -self.center * v[i];
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[p] * v[self.cols[p]];
            }
            *o = acc * inv;
        }
    }

    fn coefficients(&self, t: f64) -> Vec<C64> {
        let x = self.half_width * t;
        let bessel = bessel_j_sequence(x.abs());
        let phase = C64::from_polar(1.0, -self.center * t);
        // exp(-i x cos th) = sum_k (2 - delta_k0) (-i)^k J_k(x) T_k(cos th)
        let mut minus_i_pow = C64::new(1.0, 0.0);
        let sign = if x < 0.0 { -1.0 } else { 1.0 };
        bessel
            .iter()
            .enumerate()
            .map(|(k, &jk)| {
                let weight = if k == 0 { 1.0 } else { 2.0 };
                let parity = if k % 2 == 1 { sign } else { 1.0 };
                let c = phase * minus_i_pow * (weight * jk * parity);
                minus_i_pow *= C64::new(0.0, -1.0);
                c
            })
            .collect()
    }

    /// `exp(-i H t) psi0` for physical time `t` (any sign).
    pub fn apply(&self, psi0: &[C64], t: f64) -> Vec<C64> {
        self.apply_with(&self.coefficients(t), psi0)
    }

    fn apply_with(&self, coeffs: &[C64], psi0: &[C64]) -> Vec<C64> {
        let n = psi0.len();
        let mut prev = psi0.to_vec();
        let mut out: Vec<C64> = psi0.iter().map(|v| v * coeffs[0]).collect();
        if coeffs.len() == 1 {
            return out;
        }
        let mut cur = vec![C64::default(); n];
        self.scaled_apply(&prev, &mut cur);
        for (o, c) in out.iter_mut().zip(&cur) {
            *o += c * coeffs[1];
        }
        let mut next = vec![C64::default(); n];
        for ck in &coeffs[2..] {
            self.scaled_apply(&cur, &mut next);
            for i in 0..n {
                next[i] = 2.0 * next[i] - prev[i];
                out[i] += next[i] * ck;
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
        out
    }
}

/// `J_0(x) .. J_K(x)` with `K` large enough that the tail is below `1e-17`,
/// by Miller's downward recurrence normalized with `J_0 + 2 sum J_2k = 1`.
pub(crate) fn bessel_j_sequence(x: f64) -> Vec<f64> {
    if x == 0.0 {
        return vec![1.0];
    }
    let k_max = (x + 10.0 * x.cbrt().max(1.0) + 25.0).ceil() as usize;
    let start = k_max + 30 + (x.sqrt() * 4.0) as usize;
    let mut vals = vec![0.0f64; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    let mut out: Vec<f64> = vals[..=k_max].iter().map(|v| v / norm).collect();
    while out.len() > 1 && out.last().is_some_and(|v| v.abs() < 1e-17) && out.len() as f64 > x + 2.0 {
        out.pop();
    }
    out
}

/// Lattice amplitudes kept along a trajectory.
#[derive(Debug, Clone)]
pub struct FieldSamples {
    pub stride: usize,
    /// Indices into the trajectory time grid.
    pub time_index: Vec<usize>,
    /// `amplitudes[s][x]` for sample `s`.
    pub amplitudes: Vec<Vec<C64>>,
}

/// Time series of every amplitude in the single-excitation sector.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Configuration actually simulated (after any lattice enlargement).
    pub config: SystemConfig,
    /// Output times in units of `1/(2J)`, strictly increasing from zero.
    pub time_grid: Vec<f64>,
    /// `amp_a[t][j]`
    pub amp_a: Vec<Vec<C64>>,
    /// `amp_b[t][j]`
    pub amp_b: Vec<Vec<C64>>,
    pub field: Option<FieldSamples>,
    /// Total probability at each output time.
    pub norm: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.time_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_grid.is_empty()
    }

    /// `P_e(t) = |C_j^A(t)|^2`.
    pub fn excited_population(&self, j: usize) -> Result<Vec<f64>> {
        excited_population(self, j)
    }

    /// `sum_j |C_j^A(t)|^2`.
    pub fn emitter_population(&self) -> Vec<f64> {
        self.amp_a.iter().map(|row| row.iter().map(|c| c.norm_sqr()).sum()).collect()
    }

    pub fn atomic_population(&self) -> Vec<f64> {
        self.amp_a.iter().zip(&self.amp_b).map(|(a, b)| a.iter().chain(b).map(|c| c.norm_sqr()).sum()).collect()
    }

    pub fn max_norm_error(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Writes `t_2J, Pe_1..Pe_MA, norm`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let m_a = self.config.emitters.count;
        let mut header = String::from("t_2J");
        for j in 1..=m_a {
            header.push_str(&format!(",Pe_{j}"));
        }
        header.push_str(",norm");
        writeln!(w, "{header}")?;
        for (k, t) in self.time_grid.iter().enumerate() {
            let mut line = crate::csvfmt::num(*t);
            for c in &self.amp_a[k] {
                line.push(',');
                line.push_str(&crate::csvfmt::num(c.norm_sqr()));
            }
            line.push(',');
            line.push_str(&crate::csvfmt::num(self.norm[k]));
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Writes `t_2J, x, density` for every stored field sample.
    pub fn write_field_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let field = self.field.as_ref().ok_or_else(|| Error::Domain("trajectory has no stored field".into()))?;
        writeln!(w, "t_2J,x,density")?;
        for (s, &ti) in field.time_index.iter().enumerate() {
            let t = crate::csvfmt::num(self.time_grid[ti]);
            for (x, c) in field.amplitudes[s].iter().enumerate() {
                writeln!(w, "{t},{x},{}", crate::csvfmt::num(c.norm_sqr()))?;
            }
        }
        Ok(())
    }
}

/// Uniform output grid `0, dt, 2dt, ...` not exceeding `t_max`.
pub(crate) fn time_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let steps = (t_max / dt + 1e-9).floor() as usize;
    (0..=steps).map(|k| k as f64 * dt).collect()
}

/// Integrates `i d/dt psi = H psi` from `init` up to `t_max_2j` (units of
/// `1/(2J)`), recording every `dt_out`.
pub fn evolve(config: &SystemConfig, init: &InitialState, t_max_2j: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    if !(t_max_2j.is_finite() && t_max_2j > 0.0) {
        return Err(Error::Domain(format!("t_max must be positive, got {t_max_2j}")));
    }
    if !(opts.dt_out.is_finite() && opts.dt_out > 0.0) {
        return Err(Error::Domain(format!("dt_out must be positive, got {}", opts.dt_out)));
    }
    init.check_against(config)?;
    let norm0: f64 = init.amplitudes().iter().map(|(_, c)| c.norm_sqr()).sum();
    if (norm0 - 1.0).abs() > crate::model::NORM_TOL {
        return Err(Error::Domain(format!("initial state is not normalized ({norm0})")));
    }

    let required = required_sites(t_max_2j, config.dx());
    let wanted = opts.n_sites.unwrap_or(config.waveguide.n_sites);
    let config = if wanted < required {
        log::info!("enlarging lattice from {wanted} to {required} sites to avoid edge reflections");
        config.resized(required)?
    } else if wanted != config.waveguide.n_sites {
        config.resized(wanted)?
    } else {
        *config
    };

    let layout = BasisLayout::of(&config);
    let psi0 = init.to_vector(&config)?;
    let grid = time_grid(t_max_2j, opts.dt_out);
    let two_j = config.two_j();

    let mut field_stride = opts.field_stride;
    if let Some(s) = field_stride.as_mut() {
        *s = (*s).max(1);
        let samples = grid.len().div_ceil(*s);
        if samples * layout.n_sites > MAX_FIELD_VALUES {
            let thinned = (grid.len() * layout.n_sites).div_ceil(MAX_FIELD_VALUES);
            log::warn!("thinning stored field to every {thinned} output times");
            *s = thinned;
        }
    }

    let kind = match opts.propagator {
        PropagatorKind::Auto if layout.dim() <= AUTO_EIGEN_MAX_DIM => PropagatorKind::Eigen,
        PropagatorKind::Auto => PropagatorKind::Chebyshev,
        k => k,
    };

    let mut traj = Trajectory {
        config,
        time_grid: grid.clone(),
        amp_a: Vec::with_capacity(grid.len()),
        amp_b: Vec::with_capacity(grid.len()),
        field: field_stride.map(|stride| FieldSamples { stride, time_index: Vec::new(), amplitudes: Vec::new() }),
        norm: Vec::with_capacity(grid.len()),
    };
    let mut record = |k: usize, psi: &[C64]| {
        let off = layout.field_offset();
        traj.amp_a.push(psi[..layout.n_emitters].to_vec());
        traj.amp_b.push(psi[layout.n_emitters..off].to_vec());
        traj.norm.push(psi.iter().map(|c| c.norm_sqr()).sum());
        if let Some(f) = traj.field.as_mut() {
            if k.is_multiple_of(f.stride) {
                f.time_index.push(k);
                f.amplitudes.push(psi[off..].to_vec());
            }
        }
    };

    match kind {
        PropagatorKind::Eigen => {
            let prop = EigenPropagator::new(&build_hamiltonian(&config)?)?;
            let times: Vec<f64> = grid.iter().map(|t| t / two_j).collect();
            for (k, chunk) in times.chunks(256).enumerate() {
                for (i, psi) in prop.apply_many(&psi0, chunk).iter().enumerate() {
                    record(k * 256 + i, psi);
                }
            }
        }
        _ => {
            let prop = ChebyshevPropagator::from_config(&config)?;
            let coeffs = prop.coefficients(opts.dt_out / two_j);
            let mut psi = psi0;
            record(0, &psi);
            for k in 1..grid.len() {
                psi = prop.apply_with(&coeffs, &psi);
                record(k, &psi);
            }
        }
    }
    Ok(traj)
}

/// `P_e(t) = |C_j^A(t)|^2` for emitter `j`.
pub fn excited_population(traj: &Trajectory, j: usize) -> Result<Vec<f64>> {
    let m_a = traj.config.emitters.count;
    if j >= m_a {
        return Err(Error::Domain(format!("emitter index {j} out of range (M_A = {m_a})")));
    }
    Ok(traj.amp_a.iter().map(|row| row[j].norm_sqr()).collect())
}

/// Photon density `|C_x(t)|^2` over lattice sites at a stored time `t_2j`.
pub fn field_profile(traj: &Trajectory, t_2j: f64) -> Result<Vec<(usize, f64)>> {
    let field = traj.field.as_ref().ok_or_else(|| Error::Domain("trajectory has no stored field".into()))?;
    let tol = 1e-9 * (1.0 + t_2j.abs());
    let s = field
        .time_index
        .iter()
        .position(|&k| (traj.time_grid[k] - t_2j).abs() <= tol)
        .ok_or_else(|| Error::Domain(format!("t = {t_2j} is not a stored field time")))?;
    Ok(field.amplitudes[s].iter().map(|c| c.norm_sqr()).enumerate().collect())
}

/// Late-time emitter population.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LongTimePopulation {
    /// Mean of `P_e` of the first initially excited emitter over the last 20%.
    pub mean: f64,
    /// Standard deviation over the same window (residual oscillation).
    pub std_dev: f64,
    /// Same statistics for the summed emitter population.
    pub total_mean: f64,
    pub total_std_dev: f64,
    #[serde(rename = "t_max_2J")]
    pub t_max_2j: f64,
}

/// Runs to `t_max >= 10 / Gamma_1` (with `Gamma_1 = V_A^2 / J`) and averages
/// the population over the final 20% of the run.
pub fn long_time_population(config: &SystemConfig, init: &InitialState) -> Result<LongTimePopulation> {
    let gamma1_2j = 2.0 * config.va_2j().powi(2);
    let t_max = if gamma1_2j > 0.0 { (10.0 / gamma1_2j).max(50.0) } else { 100.0 };
    long_time_population_until(config, init, t_max)
}

/// Like [`long_time_population`] with an explicit run length.
pub fn long_time_population_until(
    config: &SystemConfig,
    init: &InitialState,
    t_max_2j: f64,
) -> Result<LongTimePopulation> {
    let opts = EvolveOptions { dt_out: (t_max_2j / 2000.0).max(0.1), field_stride: None, ..EvolveOptions::default() };
    let traj = evolve(config, init, t_max_2j, &opts)?;
    let j = init.amplitudes().first().map(|(j, _)| *j).unwrap_or(0);
    let pe = traj.excited_population(j)?;
    let total = traj.emitter_population();
    let start = traj.len() - traj.len() / 5;
    let (mean, std_dev) = mean_std(&pe[start..]);
    let (total_mean, total_std_dev) = mean_std(&total[start..]);
    Ok(LongTimePopulation { mean, std_dev, total_mean, total_std_dev, t_max_2j })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len().max(1) as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WaveguideParams;

    fn config(n: usize, dx: usize, va: f64, vb: f64, m_a: usize, m_b: usize) -> SystemConfig {
        let wg = WaveguideParams::new(0.0, 0.5, n).unwrap();
        SystemConfig::centered(wg, dx, (m_a, 0.0, va), (m_b, 0.0, vb)).unwrap()
    }

    #[test]
    fn bessel_against_series() {
        // J_n(x) = sum_m (-1)^m / (m! (m+n)!) (x/2)^(2m+n)
        for &x in &[0.3, 1.0, 4.7, 12.0] {
            let seq = bessel_j_sequence(x);
            for (n, &got) in seq.iter().enumerate().take(6) {
                let mut sum = 0.0;
                let mut term = (x / 2.0f64).powi(n as i32) / (1..=n).map(|v| v as f64).product::<f64>();
                for m in 0..80 {
                    sum += term;
                    term *= -(x / 2.0).powi(2) / ((m + 1) as f64 * (m + 1 + n) as f64);
                }
                assert!((got - sum).abs() < 1e-12, "J_{n}({x}) = {got} vs {sum}");
            }
        }
    }

    #[test]
    fn chebyshev_matches_eigen() {
        let c = config(120, 5, 0.08, 0.9, 2, 2);
        let h = build_hamiltonian(&c).unwrap();
        let psi0 = InitialState::symmetric_pair(0, 1).unwrap().to_vector(&c).unwrap();
        let eig = EigenPropagator::new(&h).unwrap();
        let cheb = ChebyshevPropagator::new(&h);
        for &t in &[0.0, 0.7, 13.0, 41.5] {
            let a = eig.apply(&psi0, t);
            let b = cheb.apply(&psi0, t);
            let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-8, "t = {t}: {err}");
        }
    }

    #[test]
    fn time_reversal_returns_initial_state() {
        let c = config(150, 7, 0.08, 1.8, 1, 2);
        let h = build_hamiltonian(&c).unwrap();
        let psi0 = InitialState::single(0).to_vector(&c).unwrap();
        let eig = EigenPropagator::new(&h).unwrap();
        let back = eig.apply(&eig.apply(&psi0, 30.0), -30.0);
        let err = back.iter().zip(&psi0).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        let cheb = ChebyshevPropagator::new(&h);
        let back = cheb.apply(&cheb.apply(&psi0, 30.0), -30.0);
        let err = back.iter().zip(&psi0).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn decoupled_atoms_do_not_move() {
        let c = config(40, 3, 0.0, 0.0, 2, 1);
        let init = InitialState::symmetric_pair(0, 1).unwrap();
        let traj = evolve(&c, &init, 20.0, &EvolveOptions::default()).unwrap();
        for p in traj.excited_population(0).unwrap() {
            assert!((p - 0.5).abs() < 1e-12);
        }
        assert!(traj.max_norm_error() < NORM_TOL);
    }

    #[test]
    fn dark_state_is_stationary() {
        let c = config(40, 3, 0.08, 1.0, 2, 2);
        let init = InitialState::antisymmetric_pair(0, 1).unwrap();
        let traj = evolve(&c, &init, 60.0, &EvolveOptions::default()).unwrap();
        for p in traj.excited_population(0).unwrap() {
            assert!((p - 0.5).abs() < 1e-10, "{p}");
        }
    }

    #[test]
    fn lattice_is_enlarged() {
        let c = config(30, 3, 0.08, 0.0, 1, 0);
        let traj = evolve(&c, &InitialState::single(0), 50.0, &EvolveOptions::default()).unwrap();
        assert_eq!(traj.config.waveguide.n_sites, required_sites(50.0, 3));
    }

    #[test]
    fn field_vacuum_at_start_and_symmetric_emission() {
        let c = config(200, 6, 0.08, 0.0, 1, 0);
        let traj = evolve(&c, &InitialState::single(0), 40.0, &EvolveOptions::default()).unwrap();
        let f0 = field_profile(&traj, 0.0).unwrap();
        assert!(f0.iter().all(|(_, d)| *d < 1e-24));
        let x1 = traj.config.emitters.position;
        let f = field_profile(&traj, 20.0).unwrap();
        for d in 1..60 {
            assert!((f[x1 - d].1 - f[x1 + d].1).abs() < 1e-12);
        }
        let atoms = traj.atomic_population()[200];
        let photons: f64 = f.iter().map(|(_, d)| d).sum();
        assert!((atoms + photons - 1.0).abs() < 1e-10);
        assert!(field_profile(&traj, 20.05).is_err());
    }

    #[test]
    fn bad_inputs() {
        let c = config(40, 3, 0.08, 0.0, 1, 0);
        assert!(evolve(&c, &InitialState::single(0), 0.0, &EvolveOptions::default()).is_err());
        assert!(evolve(&c, &InitialState::single(3), 1.0, &EvolveOptions::default()).is_err());
        let traj = evolve(&c, &InitialState::single(0), 1.0, &EvolveOptions::default()).unwrap();
        assert!(traj.excited_population(1).is_err());
    }
}
