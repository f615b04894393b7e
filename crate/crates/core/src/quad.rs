//! Adaptive panel Gauss-Legendre quadrature for vector-valued integrands.
//!
//! A panel is accepted once the rule on the whole panel and the sum over its
//! two halves agree to the requested tolerance. Panels are visited depth
//! first, left to right, and summed in that order, so results do not depend
//! on scheduling.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Points per panel.
pub const ORDER: usize = 20;

/// Nodes on `[-1, 1]` and weights of the `n`-point Gauss-Legendre rule, by
/// Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Absolute tolerance on every component.
    pub tol: f64,
    pub max_depth: usize,
    /// Panels per unit interval length in the initial partition (at least one
    /// per breakpoint interval).
    pub initial_density: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_depth: 30, initial_density: 0.0 }
    }
}

/// Integrates a vector-valued `f` over `[a, b]`, with the initial partition
/// split at every point of `breaks` inside the interval.
///
/// `f(x, out)` must write `dim` values into `out`.
pub fn integrate<F>(f: F, a: f64, b: f64, breaks: &[f64], dim: usize, opts: &QuadOptions) -> Result<Vec<C64>>
where
    F: Fn(f64, &mut [C64]),
{
    let (nodes, weights) = gauss_legendre(ORDER);
    let rule = Rule { nodes, weights, dim };
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut total = vec![C64::default(); dim];
    let mut scratch = vec![C64::default(); dim];
    let tol_density = opts.tol / (b - a);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let pieces = ((hi - lo) * opts.initial_density).ceil().max(1.0) as usize;
        let h = (hi - lo) / pieces as f64;
        for p in 0..pieces {
            let pa = lo + p as f64 * h;
            let pb = if p + 1 == pieces { hi } else { pa + h };
            let whole = rule.apply(&f, pa, pb, &mut scratch);
            rule.refine(&f, pa, pb, whole, tol_density, opts.max_depth, &mut total, &mut scratch)?;
        }
    }
    Ok(total)
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    dim: usize,
}

impl Rule {
    fn apply<F: Fn(f64, &mut [C64])>(&self, f: &F, a: f64, b: f64, scratch: &mut [C64]) -> Vec<C64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = vec![C64::default(); self.dim];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            f(mid + half * x, scratch);
            for (s, v) in acc.iter_mut().zip(scratch.iter()) {
                *s += v * (w * half);
            }
        }
        acc
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F: Fn(f64, &mut [C64])>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        whole: Vec<C64>,
        tol_density: f64,
        depth: usize,
        total: &mut [C64],
        scratch: &mut [C64],
    ) -> Result<()> {
        let m = 0.5 * (a + b);
        let left = self.apply(f, a, m, scratch);
        let right = self.apply(f, m, b, scratch);
        let err = whole.iter().zip(left.iter().zip(&right)).map(|(w, (l, r))| (w - l - r).norm()).fold(0.0, f64::max);
        if err <= tol_density * (b - a) || err < 1e-15 {
            for (t, (l, r)) in total.iter_mut().zip(left.iter().zip(&right)) {
                *t += l + r;
            }
            return Ok(());
        }
        if depth == 0 || m <= a || m >= b {
            return Err(Error::Domain(format!("quadrature did not converge on [{a}, {b}] (error estimate {err:e})")));
        }
        self.refine(f, a, m, left, tol_density, depth - 1, total, scratch)?;
        self.refine(f, m, b, right, tol_density, depth - 1, total, scratch)
    }
}
