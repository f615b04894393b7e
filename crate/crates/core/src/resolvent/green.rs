//! Lattice Green's function of the bare waveguide and its boundary values on
//! the band.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Side of the branch cut. `Minus` is the retarded limit `E + i0`, `Plus` the
/// advanced one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutSide {
    Plus,
    Minus,
}

impl CutSide {
    pub const BOTH: [CutSide; 2] = [CutSide::Plus, CutSide::Minus];

    pub fn sign(self) -> f64 {
        match self {
            CutSide::Plus => 1.0,
            CutSide::Minus => -1.0,
        }
    }
}

/// `sqrt(z - 2J) sqrt(z + 2J)` with principal roots: cut exactly on
/// `[-2J, 2J]`, and `~ z` at infinity.
fn band_root(z: C64, j: f64) -> C64 {
    (z - 2.0 * j).sqrt() * (z + 2.0 * j).sqrt()
}

/// `G0(z, x) = (1/N) sum_k e^{ikx} / (z - 2J cos k)` for `z` off the band,
/// band centre at zero. Decays like `|zeta|^|x|` with `|zeta| < 1`.
pub(crate) fn g0(z: C64, x: i64, j: f64) -> C64 {
    let w = band_root(z, j);
    let zeta = (z - w) / (2.0 * j);
    zeta.powi(x.unsigned_abs() as i32) / w
}

/// `dG0/dz = -zeta^|x| (|x| w + z) / w^3`.
pub(crate) fn g0_dz(z: C64, x: i64, j: f64) -> C64 {
    let w = band_root(z, j);
    let zeta = (z - w) / (2.0 * j);
    let ax = x.unsigned_abs();
    -zeta.powi(ax as i32) * (ax as f64 * w + z) / (w * w * w)
}

/// Per-site decay factor `|zeta(z)|` of the bound field at energy `z`.
pub(crate) fn decay_factor(z: C64, j: f64) -> f64 {
    ((z - band_root(z, j)) / (2.0 * j)).norm()
}

fn on_cut(z: C64, j: f64) -> bool {
    z.im == 0.0 && z.re.abs() <= 2.0 * j
}

/// `F(s, x)`, the bare Green's function at `z = i s` (energies measured from
/// the band centre).
pub fn green_f(s: C64, x: i64, j: f64) -> Result<C64> {
    if s == C64::default() {
        return Err(Error::Domain("F(s, x) is undefined at s = 0".into()));
    }
    let z = C64::i() * s;
    if on_cut(z, j) || !z.is_finite() {
        return Err(Error::Domain(format!("s = {s} lies on the branch cut [-2iJ, 2iJ]; use green_f_cut")));
    }
    Ok(g0(z, x, j))
}

/// Boundary values `f_±(y, x) = ±i (-y ± i sqrt(1-y^2))^|x| / (2J sqrt(1-y^2))`
/// at band energy `E = -2Jy`.
pub fn green_f_cut(y: f64, x: i64, j: f64, side: CutSide) -> Result<C64> {
    if !(y.abs() < 1.0) {
        return Err(Error::Domain(format!("cut variable y = {y} must satisfy |y| < 1")));
    }
    Ok(f_cut(y, x, j, side))
}

pub(crate) fn f_cut(y: f64, x: i64, j: f64, side: CutSide) -> C64 {
    let a = side.sign();
    let r = (1.0 - y * y).sqrt();
    C64::new(0.0, a) * C64::new(-y, a * r).powi(x.unsigned_abs() as i32) / (2.0 * j * r)
}
