//! Constructive half of the ratio criterion: the piecewise-linear boundary
//! homeomorphism through the window values, its quasisymmetry profile, the
//! averaging extension to the plane, and finite-difference dilatation fields.

use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{Auto, Exec};
use crate::model::{c64_vec, RealSequenceWindow};
use crate::qs::{qs_constant_c, ratio_report};

/// Piecewise-linear homeomorphism of the real line with `phi(n) = a_n` at
/// every in-window integer; outside the window it continues affinely with
/// the nearest boundary slope (a window artifact, documented as such).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlMap {
    window: RealSequenceWindow,
}

pub fn pl_map(seq: &RealSequenceWindow) -> PlMap {
    PlMap { window: seq.clone() }
}

impl PlMap {
    pub fn window(&self) -> &RealSequenceWindow {
        &self.window
    }

    fn first_slope(&self) -> f64 {
        let v = self.window.values();
        v[1] - v[0]
    }

    fn last_slope(&self) -> f64 {
        let v = self.window.values();
        v[v.len() - 1] - v[v.len() - 2]
    }

    /// Evaluates the map; exact at integer breakpoints.
    pub fn eval(&self, x: f64) -> f64 {
        let v = self.window.values();
        let base = self.window.base_index() as f64;
        let last = self.window.last_index() as f64;
        if x < base {
            return v[0] + self.first_slope() * (x - base);
        }
        if x >= last {
            return v[v.len() - 1] + self.last_slope() * (x - last);
        }
        let n = x.floor();
        let p = (n as i64 - self.window.base_index()) as usize;
        v[p] + (v[p + 1] - v[p]) * (x - n)
    }

    /// Exact integral of the map over `[lo, hi]`, splitting at the integer
    /// breakpoints so each trapezoid covers a single linear piece.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo <= hi);
        if lo == hi {
            return 0.0;
        }
        let mut total = 0.0;
        let mut x = lo;
        let mut fx = self.eval(lo);
        while x < hi {
            let next = (x.floor() + 1.0).min(hi);
            let fnext = self.eval(next);
            total += (next - x) * (fx + fnext) * 0.5;
            x = next;
            fx = fnext;
        }
        total
    }
}

/// One sampled quasisymmetry quotient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsSample {
    pub x: f64,
    pub t: f64,
    /// `(phi(x+t) - phi(x)) / (phi(x) - phi(x-t))`
    pub ratio: f64,
}

/// Sampled quasisymmetry profile of a boundary map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsProfile {
    pub samples: Vec<QsSample>,
    /// Max over samples of `max(ratio, 1/ratio)`.
    pub rho_hat: f64,
    /// `C(m_hat)` for the window's certified ratio constant.
    pub bound_claimed: f64,
}

/// Evaluates the quasisymmetry quotient on the grid `xs x ts`.
pub fn qs_profile(map: &PlMap, xs: &[f64], ts: &[f64]) -> Result<QsProfile> {
    for &t in ts {
        if !(t > 0.0) {
            return Err(Error::NonpositiveOffset(t));
        }
    }
    let n = xs.len() * ts.len();
    let samples = Auto.map_indexed(n, |i| {
        let x = xs[i / ts.len()];
        let t = ts[i % ts.len()];
        let num = map.eval(x + t) - map.eval(x);
        let den = map.eval(x) - map.eval(x - t);
        QsSample { x, t, ratio: num / den }
    });
    let rho_hat = samples
        .iter()
        .map(|s| s.ratio.max(1.0 / s.ratio))
        .fold(1.0f64, f64::max);
    let m_hat = ratio_report(map.window()).m_hat;
    Ok(QsProfile { samples, rho_hat, bound_claimed: qs_constant_c(m_hat.max(1.0))? })
}

fn extend_upper(map: &PlMap, x: f64, y: f64) -> Complex64 {
    debug_assert!(y > 0.0);
    // alpha = (1/y) * int_x^{x+y} phi, beta = (1/y) * int_{x-y}^x phi.
    let alpha = map.integral(x, x + y) / y;
    let beta = map.integral(x - y, x) / y;
    Complex64::new(0.5 * (alpha + beta), alpha - beta)
}

/// Averaging extension of the boundary map to the plane, normalized so the
/// identity extends to the identity: `F = (alpha+beta)/2 + i(alpha-beta)`
/// in the upper half-plane, conjugate reflection below.
pub fn ba_extend(map: &PlMap, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        return Err(Error::RealAxisInput);
    }
    if z.im > 0.0 {
        Ok(extend_upper(map, z.re, z.im))
    } else {
        Ok(extend_upper(map, z.re, -z.im).conj())
    }
}

/// Rectangular evaluation grid, `nx x ny` nodes inclusive of the edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(x1 > x0) || !(y1 > y0) {
            return Err(Error::BadGrid(format!(
                "degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::BadGrid("need at least 2 nodes per axis".into()));
        }
        Ok(Self { x0, x1, y0, y1, nx, ny })
    }

    pub fn square(x0: f64, x1: f64, y0: f64, y1: f64, res: usize) -> Result<Self> {
        Self::new(x0, x1, y0, y1, res, res)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y1 - self.y0) / (self.ny - 1) as f64
    }

    /// Node at row-major index `j * nx + i`.
    pub fn node(&self, idx: usize) -> Complex64 {
        let i = idx % self.nx;
        let j = idx / self.nx;
        Complex64::new(self.x0 + i as f64 * self.dx(), self.y0 + j as f64 * self.dy())
    }
}

/// Sampled extension over a grid. Nodes on the real axis carry the boundary
/// map value (the vertical limit of the extension).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionField {
    pub grid: GridSpec,
    #[serde(with = "c64_vec")]
    pub values: Vec<Complex64>,
    /// Imaginary-part scale of the averaging formula; 2 makes the identity
    /// extend to the identity.
    pub vertical_scale: f64,
}

#[doc(hidden)]
pub fn fill_extension<E: Exec>(ex: &E, map: &PlMap, grid: &GridSpec) -> Vec<Complex64> {
    ex.map_indexed(grid.len(), |idx| {
        let z = grid.node(idx);
        if z.im == 0.0 {
            Complex64::new(map.eval(z.re), 0.0)
        } else {
            ba_extend(map, z).expect("off-axis node")
        }
    })
}

pub fn extension_field(map: &PlMap, grid: &GridSpec) -> ExtensionField {
    let values = fill_extension(&Auto, map, grid);
    ExtensionField { grid: grid.clone(), values, vertical_scale: 2.0 }
}

/// Beltrami quotient and pointwise dilatation sampled over a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilatationField {
    pub grid: GridSpec,
    #[serde(with = "c64_vec")]
    pub mu: Vec<Complex64>,
    pub k: Vec<f64>,
    pub fd_step: f64,
}

impl DilatationField {
    pub fn k_max(&self) -> f64 {
        self.k.iter().copied().fold(1.0, f64::max)
    }
}

/// Central-difference Beltrami quotient of the extension over a grid that
/// lies strictly in the upper half-plane.
///
/// `fd_step` defaults to `1e-4` of the smaller node spacing.
pub fn dilatation_field(map: &PlMap, grid: &GridSpec, fd_step: Option<f64>) -> Result<DilatationField> {
    if grid.y0 <= 0.0 {
        return Err(Error::BadGrid("grid must lie strictly in the upper half-plane".into()));
    }
    let spacing = grid.dx().min(grid.dy());
    let h = fd_step.unwrap_or(1e-4 * spacing);
    if !(h > 0.0) || h >= 0.5 * spacing {
        return Err(Error::BadGrid(format!(
            "fd_step {h} must lie in (0, {})",
            0.5 * spacing
        )));
    }
    if h >= grid.y0 {
        return Err(Error::BadGrid(format!(
            "fd_step {h} reaches below the real axis from y0 = {}",
            grid.y0
        )));
    }

    let nodes = Auto.map_indexed(grid.len(), |idx| {
        let z = grid.node(idx);
        let fx = (extend_upper(map, z.re + h, z.im) - extend_upper(map, z.re - h, z.im))
            / (2.0 * h);
        let fy = (extend_upper(map, z.re, z.im + h) - extend_upper(map, z.re, z.im - h))
            / (2.0 * h);
        // Wirtinger quotient mu = f_zbar / f_z.
        let num = fx + Complex64::i() * fy;
        let den = fx - Complex64::i() * fy;
        if den.norm() < 1e-12 {
            return Err(Error::DegenerateJacobian { node: idx });
        }
        let mu = num / den;
        if mu.norm() >= 1.0 {
            return Err(Error::DegenerateJacobian { node: idx });
        }
        Ok((mu, (1.0 + mu.norm()) / (1.0 - mu.norm())))
    });
    let mut mu = Vec::with_capacity(nodes.len());
    let mut k = Vec::with_capacity(nodes.len());
    for node in nodes {
        let (m, kk) = node?;
        mu.push(m);
        k.push(kk);
    }
    Ok(DilatationField { grid: grid.clone(), mu, k, fd_step: h })
}

/// Strictly increasing window with i.i.d. gaps uniform on `[1, M]`,
/// deterministic per seed, centered so the index-0 value is 0.
pub fn random_m_sequence(m: f64, window_size: usize, seed: u64) -> Result<RealSequenceWindow> {
    if !(m >= 1.0) {
        return Err(Error::BadConstant { name: "M", value: m, min: 1.0 });
    }
    if window_size < RealSequenceWindow::MIN_LEN {
        return Err(Error::TooShort { len: window_size, min: RealSequenceWindow::MIN_LEN });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gap = Uniform::new_inclusive(1.0, m);
    let mut values = Vec::with_capacity(window_size);
    let mut acc = 0.0;
    values.push(0.0);
    for _ in 1..window_size {
        acc += gap.sample(&mut rng);
        values.push(acc);
    }
    let mid = window_size / 2;
    let shift = values[mid];
    for v in &mut values {
        *v -= shift;
    }
    RealSequenceWindow::new(values, -(mid as i64))
}

/// Adaptive Simpson quadrature, used as an independent cross-check of the
/// exact breakpoint-splitting integral.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if lo == hi {
        return 0.0;
    }
    let fa = f(lo);
    let fb = f(hi);
    let fm = f(0.5 * (lo + hi));
    let whole = simpson(lo, hi, fa, fm, fb);
    let scale = whole.abs().max(1.0);
    recurse(f, lo, hi, fa, fm, fb, whole, rel_tol * scale, 40)
}
