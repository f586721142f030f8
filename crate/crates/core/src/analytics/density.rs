//! Eigenvalue density for `η = c·I` and its reductions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of Simpson nodes.
pub const DEFAULT_QUAD_POINTS: usize = 2048;
/// Successive Simpson refinements stop once they differ by less than this.
pub const QUAD_TOLERANCE: f64 = 1e-6;
const MAX_QUAD_POINTS: usize = 1 << 21;

/// Analytic density model for `η = c·I` at rectangularity `κ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    pub c: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub point_mass_at_zero: f64,
}

impl DensityModel {
    pub fn new(c: f64, kappa: f64) -> Result<Self> {
        if !(c.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!("density model needs |c| < 1, got {c}")));
        }
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        Ok(DensityModel {
            c,
            kappa,
            alpha: 1.0 - c * c,
            point_mass_at_zero: (1.0 - 1.0 / kappa).max(0.0),
        })
    }

    /// Center and semi-axes `(x₀, a, b)` of the support ellipse.
    pub fn ellipse(&self) -> (f64, f64, f64) {
        let (c, k) = (self.c, self.kappa);
        (c * (1.0 + k), k.sqrt() * (1.0 + c * c), k.sqrt() * (1.0 - c * c))
    }

    /// Closed support ellipse membership.
    pub fn inside(&self, z: Complex64) -> bool {
        let (x0, a, b) = self.ellipse();
        let u = (z.re - x0) / a;
        let v = z.im / b;
        u * u + v * v <= 1.0
    }

    /// `√(α²(1−κ)² + 4|z|²)`
    fn root(&self, z_abs_sq: f64) -> f64 {
        let s = self.alpha * (1.0 - self.kappa);
        (s * s + 4.0 * z_abs_sq).sqrt()
    }

    /// Density inside the ellipse as a function of `|z|²`, ignoring the support.
    fn bulk(&self, z_abs_sq: f64) -> f64 {
        1.0 / (PI * self.kappa * self.alpha * self.root(z_abs_sq))
    }
}

/// Nonholomorphic solution of the loop equations at `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopSolution {
    pub mu1: f64,
    pub mu2: f64,
    pub g: Complex64,
}

/// Solves the loop equations for `η = c·I` in the nonholomorphic region:
///
/// ```text
/// μ₁ + 1 = [−α(1−κ) + √(α²(1−κ)² + 4|z|²)] / 2κ
/// μ₂ = −c²(1−κ) + κμ₁
/// g = [α(κ−1) + √(α²(1−κ)² + 4|z|²)] / (2ακz) − c/(κα)
/// ```
pub fn loop_solve_diagonal(z: Complex64, c: f64, kappa: f64) -> Result<LoopSolution> {
    let model = DensityModel::new(c, kappa)?;
    if z.norm_sqr() == 0.0 {
        return Err(Error::Domain("loop equations are singular at z = 0".into()));
    }
    let (alpha, k) = (model.alpha, kappa);
    let root = model.root(z.norm_sqr());
    let mu1 = (-alpha * (1.0 - k) + root) / (2.0 * k) - 1.0;
    let mu2 = -c * c * (1.0 - k) + k * mu1;
    let g = (alpha * (k - 1.0) + root) / (2.0 * alpha * k * z) - c / (k * alpha);
    Ok(LoopSolution { mu1, mu2, g })
}

/// Large-`N` Green's function `(1/N) tr (z − C)⁻¹` for `η = c·I`: the
/// nonholomorphic solution inside the ellipse, the holomorphic one outside.
///
/// Outside, `g = Ψ/((Ψ − c) z)` with `Ψ` the root of
/// `Ψ² − (z + c(1−κ))Ψ + cz = 0` farther from `c`.
pub fn green_diagonal(z: Complex64, model: &DensityModel) -> Result<Complex64> {
    if model.inside(z) {
        return loop_solve_diagonal(z, model.c, model.kappa).map(|s| s.g);
    }
    let c = model.c;
    let bsum = z + c * (1.0 - model.kappa);
    let disc = (bsum * bsum - 4.0 * c * z).sqrt();
    let r1 = (bsum + disc) / 2.0;
    let r2 = (bsum - disc) / 2.0;
    let psi = if (r1 - c).norm() >= (r2 - c).norm() { r1 } else { r2 };
    Ok(psi / ((psi - c) * z))
}

/// Continuous part of the density at `z`; zero outside the support ellipse.
/// The atom at the origin is `model.point_mass_at_zero`.
pub fn density_diagonal(z: Complex64, model: &DensityModel) -> f64 {
    if model.inside(z) {
        model.bulk(z.norm_sqr())
    } else {
        0.0
    }
}

/// Composite Simpson rule with `nodes` points (rounded up to odd, at least 3).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> f64 {
    let intervals = (nodes.max(3) - 1).next_multiple_of(2);
    let h = (b - a) / intervals as f64;
    let mut s = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Simpson with node doubling until successive estimates agree to
/// [`QUAD_TOLERANCE`].
pub fn simpson_refined(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> f64 {
    let mut n = nodes.max(3);
    let mut prev = simpson(&f, a, b, n);
    while n < MAX_QUAD_POINTS {
        n = 2 * n - 1;
        let next = simpson(&f, a, b, n);
        if (next - prev).abs() < QUAD_TOLERANCE {
            return next;
        }
        prev = next;
    }
    prev
}

/// Angles in `[0, 2π)` where the circle `|z| = r` meets the support ellipse.
fn ellipse_crossings(r: f64, model: &DensityModel) -> Vec<f64> {
    let (x0, a, b) = model.ellipse();
    // ((r u − x0)/a)² + r²(1 − u²)/b² = 1 with u = cos θ
    let qa = r * r * (1.0 / (a * a) - 1.0 / (b * b));
    let qb = -2.0 * x0 * r / (a * a);
    let qc = x0 * x0 / (a * a) + r * r / (b * b) - 1.0;
    let mut us = Vec::new();
    if qa.abs() < 1e-300 {
        if qb != 0.0 {
            us.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            us.push((-qb + sq) / (2.0 * qa));
            us.push((-qb - sq) / (2.0 * qa));
        }
    }
    let mut angles = Vec::new();
    for u in us {
        if (-1.0..=1.0).contains(&u) {
            let t = u.acos();
            angles.push(t);
            angles.push(2.0 * PI - t);
        }
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    angles
}

/// Radial density `ρ_R(r) = r ∫₀^{2π} ρ(r e^{iθ}) dθ`, integrated by Simpson
/// over the arcs between the points where the circle crosses the ellipse.
pub fn radial_density(r: f64, model: &DensityModel, quad_points: usize) -> f64 {
    if r <= 0.0 || !r.is_finite() {
        return 0.0;
    }
    let mut breaks = vec![0.0];
    breaks.extend(ellipse_crossings(r, model));
    breaks.push(2.0 * PI);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= 0.0 {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        if !model.inside(Complex64::from_polar(r, mid)) {
            continue;
        }
        // the integrand depends on |z| only, so each inside arc is exact
        total += simpson(|_| model.bulk(r * r), lo, hi, quad_points);
    }
    r * total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Marginal density of `Re λ` (axis X) or `Im λ` (axis Y) at coordinate `t`,
/// integrating the density across the ellipse chord.
pub fn marginal_density(axis: Axis, t: f64, model: &DensityModel, quad_points: usize) -> f64 {
    let (x0, a, b) = model.ellipse();
    match axis {
        Axis::X => {
            let u = (t - x0) / a;
            if u.abs() >= 1.0 {
                return 0.0;
            }
            let half = b * (1.0 - u * u).sqrt();
            // symmetric in y
            2.0 * simpson_refined(|y| model.bulk(t * t + y * y), 0.0, half, quad_points)
        }
        Axis::Y => {
            let v = t / b;
            if v.abs() >= 1.0 {
                return 0.0;
            }
            let half = a * (1.0 - v * v).sqrt();
            simpson_refined(|x| model.bulk(x * x + t * t), x0 - half, x0 + half, quad_points)
        }
    }
}

/// Marchenko–Pastur density on `[(1−√κ)², (1+√κ)²]`; the atom `1 − 1/κ` at
/// zero for `κ > 1` is not included.
pub fn mp_density(x: f64, kappa: f64) -> f64 {
    let (lo, hi) = mp_support(kappa);
    if x <= lo || x >= hi || x <= 0.0 {
        return 0.0;
    }
    ((hi - x) * (x - lo)).sqrt() / (2.0 * PI * kappa * x)
}

/// `(x₋, x₊) = ((1 − √κ)², (1 + √κ)²)`
pub fn mp_support(kappa: f64) -> (f64, f64) {
    let s = kappa.sqrt();
    ((1.0 - s).powi(2), (1.0 + s).powi(2))
}
