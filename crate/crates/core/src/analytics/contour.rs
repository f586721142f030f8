//! Boundary of the eigenvalue support.
//!
//! In the auxiliary variable `Ψ` the boundary is the outermost level set
//! `f(Ψ) = 1/κ` of `f(Ψ) = (1/N) tr [(Ψ − η)(Ψ̄ − ηᵗ)]⁻¹`, and each point maps
//! to the `z`-plane by `z = Ψ(1 − κ) + κΨ² (1/N) tr (Ψ − η)⁻¹`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::levelset::{level_curves, polygon_area};
use super::resolvent::Resolvent;
use crate::correlation::{EtaMatrix, EtaStructure};
use crate::error::{Error, Result};

pub const DEFAULT_POINTS: usize = 256;
pub const MIN_POINTS: usize = 16;
/// Bisection stops when the bracket in `r` is narrower than this.
pub const BISECTION_TOLERANCE: f64 = 1e-10;
/// Rays are searched out to this radius before giving up.
pub const MAX_RAY_RADIUS: f64 = 8.0;
/// Per-point tolerance of the closed-form branch check, relative to `1/κ`.
pub const BRANCH_TOLERANCE: f64 = 1e-6;

const SCAN_STEPS: usize = 256;
const DENSE_SCAN_STEPS: usize = 48;
const START_MARGIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourMethod {
    Ellipse,
    TridiagContinuum,
    SpectrumExpansion,
    LevelSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TridiagVariant {
    /// `p = q`
    Symmetric,
    /// `p = −q`, where the spectrum is `c ± 2i c₀ cos(·)`
    AntiCommuting,
}

/// A contour point: ray angle, the `Ψ` on the ray, and its image `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiPoint {
    pub theta: f64,
    pub psi: Complex64,
    pub z: Complex64,
}

/// Closed polyline in the `z`-plane; the last point connects to the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourCurve {
    pub points: Vec<Complex64>,
    pub trace: Vec<PsiPoint>,
    pub method: ContourMethod,
    pub kappa: f64,
    pub meta: BTreeMap<String, f64>,
}

impl ContourCurve {
    fn from_trace(trace: Vec<PsiPoint>, method: ContourMethod, kappa: f64, meta: &[(&str, f64)]) -> Self {
        ContourCurve {
            points: trace.iter().map(|p| p.z).collect(),
            trace,
            method,
            kappa,
            meta: meta.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Signed area of the `z` polygon.
    pub fn area(&self) -> f64 {
        polygon_area(&self.points)
    }

    /// Copy with every point moved radially away from `center` by `factor`.
    pub fn scaled_about(&self, center: Complex64, factor: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            *p = center + (*p - center) * factor;
        }
        for t in &mut out.trace {
            t.z = center + (t.z - center) * factor;
        }
        out
    }

    /// Fails with [`Error::SelfIntersecting`] if two non-adjacent edges cross.
    pub fn check_simple(&self) -> Result<()> {
        check_simple(&self.points)
    }
}

fn check_simple(points: &[Complex64]) -> Result<()> {
    let n = points.len();
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re);
    let bbox = |a: Complex64, b: Complex64| (a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im));
    let boxes: Vec<_> = (0..n).map(|i| bbox(points[i], points[(i + 1) % n])).collect();
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (bi, bj) = (boxes[i], boxes[j]);
            if bi.1 < bj.0 || bj.1 < bi.0 || bi.3 < bj.2 || bj.3 < bi.2 {
                continue;
            }
            let (c, d) = (points[j], points[(j + 1) % n]);
            let d1 = cross(a, b, c);
            let d2 = cross(a, b, d);
            let d3 = cross(c, d, a);
            let d4 = cross(c, d, b);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                return Err(Error::SelfIntersecting { first: i, second: j });
            }
        }
    }
    Ok(())
}

/// Symmetric Hausdorff distance between two closed polylines.
pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    fn one_sided(from: &[Complex64], to: &[Complex64]) -> f64 {
        from.iter()
            .map(|&p| {
                (0..to.len())
                    .map(|j| segment_distance(p, to[j], to[(j + 1) % to.len()]))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
    one_sided(a, b).max(one_sided(b, a))
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len = ab.norm_sqr();
    let t = if len == 0.0 {
        0.0
    } else {
        (((p - a) * ab.conj()).re / len).clamp(0.0, 1.0)
    };
    (p - (a + ab * t)).norm()
}

fn check_common(kappa: f64, n_points: usize) -> Result<()> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    if n_points < MIN_POINTS {
        return Err(Error::InvalidParameter(format!(
            "contours need at least {MIN_POINTS} points, got {n_points}"
        )));
    }
    Ok(())
}

fn ray_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// Shifted ellipse for `η = c·I`, uniform in the eccentric angle:
/// `z = c(1+κ) + √κ[(1+c²) cos θ + i(1−c²) sin θ]`, `Ψ = c + √κ e^{iθ}`.
pub fn ellipse_contour(c: f64, kappa: f64, n_points: usize) -> Result<ContourCurve> {
    check_common(kappa, n_points)?;
    if !(c.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("ellipse needs |c| < 1, got {c}")));
    }
    let s = kappa.sqrt();
    let trace = ray_angles(n_points)
        .into_iter()
        .map(|theta| {
            let z = Complex64::new(
                c * (1.0 + kappa) + s * (1.0 + c * c) * theta.cos(),
                s * (1.0 - c * c) * theta.sin(),
            );
            PsiPoint {
                theta,
                psi: c + Complex64::from_polar(s, theta),
                z,
            }
        })
        .collect();
    Ok(ContourCurve::from_trace(trace, ContourMethod::Ellipse, kappa, &[("c", c)]))
}

/// Result of a single ray search.
#[derive(Clone, Copy, Debug)]
struct RayRoot {
    r: f64,
    /// Sign changes of `f − level` seen along the ray.
    crossings: usize,
}

/// Outermost `r` with `f(center + r e^{iθ}) = level`.
///
/// Starts at `r_start`, where `f < level` is expected (doubling up to
/// [`MAX_RAY_RADIUS`] otherwise), scans inward on a uniform grid until
/// `f ≥ level`, and bisects that bracket.
fn solve_ray(
    f: &(impl Fn(Complex64) -> Result<f64> + ?Sized),
    center: Complex64,
    theta: f64,
    level: f64,
    r_start: f64,
    steps: usize,
) -> Result<RayRoot> {
    let dir = Complex64::from_polar(1.0, theta);
    let at = |r: f64| f(center + dir * r);
    let mut r_hi = r_start.min(MAX_RAY_RADIUS);
    while at(r_hi)? >= level {
        if r_hi >= MAX_RAY_RADIUS {
            return Err(Error::RootNotBracketed { angle: theta });
        }
        r_hi = (2.0 * r_hi).min(MAX_RAY_RADIUS);
    }
    let h = r_hi / steps as f64;
    let mut bracket = None;
    let mut crossings = 0;
    let mut above = false;
    for k in (1..steps).rev() {
        let now = at(k as f64 * h)? >= level;
        if now != above {
            crossings += 1;
            if bracket.is_none() {
                bracket = Some((k as f64 * h, (k + 1) as f64 * h));
            }
            above = now;
        }
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::RootNotBracketed { angle: theta })?;
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if at(mid)? >= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RayRoot {
        r: 0.5 * (lo + hi),
        crossings,
    })
}

/// Contour of a normal η from its eigenvalues: the outermost root of
/// `(1/N) Σ |Ψ − λ_j|⁻² = 1/κ` on rays from the mean eigenvalue, mapped by
/// `z = Ψ + κΨ (1/N) Σ λ_j/(Ψ − λ_j)`.
pub fn spectrum_contour(lambdas: &[Complex64], kappa: f64, n_points: usize) -> Result<ContourCurve> {
    check_common(kappa, n_points)?;
    if lambdas.is_empty() {
        return Err(Error::EmptyInput("eigenvalues"));
    }
    if let Some(l) = lambdas.iter().find(|l| !(l.norm() < 1.0)) {
        return Err(Error::InvalidParameter(format!("eigenvalue {l} has modulus >= 1")));
    }
    let center = lambdas.iter().sum::<Complex64>() / lambdas.len() as f64;
    let radius = lambdas.iter().map(|l| (l - center).norm()).fold(0.0, f64::max);
    let resolvent = Resolvent::Spectrum {
        lambdas: lambdas.to_vec(),
    };
    let trace = ray_trace(&resolvent, center, radius + kappa.sqrt() + START_MARGIN, kappa, n_points, SCAN_STEPS)?.0;
    let curve = ContourCurve::from_trace(
        trace,
        ContourMethod::SpectrumExpansion,
        kappa,
        &[("n_eigenvalues", lambdas.len() as f64)],
    );
    curve.check_simple()?;
    Ok(curve)
}

/// Solves every ray and maps to `z`. Also returns the largest number of
/// crossings seen on any ray.
fn ray_trace(
    resolvent: &Resolvent,
    center: Complex64,
    r_start: f64,
    kappa: f64,
    n_points: usize,
    steps: usize,
) -> Result<(Vec<PsiPoint>, usize)> {
    let level = 1.0 / kappa;
    let f = |psi: Complex64| resolvent.eval_perturbed(psi).map(|t| t.frobenius);
    let solved: Vec<(PsiPoint, usize)> = ray_angles(n_points)
        .into_par_iter()
        .map(|theta| {
            let root = solve_ray(&f, center, theta, level, r_start, steps)?;
            let psi = center + Complex64::from_polar(root.r, theta);
            let m = resolvent.eval_perturbed(psi)?.mean_diagonal;
            let z = psi * (1.0 - kappa) + kappa * psi * psi * m;
            Ok((PsiPoint { theta, psi, z }, root.crossings))
        })
        .collect::<Result<_>>()?;
    let crossings = solved.iter().map(|s| s.1).max().unwrap_or(0);
    Ok((solved.into_iter().map(|s| s.0).collect(), crossings))
}

/// `G(w) = (1/π) ∫₀^π dφ / (w − 2c₀ cos φ) = 1/(√(w − 2c₀) √(w + 2c₀))`,
/// the continuum limit of the tridiagonal resolvent trace.
fn continuum_green(w: Complex64, c0: f64) -> Complex64 {
    if c0 == 0.0 {
        return 1.0 / w;
    }
    1.0 / ((w - 2.0 * c0).sqrt() * (w + 2.0 * c0).sqrt())
}

/// `(1/π) ∫₀^π dφ / |w − 2c₀ cos φ|² = −Im G(w) / Im w`, with the limit
/// `−G′(w)` near the real axis.
fn continuum_frobenius(w: Complex64, c0: f64) -> f64 {
    if c0 == 0.0 {
        return 1.0 / w.norm_sqr();
    }
    if w.im.abs() < 1e-8 * w.norm().max(1e-300) {
        let s = (w - 2.0 * c0).sqrt() * (w + 2.0 * c0).sqrt();
        return (w / (s * s * s)).re;
    }
    -continuum_green(w, c0).im / w.im
}

/// Residual of the closed-form ray equation at `w = r e^{iθ}` for a given
/// branch `s e^{iν}` of `√(r² e^{2iθ} − 4c₀²)`, relative to `1/κ`.
fn branch_residual(r: f64, theta: f64, c0: f64, kappa: f64, root: Complex64) -> f64 {
    let (s, nu) = (root.norm(), root.arg());
    let c2 = c0 * c0;
    let den = 8.0 * c2 * r * r * (2.0 * theta).cos() - (16.0 * c2 * c2 + r.powi(4) - s * s * (4.0 * c2 - r * r));
    ((1.0 / kappa + 2.0 * r * s * (theta - nu).cos() / den) * kappa).abs()
}

/// Contour for tridiagonal η with `c₀ = √|pq|` in the large-`N` limit.
///
/// `Symmetric`: `z = Ψ(1−κ) + κΨ² G(Ψ − c)`. `AntiCommuting`: with
/// `Ψ′ = c + iu`, `z = Ψ′(1−κ) + κΨ′² G(u)/i`. Each point is cross-checked
/// against the closed-form ray equation, trying the principal square-root
/// branch first and then its negation.
pub fn tridiag_contour(
    c: f64,
    c0: f64,
    kappa: f64,
    variant: TridiagVariant,
    n_points: usize,
) -> Result<ContourCurve> {
    check_common(kappa, n_points)?;
    if !(c0 >= 0.0) || !c.is_finite() || !c0.is_finite() {
        return Err(Error::InvalidParameter(format!("need finite c and c0 >= 0, got c = {c}, c0 = {c0}")));
    }
    let admissible = match variant {
        TridiagVariant::Symmetric => c.abs() + 2.0 * c0 <= 1.0,
        TridiagVariant::AntiCommuting => c * c + 4.0 * c0 * c0 < 1.0,
    };
    if !admissible {
        return Err(Error::InvalidCorrelation {
            sigma_max: match variant {
                TridiagVariant::Symmetric => c.abs() + 2.0 * c0,
                TridiagVariant::AntiCommuting => (c * c + 4.0 * c0 * c0).sqrt(),
            },
            reason: "tridiagonal spectrum leaves the unit disc".into(),
        });
    }
    let i = Complex64::i();
    // u is the variable in which the spectrum lies on the real segment [−2c₀, 2c₀]
    let to_u = |psi: Complex64| match variant {
        TridiagVariant::Symmetric => psi - c,
        TridiagVariant::AntiCommuting => (psi - c) / i,
    };
    let level = 1.0 / kappa;
    let f = |psi: Complex64| Ok(continuum_frobenius(to_u(psi), c0));
    let center = Complex64::new(c, 0.0);
    let r_start = 2.0 * c0 + kappa.sqrt() + START_MARGIN;
    let trace: Vec<PsiPoint> = ray_angles(n_points)
        .into_par_iter()
        .map(|theta| {
            let root = solve_ray(&f, center, theta, level, r_start, SCAN_STEPS)?;
            let psi = center + Complex64::from_polar(root.r, theta);
            let u = to_u(psi);
            let (ur, ut) = (u.norm(), u.arg());
            let principal = (u * u - 4.0 * c0 * c0).sqrt();
            let res_p = branch_residual(ur, ut, c0, kappa, principal);
            let res_f = branch_residual(ur, ut, c0, kappa, -principal);
            if !(res_p < BRANCH_TOLERANCE || res_f < BRANCH_TOLERANCE) {
                return Err(Error::BranchError {
                    angle: theta,
                    principal: res_p,
                    flipped: res_f,
                });
            }
            let g = continuum_green(u, c0);
            let z = match variant {
                TridiagVariant::Symmetric => psi * (1.0 - kappa) + kappa * psi * psi * g,
                TridiagVariant::AntiCommuting => psi * (1.0 - kappa) + kappa * psi * psi * g / i,
            };
            Ok(PsiPoint { theta, psi, z })
        })
        .collect::<Result<_>>()?;
    let variant_code = match variant {
        TridiagVariant::Symmetric => 0.0,
        TridiagVariant::AntiCommuting => 1.0,
    };
    let curve = ContourCurve::from_trace(
        trace,
        ContourMethod::TridiagContinuum,
        kappa,
        &[("c", c), ("c0", c0), ("anti_commuting", variant_code)],
    );
    curve.check_simple()?;
    Ok(curve)
}

/// Contour for an arbitrary admissible η through the matrix resolvent.
///
/// Rays from `tr η / N` are tried first; if any ray crosses the level more
/// than once the contour is instead traced by marching squares on a
/// `resolution²` grid and the loop enclosing the largest area is kept.
pub fn general_contour(eta: &EtaMatrix, kappa: f64, resolution: usize) -> Result<ContourCurve> {
    check_common(kappa, resolution)?;
    let resolvent = Resolvent::for_eta(eta);
    let center = Complex64::new(eta.centroid(), 0.0);
    // outside |Ψ| > σ_max + √κ the resolvent norm is below √(1/κ)
    let r_start = center.norm() + eta.sigma_max() + kappa.sqrt() + START_MARGIN;
    let steps = if eta.structure() == EtaStructure::Dense {
        DENSE_SCAN_STEPS
    } else {
        SCAN_STEPS
    };
    let (trace, crossings) = ray_trace(&resolvent, center, r_start, kappa, resolution, steps)?;
    let meta = [("n", eta.n() as f64), ("sigma_max", eta.sigma_max())];
    if crossings <= 1 {
        let curve = ContourCurve::from_trace(trace, ContourMethod::LevelSet, kappa, &meta);
        curve.check_simple()?;
        return Ok(curve);
    }
    level_set_contour(&resolvent, center, r_start, kappa, resolution, &meta)
}

fn level_set_contour(
    resolvent: &Resolvent,
    center: Complex64,
    radius: f64,
    kappa: f64,
    resolution: usize,
    meta: &[(&str, f64)],
) -> Result<ContourCurve> {
    let f = |psi: Complex64| resolvent.eval_perturbed(psi).map(|t| t.frobenius);
    let loops = level_curves(f, 1.0 / kappa, center, 1.5 * radius, resolution)?;
    let mut best = loops
        .into_iter()
        .max_by(|a, b| polygon_area(a).abs().total_cmp(&polygon_area(b).abs()))
        .ok_or(Error::RootNotBracketed { angle: f64::NAN })?;
    if polygon_area(&best) < 0.0 {
        best.reverse();
    }
    let trace = best
        .into_iter()
        .map(|psi| {
            let m = resolvent.eval_perturbed(psi)?.mean_diagonal;
            Ok(PsiPoint {
                theta: (psi - center).arg().rem_euclid(2.0 * PI),
                psi,
                z: psi * (1.0 - kappa) + kappa * psi * psi * m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut meta = meta.to_vec();
    meta.push(("marching_squares", 1.0));
    let curve = ContourCurve::from_trace(trace, ContourMethod::LevelSet, kappa, &meta);
    curve.check_simple()?;
    Ok(curve)
}
