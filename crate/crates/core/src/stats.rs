//! Empirical densities from pooled spectra and comparisons with the analytic models.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytics::{polygon_area, ContourCurve, MIN_POINTS};
use crate::error::{Error, Result};
use crate::sampling::SpectrumSample;

pub const DEFAULT_BINS: usize = 50;
pub const DEFAULT_PLANAR_BINS: usize = 128;
/// Auto-fitted ranges are widened by this fraction of the data span on each side.
pub const RANGE_PADDING: f64 = 0.02;
/// Eigenvalues (or singular values) below this modulus count as exact zeros.
pub const ATOM_THRESHOLD: f64 = 1e-8;
/// Points this close to a contour count as inside it.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;
const MIN_AREA: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    Radial,
    MarginalX,
    MarginalY,
    Planar2D,
    SingularSquared,
}

/// Binned density. For planar histograms `counts` and `normalized` are
/// row-major with `y` as the slow index.
///
/// `normalized` is the continuous part: values below [`ATOM_THRESHOLD`]
/// stay in `counts` but are removed from `normalized` and reported as
/// `atom_weight`, so `Σ normalized·width + atom_weight = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub y_edges: Option<Vec<f64>>,
    pub counts: Vec<u64>,
    pub normalized: Vec<f64>,
    pub total_weight: f64,
    pub atom_weight: f64,
}

impl Histogram {
    /// 1-D histogram of `values` over `[range.0, range.1]`; values outside
    /// the range are ignored. `is_atom` marks the values removed from the
    /// continuous part.
    pub fn from_values(values: &[f64], is_atom: &[bool], range: (f64, f64), bins: usize) -> Result<Self> {
        check_range(range, bins)?;
        let edges = linear_edges(range, bins);
        let mut counts = vec![0u64; bins];
        let mut atoms = vec![0u64; bins];
        for (i, &v) in values.iter().enumerate() {
            if let Some(b) = bin_index(v, range, bins) {
                counts[b] += 1;
                if is_atom.get(i).copied().unwrap_or(false) {
                    atoms[b] += 1;
                }
            }
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyInput("no values inside the histogram range"));
        }
        let n_atoms: u64 = atoms.iter().sum();
        let normalized = (0..bins)
            .map(|b| (counts[b] - atoms[b]) as f64 / (total as f64 * (edges[b + 1] - edges[b])))
            .collect();
        Ok(Histogram {
            edges,
            y_edges: None,
            counts,
            normalized,
            total_weight: total as f64,
            atom_weight: n_atoms as f64 / total as f64,
        })
    }

    /// 2-D histogram of complex values.
    pub fn planar(
        values: &[Complex64],
        x_range: (f64, f64),
        y_range: (f64, f64),
        bins: usize,
    ) -> Result<Self> {
        check_range(x_range, bins)?;
        check_range(y_range, bins)?;
        let edges = linear_edges(x_range, bins);
        let y_edges = linear_edges(y_range, bins);
        let mut counts = vec![0u64; bins * bins];
        let mut atoms = vec![0u64; bins * bins];
        for v in values {
            if let (Some(ix), Some(iy)) = (bin_index(v.re, x_range, bins), bin_index(v.im, y_range, bins)) {
                counts[iy * bins + ix] += 1;
                if v.norm() < ATOM_THRESHOLD {
                    atoms[iy * bins + ix] += 1;
                }
            }
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyInput("no values inside the histogram range"));
        }
        let n_atoms: u64 = atoms.iter().sum();
        let mut normalized = vec![0.0; bins * bins];
        for iy in 0..bins {
            for ix in 0..bins {
                let area = (edges[ix + 1] - edges[ix]) * (y_edges[iy + 1] - y_edges[iy]);
                let k = iy * bins + ix;
                normalized[k] = (counts[k] - atoms[k]) as f64 / (total as f64 * area);
            }
        }
        Ok(Histogram {
            edges,
            y_edges: Some(y_edges),
            counts,
            normalized,
            total_weight: total as f64,
            atom_weight: n_atoms as f64 / total as f64,
        })
    }

    pub fn bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_planar(&self) -> bool {
        self.y_edges.is_some()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Continuous mass, `Σ normalized·width` (times height for planar).
    pub fn continuous_mass(&self) -> f64 {
        match &self.y_edges {
            None => self.normalized.iter().zip(self.widths()).map(|(d, w)| d * w).sum(),
            Some(ye) => {
                let nx = self.bins();
                self.normalized
                    .iter()
                    .enumerate()
                    .map(|(k, d)| {
                        let (ix, iy) = (k % nx, k / nx);
                        d * (self.edges[ix + 1] - self.edges[ix]) * (ye[iy + 1] - ye[iy])
                    })
                    .sum()
            }
        }
    }

    /// Indices of the `k` bins whose midpoints are closest to `x`.
    pub fn bins_nearest(&self, x: f64, k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.bins()).collect();
        let mids = self.midpoints();
        idx.sort_by(|&a, &b| (mids[a] - x).abs().total_cmp(&(mids[b] - x).abs()).then(a.cmp(&b)));
        idx.truncate(k);
        idx
    }
}

fn check_range(range: (f64, f64), bins: usize) -> Result<()> {
    if bins == 0 {
        return Err(Error::InvalidParameter("histograms need at least one bin".into()));
    }
    if !(range.0 < range.1) || !range.0.is_finite() || !range.1.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid histogram range [{}, {}]", range.0, range.1)));
    }
    Ok(())
}

fn linear_edges(range: (f64, f64), bins: usize) -> Vec<f64> {
    let w = (range.1 - range.0) / bins as f64;
    (0..=bins)
        .map(|i| if i == bins { range.1 } else { range.0 + i as f64 * w })
        .collect()
}

fn bin_index(v: f64, range: (f64, f64), bins: usize) -> Option<usize> {
    if !(v >= range.0 && v <= range.1) {
        return None;
    }
    let b = ((v - range.0) / (range.1 - range.0) * bins as f64) as usize;
    Some(b.min(bins - 1))
}

/// Data range widened by [`RANGE_PADDING`] of the span on each side.
pub fn padded_range(values: impl IntoIterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        return None;
    }
    let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
    Some((lo - RANGE_PADDING * span, hi + RANGE_PADDING * span))
}

fn pooled_eigenvalues(samples: &[SpectrumSample]) -> Vec<Complex64> {
    samples.iter().flat_map(|s| s.eigenvalues.values.iter().copied()).collect()
}

/// Scalar values binned by a 1-D mode, with their atom flags.
fn mode_values(samples: &[SpectrumSample], mode: DensityMode) -> (Vec<f64>, Vec<bool>) {
    if mode == DensityMode::SingularSquared {
        let s: Vec<f64> = samples.iter().flat_map(|s| s.singular_values.iter().copied()).collect();
        return (s.iter().map(|v| v * v).collect(), s.iter().map(|v| v.abs() < ATOM_THRESHOLD).collect());
    }
    let ev = pooled_eigenvalues(samples);
    let values = ev
        .iter()
        .map(|l| match mode {
            DensityMode::Radial => l.norm(),
            DensityMode::MarginalX => l.re,
            _ => l.im,
        })
        .collect();
    (values, ev.iter().map(|l| l.norm() < ATOM_THRESHOLD).collect())
}

/// Pooled histogram over an automatically fitted range.
pub fn empirical_density(samples: &[SpectrumSample], mode: DensityMode, bins: usize) -> Result<Histogram> {
    empirical_density_in(samples, mode, bins, None)
}

/// Pooled histogram; `range` overrides the fitted range (for planar mode it
/// is used for both axes).
pub fn empirical_density_in(
    samples: &[SpectrumSample],
    mode: DensityMode,
    bins: usize,
    range: Option<(f64, f64)>,
) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    if bins < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 bins, got {bins}")));
    }
    if mode == DensityMode::Planar2D {
        let ev = pooled_eigenvalues(samples);
        let xr = range.or_else(|| padded_range(ev.iter().map(|l| l.re))).ok_or(Error::EmptyInput("eigenvalues"))?;
        let yr = range.or_else(|| padded_range(ev.iter().map(|l| l.im))).ok_or(Error::EmptyInput("eigenvalues"))?;
        return Histogram::planar(&ev, xr, yr, bins);
    }
    let (values, atoms) = mode_values(samples, mode);
    if values.is_empty() {
        return Err(Error::EmptyInput(if mode == DensityMode::SingularSquared {
            "singular values"
        } else {
            "eigenvalues"
        }));
    }
    let range = range.or_else(|| padded_range(values.iter().copied())).ok_or(Error::EmptyInput("values"))?;
    Histogram::from_values(&values, &atoms, range, bins)
}

/// Winding number of a closed polygon around `p`.
fn winding_number(p: Complex64, poly: &[Complex64]) -> i32 {
    let n = poly.len();
    let mut w = 0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let side = (b.re - a.re) * (p.im - a.im) - (p.re - a.re) * (b.im - a.im);
        if a.im <= p.im {
            if b.im > p.im && side > 0.0 {
                w += 1;
            }
        } else if b.im <= p.im && side < 0.0 {
            w -= 1;
        }
    }
    w
}

fn near_boundary(p: Complex64, poly: &[Complex64], tol: f64) -> bool {
    let n = poly.len();
    (0..n).any(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let ab = b - a;
        let len = ab.norm_sqr();
        let t = if len == 0.0 { 0.0 } else { (((p - a) * ab.conj()).re / len).clamp(0.0, 1.0) };
        (p - (a + ab * t)).norm() <= tol
    })
}

/// Fraction of `points` inside the closed polygon `poly`.
pub fn containment_of_points(points: &[Complex64], poly: &[Complex64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput("points"));
    }
    if poly.len() < MIN_POINTS {
        return Err(Error::InvalidParameter(format!(
            "contour needs at least {MIN_POINTS} points, got {}",
            poly.len()
        )));
    }
    let area = polygon_area(poly).abs();
    if !(area >= MIN_AREA) {
        return Err(Error::DegenerateContour { area });
    }
    let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in poly {
        lo_re = lo_re.min(p.re);
        hi_re = hi_re.max(p.re);
        lo_im = lo_im.min(p.im);
        hi_im = hi_im.max(p.im);
    }
    let tol = BOUNDARY_TOLERANCE;
    let inside = points
        .iter()
        .filter(|p| {
            if p.re < lo_re - tol || p.re > hi_re + tol || p.im < lo_im - tol || p.im > hi_im + tol {
                return false;
            }
            winding_number(**p, poly) != 0 || near_boundary(**p, poly, tol)
        })
        .count();
    Ok(inside as f64 / points.len() as f64)
}

/// Fraction of pooled eigenvalues inside `contour`.
pub fn containment_fraction(samples: &[SpectrumSample], contour: &ContourCurve) -> Result<f64> {
    containment_of_points(&pooled_eigenvalues(samples), &contour.points)
}

/// `Σ_bins |h − model(midpoint)| · width` for a 1-D histogram, skipping the
/// bins listed in `exclude`. Planar histograms give NaN.
pub fn l1_distance_excluding(h: &Histogram, model: impl Fn(f64) -> f64, exclude: &[usize]) -> f64 {
    if h.is_planar() {
        return f64::NAN;
    }
    h.midpoints()
        .into_iter()
        .zip(h.widths())
        .zip(&h.normalized)
        .enumerate()
        .filter(|(i, _)| !exclude.contains(i))
        .map(|(_, ((mid, w), d))| (d - model(mid)).abs() * w)
        .sum()
}

pub fn l1_distance(h: &Histogram, model: impl Fn(f64) -> f64) -> f64 {
    l1_distance_excluding(h, model, &[])
}

/// One quantitative check, serialized as `{metric, value, threshold, pass}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub metric: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn at_most(metric: impl Into<String>, value: f64, threshold: f64) -> Self {
        ComparisonReport {
            metric: metric.into(),
            value,
            threshold,
            pass: value < threshold,
        }
    }

    pub fn at_least(metric: impl Into<String>, value: f64, threshold: f64) -> Self {
        ComparisonReport {
            metric: metric.into(),
            value,
            threshold,
            pass: value >= threshold,
        }
    }
}
