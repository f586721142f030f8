//! Full-scale (N = 512) acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails that is not listed in
//! [`KNOWN_UNATTAINABLE`].

mod common;

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::Instant;

use nswishart::analytics::{
    ellipse_contour, general_contour, hausdorff_distance, marginal_density, mp_density, mp_support, radial_density,
    spectrum_contour, tridiag_contour, Axis, DensityModel, TridiagVariant, DEFAULT_QUAD_POINTS,
};
use nswishart::correlation::tridiagonal_spectrum;
use nswishart::sampling::{run_ensemble, SpectrumOptions};
use nswishart::stats::{
    containment_fraction, containment_of_points, empirical_density, l1_distance, l1_distance_excluding, padded_range,
    DensityMode,
};
use nswishart::{make_eta, EnsembleConfig, EtaKind, EtaSpec, Result, SpectrumSample};
use num_complex::Complex64;

const N: usize = 512;
const T: usize = 1024;
const KAPPA: f64 = 0.5;
const POINTS: usize = 256;
const BINS: usize = 50;
const DENSITY_REALIZATIONS: usize = 300;
const SIGNS: [f64; 3] = [-0.25, 0.0, 0.25];
const PANEL_C0: [f64; 4] = [0.125, 0.25, 0.3125, 0.375];

const ELLIPSE_MARGIN: f64 = 1.02;
const ELLIPSE_MIN: f64 = 0.98;
const TRIDIAG_MIN: f64 = 0.97;
const ROTATION_MAX: f64 = 1e-6;
const INVARIANCE_MAX: f64 = 1e-8;
const SENSITIVITY_MIN: f64 = 0.02;
const NONNORMAL_MIN: f64 = 0.97;
const NONNORMAL_REALIZATIONS: usize = 4;
const RADIAL_L1_MAX: f64 = 0.08;
const SIGN_MC_FACTOR: f64 = 2.0;
const MARGINAL_L1_MAX: f64 = 0.10;
const Y_EXCLUDED_BINS: usize = 2;
const MP_C: f64 = 0.9999;
const MP_REALIZATIONS: usize = 225;
const MP_L1_MAX: f64 = 0.10;
const NONREAL_SCALE: f64 = 0.01;
const NONREAL_RANGE: (f64, f64) = (0.01, 0.05);
const RANK_T: usize = 256;
const RANK_REALIZATIONS: usize = 4;
const ZERO_TOL: f64 = 1e-8;
const ATOM_TOL: f64 = 1e-12;
const OUTLIER_NC: f64 = 0.9;
const OUTLIER_REALIZATIONS: usize = 50;
const OUTLIER_REL: f64 = 0.10;
const BULK_MIN: f64 = 0.98;
const GAUSS_MAX: f64 = 1e-4;
const MASS_TOL: f64 = 1e-3;
const SCHUR_SYSTEMS: usize = 200;
const SCHUR_MAX: f64 = 1e-9;
const COMPANION_MAX: f64 = 1e-8;
const COVARIANCE_Z_MAX: f64 = 5.0;

/// Criteria recorded as unattainable in the decisions ledger; they still
/// print FAIL but do not fail the process.
const KNOWN_UNATTAINABLE: &[&str] = &["6b"];

struct Line {
    id: &'static str,
    label: String,
    value: f64,
    relation: String,
    pass: bool,
}

impl Line {
    fn lt(id: &'static str, label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::make(id, label, value, format!("< {}", show(bound)), value < bound)
    }

    fn le(id: &'static str, label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::make(id, label, value, format!("<= {}", show(bound)), value <= bound)
    }

    fn gt(id: &'static str, label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::make(id, label, value, format!("> {}", show(bound)), value > bound)
    }

    fn ge(id: &'static str, label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::make(id, label, value, format!(">= {}", show(bound)), value >= bound)
    }

    fn within(id: &'static str, label: impl Into<String>, value: f64, range: (f64, f64)) -> Self {
        let pass = value >= range.0 && value <= range.1;
        Self::make(id, label, value, format!("in [{}, {}]", show(range.0), show(range.1)), pass)
    }

    fn make(id: &'static str, label: impl Into<String>, value: f64, relation: String, pass: bool) -> Self {
        Line { id, label: label.into(), value, relation, pass }
    }

    fn print(&self) {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        println!("{tag}  [{:<2}] {}: {:.6e} {}", self.id, self.label, self.value, self.relation);
    }
}

fn show(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn ensemble(kind: EtaKind, n: usize, t: usize, realizations: usize, seed: u64) -> Result<Vec<SpectrumSample>> {
    let config = EnsembleConfig::new(n, t, realizations, seed, EtaSpec::new(kind, n))
        .with_spectrum(SpectrumOptions::eigenvalues_only());
    run_ensemble(&config)
}

fn pooled(samples: &[SpectrumSample]) -> Vec<Complex64> {
    samples.iter().flat_map(|s| s.eigenvalues.values.iter().copied()).collect()
}

struct DiagonalEnsembles {
    by_c: Vec<(f64, Vec<SpectrumSample>)>,
}

fn criterion_1(data: &DiagonalEnsembles) -> Result<Vec<Line>> {
    let mut lines = Vec::new();
    for (c, samples) in &data.by_c {
        let center = Complex64::new(c * (1.0 + KAPPA), 0.0);
        let contour = ellipse_contour(*c, KAPPA, POINTS)?.scaled_about(center, ELLIPSE_MARGIN);
        let frac = containment_fraction(&samples[..1], &contour)?;
        lines.push(Line::ge("1", format!("ellipse containment c={c} (1 realization, 2% margin)"), frac, ELLIPSE_MIN));
    }
    Ok(lines)
}

fn criterion_2() -> Result<Vec<Line>> {
    let mut lines = Vec::new();
    let panels = [
        ("fig2", 0.25, TridiagVariant::Symmetric),
        ("fig3", 0.0, TridiagVariant::AntiCommuting),
        ("fig4", 0.25, TridiagVariant::AntiCommuting),
    ];
    for (seed, (fig, c, variant)) in panels.iter().enumerate() {
        for (k, c0) in PANEL_C0.iter().enumerate() {
            let q = match variant {
                TridiagVariant::Symmetric => *c0,
                TridiagVariant::AntiCommuting => -c0,
            };
            let kind = EtaKind::Tridiagonal { c: *c, p: *c0, q };
            let samples = ensemble(kind, N, T, 1, 200 + 10 * seed as u64 + k as u64)?;
            let contour = tridiag_contour(*c, *c0, KAPPA, *variant, POINTS)?;
            let frac = containment_fraction(&samples, &contour)?;
            lines.push(Line::ge("2", format!("{fig} c={c} c0={c0} containment"), frac, TRIDIAG_MIN));
        }
    }
    let mut worst: f64 = 0.0;
    for c0 in PANEL_C0 {
        let anti = tridiag_contour(0.0, c0, KAPPA, TridiagVariant::AntiCommuting, POINTS)?;
        let sym = tridiag_contour(0.0, c0, KAPPA, TridiagVariant::Symmetric, POINTS)?;
        let rotated: Vec<Complex64> = sym.points.iter().map(|z| z * Complex64::i()).collect();
        worst = worst.max(hausdorff_distance(&anti.points, &rotated));
    }
    lines.push(Line::le("2", "case (iii) = case (ii) rotated by pi/2, max Hausdorff over c0", worst, ROTATION_MAX));
    Ok(lines)
}

fn criterion_3() -> Result<Vec<Line>> {
    let mut lines = Vec::new();
    let twin = 0.125f64.sqrt();
    let symmetric = tridiagonal_spectrum(0.25, twin, twin, N);
    // same multiset, listed in reverse, from the nonsymmetric (1/4, 1/4, 1/2) matrix
    let mut other: Vec<Complex64> = tridiagonal_spectrum(0.25, 0.25, 0.5, N);
    other.reverse();
    let a = spectrum_contour(&symmetric, KAPPA, POINTS)?;
    let b = spectrum_contour(&other, KAPPA, POINTS)?;
    let gap = a.points.iter().zip(&b.points).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    lines.push(Line::le("3", "spectrum contours for equal spectra, max pointwise gap", gap, INVARIANCE_MAX));

    let nonnormal = make_eta(&EtaSpec::new(EtaKind::Tridiagonal { c: 0.25, p: 0.25, q: 0.5 }, N))?;
    let contour = general_contour(&nonnormal, KAPPA, POINTS)?;
    let d = hausdorff_distance(&contour.points, &a.points);
    lines.push(Line::gt("3", "nonnormal vs equal-spectrum normal contour, Hausdorff", d, SENSITIVITY_MIN));

    let kind = EtaKind::Tridiagonal { c: 0.25, p: 0.25, q: 0.5 };
    let samples = ensemble(kind, N, T, NONNORMAL_REALIZATIONS, 300)?;
    let frac = containment_fraction(&samples, &contour)?;
    lines.push(Line::ge("3", "nonnormal contour containment (4 realizations)", frac, NONNORMAL_MIN));
    Ok(lines)
}

/// Per-realization bin masses of `value(λ)` over a fixed range.
fn realization_masses(
    samples: &[SpectrumSample],
    value: impl Fn(Complex64) -> f64,
    range: (f64, f64),
    bins: usize,
) -> Vec<Vec<f64>> {
    samples
        .iter()
        .map(|s| {
            let mut m = vec![0.0; bins];
            let w = 1.0 / s.eigenvalues.len() as f64;
            for l in &s.eigenvalues.values {
                let v = value(*l);
                if v >= range.0 && v <= range.1 {
                    let b = (((v - range.0) / (range.1 - range.0)) * bins as f64) as usize;
                    m[b.min(bins - 1)] += w;
                }
            }
            m
        })
        .collect()
}

/// Mean and standard error of the mean per bin.
fn mean_and_se(masses: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let r = masses.len() as f64;
    let bins = masses[0].len();
    let mean: Vec<f64> = (0..bins).map(|b| masses.iter().map(|m| m[b]).sum::<f64>() / r).collect();
    let se = (0..bins)
        .map(|b| {
            let var = masses.iter().map(|m| (m[b] - mean[b]).powi(2)).sum::<f64>() / (r - 1.0);
            (var / r).sqrt()
        })
        .collect();
    (mean, se)
}

fn criterion_4(data: &DiagonalEnsembles) -> Result<Vec<Line>> {
    let mut lines = Vec::new();
    for (c, samples) in &data.by_c {
        let model = DensityModel::new(*c, KAPPA)?;
        let h = empirical_density(samples, DensityMode::Radial, BINS)?;
        let l1 = l1_distance(&h, |r| radial_density(r, &model, DEFAULT_QUAD_POINTS));
        lines.push(Line::lt("4", format!("radial L1 c={c} (300 realizations)"), l1, RADIAL_L1_MAX));
    }

    let plus = &data.by_c.iter().find(|(c, _)| *c > 0.0).unwrap().1;
    let minus = &data.by_c.iter().find(|(c, _)| *c < 0.0).unwrap().1;
    let hi = padded_range(pooled(plus).iter().chain(pooled(minus).iter()).map(|l| l.norm())).unwrap().1;
    let range = (0.0, hi);
    let (mp, sp) = mean_and_se(&realization_masses(plus, |l| l.norm(), range, BINS));
    let (mm, sm) = mean_and_se(&realization_masses(minus, |l| l.norm(), range, BINS));
    let observed: f64 = mp.iter().zip(&mm).map(|(a, b)| (a - b).abs()).sum();
    // expected L1 of pure Monte-Carlo noise: Σ σ_b √(2/π)
    let expected: f64 = sp.iter().zip(&sm).map(|(a, b)| (a * a + b * b).sqrt() / FRAC_PI_2.sqrt()).sum();
    lines.push(Line::le(
        "4",
        "radial histograms c=+1/4 vs c=-1/4, L1 / expected Monte-Carlo L1",
        observed / expected,
        SIGN_MC_FACTOR,
    ));
    Ok(lines)
}

fn criterion_5(data: &DiagonalEnsembles) -> Result<Vec<Line>> {
    let mut lines = Vec::new();
    for (c, samples) in &data.by_c {
        let model = DensityModel::new(*c, KAPPA)?;
        let hx = empirical_density(samples, DensityMode::MarginalX, BINS)?;
        let l1x = l1_distance(&hx, |x| marginal_density(Axis::X, x, &model, DEFAULT_QUAD_POINTS));
        lines.push(Line::lt("5", format!("marginal X L1 c={c}"), l1x, MARGINAL_L1_MAX));
        let hy = empirical_density(samples, DensityMode::MarginalY, BINS)?;
        let excluded = hy.bins_nearest(0.0, Y_EXCLUDED_BINS);
        let l1y = l1_distance_excluding(&hy, |y| marginal_density(Axis::Y, y, &model, DEFAULT_QUAD_POINTS), &excluded);
        lines.push(Line::lt("5", format!("marginal Y L1 c={c} (2 bins nearest y=0 excluded)"), l1y, MARGINAL_L1_MAX));
    }
    Ok(lines)
}

fn criterion_6() -> Result<Vec<Line>> {
    let samples = ensemble(EtaKind::Diagonal { c: MP_C }, N, T, MP_REALIZATIONS, 600)?;
    let h = empirical_density(&samples, DensityMode::MarginalX, BINS)?;
    let l1 = l1_distance(&h, |x| mp_density(x, KAPPA));
    let all = pooled(&samples);
    let x_plus = mp_support(KAPPA).1;
    let count = |cut: f64| all.iter().filter(|l| l.im.abs() > cut).count() as f64 / all.len() as f64;
    let nonreal = count(NONREAL_SCALE * x_plus);
    let max_im = all.iter().map(|l| l.im.abs()).fold(0.0, f64::max);
    println!(
        "info  [6 ] c={MP_C}: fraction with Im != 0 = {:.4}, max |Im| = {:.3e} = {:.3e} x+",
        count(0.0),
        max_im,
        max_im / x_plus
    );
    Ok(vec![
        Line::lt("6a", "Marchenko-Pastur L1 of real parts (225 realizations)", l1, MP_L1_MAX),
        Line::within("6b", "fraction with |Im| > 0.01 x+", nonreal, NONREAL_RANGE),
    ])
}

fn criterion_7() -> Result<Vec<Line>> {
    let samples = ensemble(EtaKind::Diagonal { c: 0.25 }, N, RANK_T, RANK_REALIZATIONS, 700)?;
    let expected = N - RANK_T;
    let off = samples
        .iter()
        .filter(|s| s.eigenvalues.values.iter().filter(|l| l.norm() < ZERO_TOL).count() != expected)
        .count();
    let h = empirical_density(&samples, DensityMode::Radial, BINS)?;
    Ok(vec![
        Line::le("7", "realizations without exactly N-T zero eigenvalues", off as f64, 0.0),
        Line::le("7", "|atom weight - 0.5|", (h.atom_weight - 0.5).abs(), ATOM_TOL),
    ])
}

fn criterion_8() -> Result<Vec<Line>> {
    let c = OUTLIER_NC / N as f64;
    let samples = ensemble(EtaKind::EqualCross { c }, N, T, OUTLIER_REALIZATIONS, 800)?;
    let mut outliers = 0.0;
    let mut bulk = Vec::new();
    for s in &samples {
        let (k, top) = s
            .eigenvalues
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.re.total_cmp(&b.1.re))
            .unwrap();
        outliers += top.re;
        bulk.extend(s.eigenvalues.values.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, l)| *l));
    }
    let mean = outliers / samples.len() as f64;
    let circle = ellipse_contour(0.0, KAPPA, POINTS)?;
    let frac = containment_of_points(&bulk, &circle.points)?;
    Ok(vec![
        Line::lt("8", format!("|mean outlier - Nc| / Nc (mean {mean:.4})"), (mean - OUTLIER_NC).abs() / OUTLIER_NC, OUTLIER_REL),
        Line::ge("8", "bulk containment in sqrt(kappa) circle", frac, BULK_MIN),
    ])
}

fn criterion_9() -> Result<Vec<Line>> {
    let grid_c = [0.0, 0.25, -0.25, 0.5, -0.5];
    let grid_k = [0.25, 0.5, 1.0];
    let mut gauss: f64 = 0.0;
    let mut mass: f64 = 0.0;
    for c in grid_c {
        for k in grid_k {
            gauss = gauss.max(common::gauss_law_error(c, k));
            mass = mass.max((common::density_mass(c, k) - 1.0).abs());
        }
    }
    let same = common::ensemble_csv(1) == common::ensemble_csv(8);
    let cov = common::covariance_report(32, 64, 500, 11);
    Ok(vec![
        Line::le("9", "Gauss law |dg/dz* - pi rho| over (c, kappa) grid", gauss, GAUSS_MAX),
        Line::le("9", "|density mass - 1| over (c, kappa) grid", mass, MASS_TOL),
        Line::le("9", "Schur blocks vs direct inverse (200 systems)", common::schur_vs_direct(SCHUR_SYSTEMS), SCHUR_MAX),
        Line::le("9", "eigensolver vs companion roots", common::companion_root_error(), COMPANION_MAX),
        Line::le("9", "covariance identities max z (n=32, t=64, R=500)", cov.value, COVARIANCE_Z_MAX),
        Line::le("9", "eigenvalue CSV differs between 1 and 8 workers", if same { 0.0 } else { 1.0 }, 0.0),
    ])
}

fn report(id: &str, result: Result<Vec<Line>>, lines: &mut Vec<Line>, errors: &mut usize) {
    match result {
        Ok(ls) => {
            for l in ls {
                l.print();
                lines.push(l);
            }
        }
        Err(e) => {
            println!("FAIL  [{id:<2}] error: {e}");
            *errors += 1;
        }
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut lines: Vec<Line> = Vec::new();
    let mut errors = 0;
    let diag: Result<DiagonalEnsembles> = SIGNS
        .iter()
        .enumerate()
        .map(|(k, &c)| Ok((c, ensemble(EtaKind::Diagonal { c }, N, T, DENSITY_REALIZATIONS, 100 + k as u64)?)))
        .collect::<Result<Vec<_>>>()
        .map(|by_c| DiagonalEnsembles { by_c });
    match &diag {
        Ok(d) => {
            report("1", criterion_1(d), &mut lines, &mut errors);
            report("4", criterion_4(d), &mut lines, &mut errors);
            report("5", criterion_5(d), &mut lines, &mut errors);
        }
        Err(e) => {
            println!("FAIL  [1 ] diagonal ensembles: {e}");
            errors += 3;
        }
    }
    report("2", criterion_2(), &mut lines, &mut errors);
    report("3", criterion_3(), &mut lines, &mut errors);
    report("6", criterion_6(), &mut lines, &mut errors);
    report("7", criterion_7(), &mut lines, &mut errors);
    report("8", criterion_8(), &mut lines, &mut errors);
    report("9", criterion_9(), &mut lines, &mut errors);

    let failed: Vec<&Line> = lines.iter().filter(|l| !l.pass).collect();
    let unexpected = failed.iter().filter(|l| !KNOWN_UNATTAINABLE.contains(&l.id)).count() + errors;
    println!(
        "acceptance: {} checks, {} passed, {} failed ({} known unattainable), {:.0} s",
        lines.len(),
        lines.len() - failed.len(),
        failed.len() + errors,
        failed.len() + errors - unexpected,
        start.elapsed().as_secs_f64()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
