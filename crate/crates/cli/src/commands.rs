//! `run` and `contour` commands plus helpers shared with the figures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nswishart::analytics::{
    ellipse_contour, general_contour, marginal_density, radial_density, spectrum_contour, Axis, ContourCurve,
    DensityModel,
};
use nswishart::output::{write_contour, write_curve, write_eigenvalues, write_histogram, write_singular_values};
use nswishart::sampling::run_ensemble;
use nswishart::stats::{containment_fraction, empirical_density, l1_distance, ComparisonReport, DensityMode, Histogram};
use nswishart::{make_eta, EtaKind, EtaMatrix, EtaSpec, SpectrumSample};
use serde::Serialize;

use crate::config::{eta_field, ExperimentConfig, MethodChoice};
use crate::error::{CliError, CliResult};
use crate::staging::{sha256_hex, FileRecord, Staging};
use crate::svg::{Plot, Series};

/// Points on model curves written next to histograms.
pub const CURVE_POINTS: usize = 200;
/// Reference thresholds reported in `comparison.json` by `run`.
pub const CONTAINMENT_REFERENCE: f64 = 0.97;
pub const RADIAL_L1_REFERENCE: f64 = 0.08;
pub const MARGINAL_L1_REFERENCE: f64 = 0.10;

#[derive(Serialize)]
pub struct PanelRecord {
    pub name: String,
    pub n: usize,
    pub t: usize,
    pub realizations: usize,
    pub seed: u64,
    pub eta: EtaKind,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    master_seed: u64,
    config_sha256: String,
    config: &'a C,
    panels: &'a [PanelRecord],
    files: Vec<FileRecord>,
}

/// Writes `manifest.json` (hash of the resolved config, seeds, versions and
/// file digests) and commits the staged outputs.
pub fn finish<C: Serialize>(
    mut staging: Staging,
    command: &str,
    master_seed: u64,
    config: &C,
    panels: &[PanelRecord],
) -> CliResult<Vec<PathBuf>> {
    let canonical = serde_json::to_vec(config).map_err(|e| CliError::Io(e.to_string()))?;
    let manifest = Manifest {
        tool: "nswishart",
        version: env!("CARGO_PKG_VERSION"),
        command,
        master_seed,
        config_sha256: sha256_hex(&canonical),
        config,
        panels,
        files: staging.records()?,
    };
    staging.write_json("manifest.json", &manifest)?;
    staging.commit()
}

pub fn write_samples(staging: &mut Staging, name: &str, samples: &[SpectrumSample]) -> CliResult<()> {
    staging.write(name, |w| Ok(write_eigenvalues(w, samples)?))
}

pub fn write_contour_file(staging: &mut Staging, name: &str, curve: &ContourCurve) -> CliResult<()> {
    staging.write(name, |w| Ok(write_contour(w, curve)?))
}

pub fn write_histogram_file(staging: &mut Staging, name: &str, h: &Histogram) -> CliResult<()> {
    staging.write(name, |w| Ok(write_histogram(w, h)?))
}

/// `f` sampled on [`CURVE_POINTS`] points spanning the histogram range.
pub fn model_curve(h: &Histogram, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let (lo, hi) = (h.edges[0], h.edges[h.edges.len() - 1]);
    (0..CURVE_POINTS)
        .map(|k| {
            let x = lo + (hi - lo) * k as f64 / (CURVE_POINTS - 1) as f64;
            (x, f(x))
        })
        .collect()
}

pub fn write_curve_file(staging: &mut Staging, name: &str, points: &[(f64, f64)]) -> CliResult<()> {
    staging.write(name, |w| Ok(write_curve(w, points)?))
}

/// Contour for `eta` by the requested method; `None` when skipped.
pub fn choose_contour(
    kind: &EtaKind,
    eta: &EtaMatrix,
    kappa: f64,
    method: MethodChoice,
    points: usize,
) -> CliResult<Option<ContourCurve>> {
    let diagonal = match kind {
        EtaKind::Zero => Some(0.0),
        EtaKind::Diagonal { c } => Some(*c),
        _ => None,
    };
    let curve = match method {
        MethodChoice::None => return Ok(None),
        MethodChoice::Ellipse => match diagonal {
            Some(c) => ellipse_contour(c, kappa, points)?,
            None => return Err(CliError::Config("method ellipse needs a zero or diagonal eta".into())),
        },
        MethodChoice::Spectrum => {
            if !eta.is_normal() {
                return Err(CliError::Config("method spectrum needs a normal eta (eta commuting with its transpose)".into()));
            }
            spectrum_contour(&eta.eigenvalues()?, kappa, points)?
        }
        MethodChoice::Levelset => general_contour(eta, kappa, points)?,
        MethodChoice::Auto => match diagonal {
            Some(c) => ellipse_contour(c, kappa, points)?,
            None if eta.is_normal() => spectrum_contour(&eta.eigenvalues()?, kappa, points)?,
            None => general_contour(eta, kappa, points)?,
        },
    };
    Ok(Some(curve))
}

pub struct RunOverrides {
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub out: Option<PathBuf>,
    pub svg: bool,
}

pub fn cmd_run(config_path: &Path, overrides: RunOverrides) -> CliResult<Vec<PathBuf>> {
    let text = fs::read_to_string(config_path).map_err(|e| CliError::Io(format!("{}: {e}", config_path.display())))?;
    let mut config = ExperimentConfig::parse(&text)?;
    if let Some(s) = overrides.seed {
        config.seed = s;
    }
    if let Some(r) = overrides.realizations {
        config.realizations = r;
    }
    if let Some(o) = overrides.out {
        config.output_dir = Some(o);
    }
    config.emit_svg |= overrides.svg;
    config.check()?;

    let ensemble = config.ensemble();
    let eta = make_eta(&ensemble.eta)?;
    let kappa = ensemble.kappa();
    let a = &config.analytics;
    // resolve the contour before the expensive sampling so bad methods fail fast
    let contour = choose_contour(&config.eta, &eta, kappa, a.contour_method, a.n_points)?;

    let target = config.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let mut staging = Staging::new(&target)?;
    let samples = run_ensemble(&ensemble)?;
    write_samples(&mut staging, "eigenvalues.csv", &samples)?;
    if config.singular_values {
        staging.write("singular_values.csv", |w| Ok(write_singular_values(w, &samples)?))?;
        let h = empirical_density(&samples, DensityMode::SingularSquared, a.bins)?;
        write_histogram_file(&mut staging, "singular_squared_histogram.csv", &h)?;
    }

    let mut reports = Vec::new();
    if let Some(curve) = &contour {
        write_contour_file(&mut staging, "contour.csv", curve)?;
        let frac = containment_fraction(&samples, curve)?;
        reports.push(ComparisonReport::at_least("containment_fraction", frac, CONTAINMENT_REFERENCE));
    }

    let model = match config.eta {
        EtaKind::Zero => Some(DensityModel::new(0.0, kappa)?),
        EtaKind::Diagonal { c } => Some(DensityModel::new(c, kappa)?),
        _ => None,
    };
    let modes = [
        ("radial", DensityMode::Radial, None, RADIAL_L1_REFERENCE),
        ("marginal_x", DensityMode::MarginalX, Some(Axis::X), MARGINAL_L1_REFERENCE),
        ("marginal_y", DensityMode::MarginalY, Some(Axis::Y), MARGINAL_L1_REFERENCE),
    ];
    for (label, mode, axis, reference) in modes {
        let h = empirical_density(&samples, mode, a.bins)?;
        write_histogram_file(&mut staging, &format!("{label}_histogram.csv"), &h)?;
        if let Some(m) = &model {
            let f = |t: f64| match axis {
                None => radial_density(t, m, a.quad_points),
                Some(ax) => marginal_density(ax, t, m, a.quad_points),
            };
            write_curve_file(&mut staging, &format!("{label}_model.csv"), &model_curve(&h, f))?;
            reports.push(ComparisonReport::at_most(format!("{label}_l1"), l1_distance(&h, f), reference));
        }
    }
    staging.write_json("comparison.json", &reports)?;

    if config.emit_svg {
        let pooled: Vec<_> = samples.iter().flat_map(|s| s.eigenvalues.values.iter().copied()).collect();
        let mut series = vec![Series::dots(&pooled, "black")];
        if let Some(curve) = &contour {
            series.push(Series::contour(&curve.points, "red", false));
        }
        staging.write_str("eigenvalues.svg", &Plot::plane("eigenvalues", series).render())?;
    }

    let panel = PanelRecord {
        name: "run".into(),
        n: ensemble.n,
        t: ensemble.t,
        realizations: ensemble.realizations,
        seed: ensemble.master_seed,
        eta: config.eta.clone(),
    };
    // where the outputs live is not part of what they contain
    let recorded = ExperimentConfig {
        output_dir: None,
        ..config.clone()
    };
    finish(staging, "run", config.seed, &recorded, &[panel])
}

pub struct ContourArgs {
    pub eta: String,
    pub n: usize,
    pub kappa: f64,
    pub method: MethodChoice,
    pub points: usize,
    pub out: Option<PathBuf>,
}

pub fn cmd_contour(args: ContourArgs) -> CliResult<()> {
    let value: serde_json::Value =
        serde_json::from_str(&args.eta).map_err(|e| CliError::Config(format!("--eta is not valid JSON: {e}")))?;
    let kind = eta_field(value).map_err(|e| CliError::Config(format!("--eta: {e}")))?;
    if args.method == MethodChoice::None {
        return Err(CliError::Config("contour needs a method other than none".into()));
    }
    let eta = make_eta(&EtaSpec::new(kind.clone(), args.n))?;
    let curve = choose_contour(&kind, &eta, args.kappa, args.method, args.points)?.expect("method is not none");
    let mut buf = Vec::new();
    write_contour(&mut buf, &curve)?;
    match args.out {
        Some(path) => fs::write(&path, &buf).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}
