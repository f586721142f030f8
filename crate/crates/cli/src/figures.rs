//! Data behind each published figure, with the published parameters as
//! defaults.

use std::path::PathBuf;

use nswishart::analytics::{
    ellipse_contour, general_contour, marginal_density, mp_density, mp_support, radial_density, spectrum_contour,
    tridiag_contour, Axis, ContourCurve, DensityModel, TridiagVariant, DEFAULT_POINTS, DEFAULT_QUAD_POINTS,
};
use nswishart::correlation::tridiagonal_spectrum;
use nswishart::output::write_singular_values;
use nswishart::sampling::{run_ensemble, sub_seed, SpectrumOptions};
use nswishart::stats::{containment_fraction, empirical_density, l1_distance, ComparisonReport, DensityMode};
use nswishart::{make_eta, EnsembleConfig, EtaKind, EtaSpec, SpectrumSample};
use num_complex::Complex64;
use serde::Serialize;

use crate::commands::{
    finish, model_curve, write_contour_file, write_curve_file, write_histogram_file, write_samples, PanelRecord,
};
use crate::error::{CliError, CliResult};
use crate::staging::Staging;
use crate::svg::{Plot, Series};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FigureName {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

const DIAGONAL_C: [f64; 3] = [-0.25, 0.0, 0.25];
const PANEL_C0: [f64; 4] = [0.125, 0.25, 0.3125, 0.375];
const NONNORMAL: (f64, f64, f64) = (0.25, 0.25, 0.5);
const MP_C: f64 = 0.9999;
/// Contour and density thresholds reported in `comparison.json`.
const ELLIPSE_MARGIN: f64 = 1.02;
const ELLIPSE_MIN: f64 = 0.98;
const CONTOUR_MIN: f64 = 0.97;
const RADIAL_L1_MAX: f64 = 0.08;
const MARGINAL_L1_MAX: f64 = 0.10;

impl FigureName {
    pub fn label(self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2 => "fig2",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
            FigureName::Fig5 => "fig5",
            FigureName::Fig6 => "fig6",
            FigureName::Fig7 => "fig7",
            FigureName::Fig8 => "fig8",
            FigureName::Fig9 => "fig9",
        }
    }

    fn default_n(self) -> usize {
        if self == FigureName::Fig6 {
            1024
        } else {
            512
        }
    }

    fn default_realizations(self) -> usize {
        match self {
            FigureName::Fig1 | FigureName::Fig2 | FigureName::Fig3 | FigureName::Fig4 => 1,
            FigureName::Fig5 => 4,
            FigureName::Fig6 => 100,
            FigureName::Fig7 | FigureName::Fig8 => 300,
            FigureName::Fig9 => 225,
        }
    }
}

#[derive(Default)]
pub struct FigureOverrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub n: Option<usize>,
    pub t: Option<usize>,
    pub points: Option<usize>,
    pub bins: Option<usize>,
    pub svg: bool,
}

/// Fully resolved parameters; hashed into the manifest.
#[derive(Serialize)]
pub struct FigureConfig {
    pub figure: FigureName,
    pub n: usize,
    pub t: usize,
    pub realizations: usize,
    pub seed: u64,
    pub n_points: usize,
    pub bins: usize,
    pub quad_points: usize,
    pub svg: bool,
}

struct Ctx<'a> {
    cfg: &'a FigureConfig,
    staging: Staging,
    panels: Vec<PanelRecord>,
    reports: Vec<ComparisonReport>,
}

impl Ctx<'_> {
    fn kappa(&self) -> f64 {
        self.cfg.n as f64 / self.cfg.t as f64
    }

    /// Panel `index` draws from its own stream `sub_seed(seed, index)`.
    fn ensemble(&mut self, index: u64, name: &str, kind: EtaKind, spectrum: SpectrumOptions) -> CliResult<Vec<SpectrumSample>> {
        let cfg = self.cfg;
        let seed = sub_seed(cfg.seed, index);
        let config = EnsembleConfig::new(cfg.n, cfg.t, cfg.realizations, seed, EtaSpec::new(kind.clone(), cfg.n))
            .with_spectrum(spectrum);
        let samples = run_ensemble(&config)?;
        self.panels.push(PanelRecord {
            name: name.into(),
            n: cfg.n,
            t: cfg.t,
            realizations: cfg.realizations,
            seed,
            eta: kind,
        });
        Ok(samples)
    }

    fn svg(&mut self, name: &str, plot: Plot) -> CliResult<()> {
        if self.cfg.svg {
            self.staging.write_str(name, &plot.render())?;
        }
        Ok(())
    }

    fn containment(&mut self, metric: String, samples: &[SpectrumSample], curve: &ContourCurve, min: f64) -> CliResult<()> {
        let frac = containment_fraction(samples, curve)?;
        self.reports.push(ComparisonReport::at_least(metric, frac, min));
        Ok(())
    }
}

fn tag(x: f64) -> String {
    format!("{x}")
}

fn pooled(samples: &[SpectrumSample]) -> Vec<Complex64> {
    samples.iter().flat_map(|s| s.eigenvalues.values.iter().copied()).collect()
}

pub fn resolve(name: FigureName, o: &FigureOverrides) -> CliResult<FigureConfig> {
    let n = o.n.unwrap_or_else(|| name.default_n());
    let cfg = FigureConfig {
        figure: name,
        n,
        t: o.t.unwrap_or(2 * n),
        realizations: o.realizations.unwrap_or_else(|| name.default_realizations()),
        seed: o.seed.unwrap_or(1),
        n_points: o.points.unwrap_or(DEFAULT_POINTS),
        bins: o.bins.unwrap_or(50),
        quad_points: DEFAULT_QUAD_POINTS,
        svg: o.svg,
    };
    if cfg.n == 0 || cfg.t == 0 || cfg.realizations == 0 || cfg.bins == 0 {
        return Err(CliError::Config("n, t, realizations and bins must be >= 1".into()));
    }
    Ok(cfg)
}

pub fn cmd_figure(name: FigureName, overrides: FigureOverrides) -> CliResult<Vec<PathBuf>> {
    let cfg = resolve(name, &overrides)?;
    let target = overrides.out.clone().unwrap_or_else(|| PathBuf::from("out").join(name.label()));
    let mut ctx = Ctx {
        cfg: &cfg,
        staging: Staging::new(&target)?,
        panels: Vec::new(),
        reports: Vec::new(),
    };
    match name {
        FigureName::Fig1 => fig1(&mut ctx)?,
        FigureName::Fig2 => tridiagonal_panels(&mut ctx, 0.25, TridiagVariant::Symmetric)?,
        FigureName::Fig3 => tridiagonal_panels(&mut ctx, 0.0, TridiagVariant::AntiCommuting)?,
        FigureName::Fig4 => tridiagonal_panels(&mut ctx, 0.25, TridiagVariant::AntiCommuting)?,
        FigureName::Fig5 => fig5(&mut ctx)?,
        FigureName::Fig6 => fig6(&mut ctx)?,
        FigureName::Fig7 => fig7(&mut ctx)?,
        FigureName::Fig8 => fig8(&mut ctx)?,
        FigureName::Fig9 => fig9(&mut ctx)?,
    }
    let Ctx {
        mut staging,
        panels,
        reports,
        ..
    } = ctx;
    staging.write_json("comparison.json", &reports)?;
    finish(staging, &format!("figure {}", name.label()), cfg.seed, &cfg, &panels)
}

fn fig1(ctx: &mut Ctx) -> CliResult<()> {
    let (kappa, points) = (ctx.kappa(), ctx.cfg.n_points);
    let circle = ellipse_contour(0.0, kappa, points)?;
    write_contour_file(&mut ctx.staging, "reference_circle.csv", &circle)?;
    for (k, c) in DIAGONAL_C.into_iter().enumerate() {
        let t = tag(c);
        let samples = ctx.ensemble(k as u64, &format!("c={t}"), EtaKind::Diagonal { c }, SpectrumOptions::eigenvalues_only())?;
        let ellipse = ellipse_contour(c, kappa, points)?;
        write_samples(&mut ctx.staging, &format!("eigenvalues_c{t}.csv"), &samples)?;
        write_contour_file(&mut ctx.staging, &format!("ellipse_c{t}.csv"), &ellipse)?;
        let inflated = ellipse.scaled_about(Complex64::new(c * (1.0 + kappa), 0.0), ELLIPSE_MARGIN);
        ctx.containment(format!("containment_c{t}"), &samples, &inflated, ELLIPSE_MIN)?;
        let plot = Plot::plane(
            format!("c = {t}"),
            vec![
                Series::dots(&pooled(&samples), "black"),
                Series::contour(&ellipse.points, "black", false),
                Series::contour(&circle.points, "red", true),
            ],
        );
        ctx.svg(&format!("fig1_c{t}.svg"), plot)?;
    }
    Ok(())
}

fn tridiagonal_panels(ctx: &mut Ctx, c: f64, variant: TridiagVariant) -> CliResult<()> {
    let (kappa, points) = (ctx.kappa(), ctx.cfg.n_points);
    let circle = variant == TridiagVariant::AntiCommuting && c == 0.0;
    if circle {
        write_contour_file(&mut ctx.staging, "reference_circle.csv", &ellipse_contour(0.0, kappa, points)?)?;
    }
    for (k, c0) in PANEL_C0.into_iter().enumerate() {
        let t = tag(c0);
        let q = match variant {
            TridiagVariant::Symmetric => c0,
            TridiagVariant::AntiCommuting => -c0,
        };
        let kind = EtaKind::Tridiagonal { c, p: c0, q };
        let samples = ctx.ensemble(k as u64, &format!("c0={t}"), kind, SpectrumOptions::eigenvalues_only())?;
        let contour = tridiag_contour(c, c0, kappa, variant, points)?;
        // dashed reference: the c = 0 theory (a circle of radius √κ when c is already 0)
        let reference = if circle {
            ellipse_contour(0.0, kappa, points)?
        } else {
            tridiag_contour(0.0, c0, kappa, variant, points)?
        };
        write_samples(&mut ctx.staging, &format!("eigenvalues_c0_{t}.csv"), &samples)?;
        write_contour_file(&mut ctx.staging, &format!("contour_c0_{t}.csv"), &contour)?;
        if !circle {
            write_contour_file(&mut ctx.staging, &format!("reference_c0_{t}.csv"), &reference)?;
        }
        ctx.containment(format!("containment_c0_{t}"), &samples, &contour, CONTOUR_MIN)?;
        let plot = Plot::plane(
            format!("c = {}, c0 = {t}", tag(c)),
            vec![
                Series::dots(&pooled(&samples), "black"),
                Series::contour(&contour.points, "black", false),
                Series::contour(&reference.points, "red", true),
            ],
        );
        let label = ctx.cfg.figure.label();
        ctx.svg(&format!("{label}_c0_{t}.svg"), plot)?;
    }
    Ok(())
}

fn twin_p() -> f64 {
    (NONNORMAL.1 * NONNORMAL.2).sqrt()
}

fn fig5(ctx: &mut Ctx) -> CliResult<()> {
    let (kappa, points, n) = (ctx.kappa(), ctx.cfg.n_points, ctx.cfg.n);
    let (c, p, q) = NONNORMAL;
    let kind = EtaKind::Tridiagonal { c, p, q };
    let eta = make_eta(&EtaSpec::new(kind.clone(), n))?;
    let nonnormal = general_contour(&eta, kappa, points)?;
    let twin = spectrum_contour(&tridiagonal_spectrum(c, twin_p(), twin_p(), n), kappa, points)?;
    let samples = ctx.ensemble(0, "nonnormal", kind, SpectrumOptions::eigenvalues_only())?;
    write_samples(&mut ctx.staging, "eigenvalues_nonnormal.csv", &samples)?;
    write_contour_file(&mut ctx.staging, "contour_nonnormal.csv", &nonnormal)?;
    write_contour_file(&mut ctx.staging, "contour_normal_twin.csv", &twin)?;
    ctx.containment("containment_nonnormal".into(), &samples, &nonnormal, CONTOUR_MIN)?;
    let plot = Plot::plane(
        "nonnormal eta (black) and symmetric twin (red)",
        vec![
            Series::dots(&pooled(&samples), "black"),
            Series::contour(&nonnormal.points, "black", false),
            Series::contour(&twin.points, "red", false),
        ],
    );
    ctx.svg("fig5.svg", plot)
}

fn fig6(ctx: &mut Ctx) -> CliResult<()> {
    let (c, p, q) = NONNORMAL;
    let only_sv = SpectrumOptions {
        eigenvalues: false,
        singular_values: true,
    };
    let mut series = Vec::new();
    for (k, (name, kind, color)) in [
        ("nonnormal", EtaKind::Tridiagonal { c, p, q }, "orange"),
        ("normal_twin", EtaKind::Tridiagonal { c, p: twin_p(), q: twin_p() }, "blue"),
    ]
    .into_iter()
    .enumerate()
    {
        let samples = ctx.ensemble(k as u64, name, kind, only_sv)?;
        ctx.staging.write(&format!("singular_values_{name}.csv"), |w| Ok(write_singular_values(w, &samples)?))?;
        let h = empirical_density(&samples, DensityMode::SingularSquared, ctx.cfg.bins)?;
        write_histogram_file(&mut ctx.staging, &format!("s2_histogram_{name}.csv"), &h)?;
        series.push(Series::steps(&h, color));
    }
    ctx.svg("fig6.svg", Plot::graph("density of squared singular values", series))
}

/// The three diagonal ensembles shared by Figs. 7 and 8.
fn diagonal_ensembles(ctx: &mut Ctx) -> CliResult<Vec<(f64, Vec<SpectrumSample>)>> {
    DIAGONAL_C
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            let samples =
                ctx.ensemble(k as u64, &format!("c={}", tag(c)), EtaKind::Diagonal { c }, SpectrumOptions::eigenvalues_only())?;
            Ok((c, samples))
        })
        .collect()
}

fn fig7(ctx: &mut Ctx) -> CliResult<()> {
    let (kappa, bins, quad) = (ctx.kappa(), ctx.cfg.bins, ctx.cfg.quad_points);
    for (c, samples) in diagonal_ensembles(ctx)? {
        let t = tag(c);
        let model = DensityModel::new(c, kappa)?;
        let f = |r: f64| radial_density(r, &model, quad);
        let h = empirical_density(&samples, DensityMode::Radial, bins)?;
        let curve = model_curve(&h, f);
        write_samples(&mut ctx.staging, &format!("eigenvalues_c{t}.csv"), &samples)?;
        write_histogram_file(&mut ctx.staging, &format!("radial_histogram_c{t}.csv"), &h)?;
        write_curve_file(&mut ctx.staging, &format!("radial_model_c{t}.csv"), &curve)?;
        ctx.reports.push(ComparisonReport::at_most(format!("radial_l1_c{t}"), l1_distance(&h, f), RADIAL_L1_MAX));
        let plot = Plot::graph(format!("radial density, c = {t}"), vec![Series::steps(&h, "black"), Series::curve(curve, "red")]);
        ctx.svg(&format!("fig7_c{t}.svg"), plot)?;
    }
    Ok(())
}

fn fig8(ctx: &mut Ctx) -> CliResult<()> {
    let (kappa, bins, quad) = (ctx.kappa(), ctx.cfg.bins, ctx.cfg.quad_points);
    for (c, samples) in diagonal_ensembles(ctx)? {
        let t = tag(c);
        let model = DensityModel::new(c, kappa)?;
        for (axis, mode, label) in [(Axis::X, DensityMode::MarginalX, "x"), (Axis::Y, DensityMode::MarginalY, "y")] {
            let f = |v: f64| marginal_density(axis, v, &model, quad);
            let h = empirical_density(&samples, mode, bins)?;
            let curve = model_curve(&h, f);
            write_histogram_file(&mut ctx.staging, &format!("marginal_{label}_histogram_c{t}.csv"), &h)?;
            write_curve_file(&mut ctx.staging, &format!("marginal_{label}_model_c{t}.csv"), &curve)?;
            ctx.reports.push(ComparisonReport::at_most(
                format!("marginal_{label}_l1_c{t}"),
                l1_distance(&h, f),
                MARGINAL_L1_MAX,
            ));
            let plot = Plot::graph(
                format!("marginal {label}, c = {t}"),
                vec![Series::steps(&h, "black"), Series::curve(curve, "red")],
            );
            ctx.svg(&format!("fig8_{label}_c{t}.svg"), plot)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ImaginarySummary {
    eigenvalues: usize,
    fraction_nonreal: f64,
    fraction_above_one_percent_of_edge: f64,
    max_abs_imaginary: f64,
    upper_edge: f64,
}

fn fig9(ctx: &mut Ctx) -> CliResult<()> {
    let (kappa, bins) = (ctx.kappa(), ctx.cfg.bins);
    let samples = ctx.ensemble(0, "c=0.9999", EtaKind::Diagonal { c: MP_C }, SpectrumOptions::eigenvalues_only())?;
    let f = |x: f64| mp_density(x, kappa);
    let h = empirical_density(&samples, DensityMode::MarginalX, bins)?;
    let curve = model_curve(&h, f);
    write_samples(&mut ctx.staging, "eigenvalues.csv", &samples)?;
    write_histogram_file(&mut ctx.staging, "marginal_x_histogram.csv", &h)?;
    write_curve_file(&mut ctx.staging, "mp_model.csv", &curve)?;
    ctx.reports.push(ComparisonReport::at_most("mp_l1", l1_distance(&h, f), MARGINAL_L1_MAX));

    let all = pooled(&samples);
    let edge = mp_support(kappa).1;
    let share = |cut: f64| all.iter().filter(|l| l.im.abs() > cut).count() as f64 / all.len() as f64;
    let summary = ImaginarySummary {
        eigenvalues: all.len(),
        fraction_nonreal: share(0.0),
        fraction_above_one_percent_of_edge: share(0.01 * edge),
        max_abs_imaginary: all.iter().map(|l| l.im.abs()).fold(0.0, f64::max),
        upper_edge: edge,
    };
    ctx.staging.write_json("imaginary_parts.json", &summary)?;
    let plot = Plot::graph("real parts vs Marchenko-Pastur", vec![Series::steps(&h, "black"), Series::curve(curve, "red")]);
    ctx.svg("fig9.svg", plot)
}
