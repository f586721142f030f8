//! Monte-Carlo sampling of `C = A Bᵗ / T`.
//!
//! Pairs are drawn as `A = X`, `B = ηᵗX + (I − ηᵗη)^{1/2} Y` with `X`, `Y`
//! independent standard normal, which has the same law as applying `ξ^{1/2}`
//! to a stacked `2N × T` normal matrix.

use std::num::NonZeroUsize;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{make_eta, EtaMatrix, EtaSpec, EtaStructure};
use crate::error::{Error, Result};
use crate::linalg::{nonsym_eigenvalues, singular_values, symmetric_sqrt, ComplexSpectrum, RealMatrix};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "NSWISHART_THREADS";

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of realization `index`, a fixed hash of the master seed and the index.
pub fn sub_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ splitmix64(index.wrapping_add(GOLDEN)))
}

/// Standard normal variates from a ChaCha8 stream via the Marsaglia polar method.
#[derive(Clone, Debug)]
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        NormalStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `(-1, 1)` with 53 random bits.
    fn symmetric_uniform(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 0.5) * (2.0 / (1u64 << 53) as f64) - 1.0
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        loop {
            let u = self.symmetric_uniform();
            let v = self.symmetric_uniform();
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    pub fn normal_matrix(&mut self, rows: usize, cols: usize) -> RealMatrix {
        RealMatrix::from_fn(rows, cols, |_, _| self.next_normal())
    }
}

/// `(I − ηᵗη)^{1/2}` in the cheapest representation the structure allows.
#[derive(Clone, Debug)]
enum ComplementRoot {
    Scalar(f64),
    /// `I + (s − 1)·11ᵗ/N`
    RankOne(f64),
    Dense(RealMatrix),
}

/// Precomputed state for drawing `(A, B)` pairs with a fixed η.
#[derive(Clone, Debug)]
pub struct Sampler {
    eta: EtaMatrix,
    root: ComplementRoot,
}

impl Sampler {
    pub fn new(eta: EtaMatrix) -> Result<Self> {
        let n = eta.n();
        let root = match eta.structure() {
            EtaStructure::Zero => ComplementRoot::Scalar(1.0),
            EtaStructure::Diagonal(c) => ComplementRoot::Scalar((1.0 - c * c).sqrt()),
            EtaStructure::Equal(c) => {
                let nc = n as f64 * c;
                ComplementRoot::RankOne((1.0 - nc * nc).sqrt())
            }
            EtaStructure::Tridiagonal { c, p, q } if p.abs() == q.abs() => {
                ComplementRoot::Dense(normal_tridiagonal_root(n, c, p, p == q)?)
            }
            _ => {
                let gram = eta.data().transpose().matmul(eta.data())?;
                ComplementRoot::Dense(symmetric_sqrt(&RealMatrix::identity(n).sub(&gram)?)?)
            }
        };
        Ok(Sampler { eta, root })
    }

    pub fn eta(&self) -> &EtaMatrix {
        &self.eta
    }

    /// Dense `(I − ηᵗη)^{1/2}`.
    pub fn complement_root(&self) -> RealMatrix {
        let n = self.eta.n();
        match &self.root {
            ComplementRoot::Scalar(s) => RealMatrix::identity(n).scaled(*s),
            ComplementRoot::RankOne(s) => {
                RealMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + (s - 1.0) / n as f64)
            }
            ComplementRoot::Dense(m) => m.clone(),
        }
    }

    fn apply_root(&self, y: RealMatrix) -> Result<RealMatrix> {
        Ok(match &self.root {
            ComplementRoot::Scalar(s) if *s == 1.0 => y,
            ComplementRoot::Scalar(s) => y.scaled(*s),
            ComplementRoot::RankOne(s) => {
                let n = y.rows();
                let mut sums = vec![0.0; y.cols()];
                for i in 0..n {
                    for (acc, v) in sums.iter_mut().zip(y.row(i)) {
                        *acc += v;
                    }
                }
                let f = (s - 1.0) / n as f64;
                let mut out = y;
                for i in 0..n {
                    for (o, acc) in out.row_mut(i).iter_mut().zip(&sums) {
                        *o += f * acc;
                    }
                }
                out
            }
            ComplementRoot::Dense(m) => m.matmul(&y)?,
        })
    }

    /// One `(A, B)` pair, each `n × t`.
    pub fn sample_pair(&self, t: usize, rng: &mut NormalStream) -> Result<(RealMatrix, RealMatrix)> {
        let n = self.eta.n();
        let x = rng.normal_matrix(n, t);
        let y = rng.normal_matrix(n, t);
        let b = self.eta.transpose_times(&x)?.add(&self.apply_root(y)?)?;
        Ok((x, b))
    }
}

/// `(I − ηᵗη)^{1/2}` for normal tridiagonal η, `q = ±p`, without an
/// eigensolve. The hopping matrix `H` (ones on both off-diagonals) has the
/// sine eigenbasis `U_jk = √(2/(n+1)) sin(jkπ/(n+1))` with eigenvalues
/// `μ_k = 2cos(kπ/(n+1))`.
///
/// For `q = p`, `ηᵗη = (cI + pH)²`. For `q = −p`, `ηᵗη = c²I + p² D H² D`
/// with `D = diag((−1)^⌊k/2⌋)`, so the root is conjugated by `D`.
fn normal_tridiagonal_root(n: usize, c: f64, p: f64, symmetric: bool) -> Result<RealMatrix> {
    let period = 2 * (n + 1);
    let h = std::f64::consts::PI / (n + 1) as f64;
    let scale = (2.0 / (n + 1) as f64).sqrt();
    // reduce the integer phase first so the sine stays accurate for large n
    let u = RealMatrix::from_fn(n, n, |j, k| scale * ((((j + 1) * (k + 1)) % period) as f64 * h).sin());
    let mut roots = Vec::with_capacity(n);
    for k in 0..n {
        let mu = 2.0 * ((k + 1) as f64 * h).cos();
        let v = if symmetric {
            1.0 - (c + p * mu).powi(2)
        } else {
            1.0 - c * c - p * p * mu * mu
        };
        if v < -1e-10 {
            return Err(Error::NotPsd { eigenvalue: v, threshold: -1e-10 });
        }
        roots.push(v.max(0.0).sqrt());
    }
    let ud = RealMatrix::from_fn(n, n, |j, k| u[(j, k)] * roots[k]);
    let mut s = ud.matmul_transposed(&u)?;
    if !symmetric {
        let sign = |k: usize| if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] *= sign(i) * sign(j);
            }
        }
    }
    Ok(s)
}

/// One `(A, B)` pair for `η`; builds the square root on every call, so prefer
/// [`Sampler`] when drawing many pairs.
pub fn sample_pair(eta: &EtaMatrix, n: usize, t: usize, rng: &mut NormalStream) -> Result<(RealMatrix, RealMatrix)> {
    if eta.n() != n {
        return Err(Error::Dimension(format!("eta is {0}x{0}, requested n = {n}", eta.n())));
    }
    if t == 0 {
        return Err(Error::Dimension("t must be >= 1".into()));
    }
    Sampler::new(eta.clone())?.sample_pair(t, rng)
}

/// `C = A Bᵗ / t`
pub fn form_c(a: &RealMatrix, b: &RealMatrix) -> Result<RealMatrix> {
    if a.cols() != b.cols() || a.rows() != b.rows() {
        return Err(Error::Dimension(format!(
            "A is {}x{}, B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.matmul_transposed(b)?.scaled(1.0 / a.cols() as f64))
}

fn default_true() -> bool {
    true
}

/// Which spectral data to compute per realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    #[serde(default = "default_true")]
    pub eigenvalues: bool,
    #[serde(default = "default_true")]
    pub singular_values: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            eigenvalues: true,
            singular_values: true,
        }
    }
}

impl SpectrumOptions {
    pub fn eigenvalues_only() -> Self {
        SpectrumOptions {
            eigenvalues: true,
            singular_values: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n: usize,
    pub t: usize,
    pub realizations: usize,
    pub master_seed: u64,
    pub eta: EtaSpec,
    #[serde(default)]
    pub spectrum: SpectrumOptions,
}

impl EnsembleConfig {
    pub fn new(n: usize, t: usize, realizations: usize, master_seed: u64, eta: EtaSpec) -> Self {
        EnsembleConfig {
            n,
            t,
            realizations,
            master_seed,
            eta,
            spectrum: SpectrumOptions::default(),
        }
    }

    pub fn with_spectrum(mut self, spectrum: SpectrumOptions) -> Self {
        self.spectrum = spectrum;
        self
    }

    pub fn kappa(&self) -> f64 {
        self.n as f64 / self.t as f64
    }

    /// κ = N/T as a reduced fraction.
    pub fn kappa_ratio(&self) -> (usize, usize) {
        let g = gcd(self.n, self.t).max(1);
        (self.n / g, self.t / g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.t == 0 || self.realizations == 0 {
            return Err(Error::InvalidParameter(format!(
                "n, t and realizations must be >= 1 (got n = {}, t = {}, realizations = {})",
                self.n, self.t, self.realizations
            )));
        }
        if self.eta.n != self.n {
            return Err(Error::Dimension(format!("eta has n = {}, ensemble has n = {}", self.eta.n, self.n)));
        }
        Ok(())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Spectral data of one realization of `C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub eigenvalues: ComplexSpectrum,
    /// Descending; empty when not requested.
    pub singular_values: Vec<f64>,
    pub realization_index: usize,
    pub sub_seed: u64,
}

/// Number of workers: `NSWISHART_THREADS` if set to a positive integer,
/// otherwise the available parallelism.
pub fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, NonZeroUsize::get))
}

pub fn run_ensemble(config: &EnsembleConfig) -> Result<Vec<SpectrumSample>> {
    run_ensemble_with_workers(config, worker_count())
}

/// Runs every realization; the output does not depend on `workers`.
pub fn run_ensemble_with_workers(config: &EnsembleConfig, workers: usize) -> Result<Vec<SpectrumSample>> {
    config.validate()?;
    let sampler = Sampler::new(make_eta(&config.eta)?)?;
    run_with_sampler(&sampler, config, workers)
}

/// Like [`run_ensemble_with_workers`] with a prepared sampler, which lets
/// several ensembles share one square root.
pub fn run_with_sampler(sampler: &Sampler, config: &EnsembleConfig, workers: usize) -> Result<Vec<SpectrumSample>> {
    config.validate()?;
    if sampler.eta().n() != config.n {
        return Err(Error::Dimension("sampler and config disagree on n".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))?;
    let results: Vec<Result<SpectrumSample>> = pool.install(|| {
        (0..config.realizations)
            .into_par_iter()
            .map(|i| realize(sampler, config, i))
            .collect()
    });
    let mut samples = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => samples.push(s),
            Err(e) => failures.push((i, e)),
        }
    }
    if failures.is_empty() {
        Ok(samples)
    } else {
        Err(Error::Ensemble { failures })
    }
}

fn realize(sampler: &Sampler, config: &EnsembleConfig, index: usize) -> Result<SpectrumSample> {
    let seed = sub_seed(config.master_seed, index as u64);
    let mut rng = NormalStream::new(seed);
    let (a, b) = sampler.sample_pair(config.t, &mut rng)?;
    let c = form_c(&a, &b)?;
    drop((a, b));
    let eigenvalues = if config.spectrum.eigenvalues {
        nonsym_eigenvalues(&c)?
    } else {
        ComplexSpectrum {
            values: Vec::new(),
            backward_error: 0.0,
        }
    };
    let singular_values = if config.spectrum.singular_values {
        singular_values(&c)?
    } else {
        Vec::new()
    };
    Ok(SpectrumSample {
        eigenvalues,
        singular_values,
        realization_index: index,
        sub_seed: seed,
    })
}
