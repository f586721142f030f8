//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::f64::consts::PI;

use nswishart::analytics::{density_diagonal, green_diagonal, DensityModel};
use nswishart::linalg::{nonsym_eigenvalues, schur_block_inverse, try_inverse, RealMatrix};
use nswishart::output::write_eigenvalues;
use nswishart::sampling::{run_ensemble_with_workers, sub_seed, NormalStream, Sampler};
use nswishart::stats::ComparisonReport;
use nswishart::{make_eta, EnsembleConfig, EtaKind, EtaSpec};
use num_complex::Complex64;

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> RealMatrix {
    NormalStream::new(seed).normal_matrix(rows, cols)
}

/// Greedy multiset match; returns the largest pairing distance.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Companion matrix of the monic polynomial with the given roots.
pub fn companion_of_roots(roots: &[Complex64]) -> RealMatrix {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= c * r;
        }
        poly = next;
    }
    let n = roots.len();
    RealMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -poly[j + 1].re
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    })
}

/// Worst root error of the eigensolver over companion matrices with
/// well-separated, conjugate-closed roots of degree 2..=14.
pub fn companion_root_error() -> f64 {
    let mut worst: f64 = 0.0;
    for degree in 2..=14 {
        let mut roots = Vec::new();
        let pairs = degree / 2;
        for k in 0..pairs {
            let angle = PI * (k as f64 + 0.5) / (pairs as f64 + 0.5);
            let r = 0.6 + 0.3 * ((k * 7 + degree) % 5) as f64 / 4.0;
            let z = Complex64::from_polar(r, angle);
            roots.push(z);
            roots.push(z.conj());
        }
        if degree % 2 == 1 {
            roots.push(Complex64::new(-0.35, 0.0));
        }
        let spec = nonsym_eigenvalues(&companion_of_roots(&roots)).unwrap();
        worst = worst.max(multiset_distance(&spec.values, &roots));
    }
    worst
}

/// Largest entrywise gap between the blockwise inverse and a direct dense
/// inverse over `systems` random well-conditioned matrices of size 2..=64.
pub fn schur_vs_direct(systems: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..systems {
        let mut rng = NormalStream::new(sub_seed(77, k as u64));
        let n = 2 + (k * 31) % 63;
        let p = 1 + (k * 17) % (n - 1);
        let q = n - p;
        let shift = 2.0 * (n as f64).sqrt();
        let m = rng.normal_matrix(n, n).add(&RealMatrix::identity(n).scaled(shift)).unwrap();
        let inv = schur_block_inverse(&m.block(0, 0, p, p), &m.block(0, p, p, q), &m.block(p, 0, q, p), &m.block(p, p, q, q))
            .unwrap();
        let direct = try_inverse(&m).unwrap();
        worst = worst.max(inv.assemble().sub(&direct).unwrap().max_abs());
    }
    worst
}

/// `(1/2)(∂ₓ + i∂ᵧ) g` by central differences.
pub fn dbar(g: impl Fn(Complex64) -> Complex64, z: Complex64, h: f64) -> Complex64 {
    let dx = (g(z + h) - g(z - h)) / (2.0 * h);
    let dy = (g(z + Complex64::new(0.0, h)) - g(z - Complex64::new(0.0, h))) / (2.0 * h);
    0.5 * (dx + Complex64::i() * dy)
}

/// Worst `|∂g/∂z* − π ρ|` over a polar grid, skipping a band around the
/// support boundary where the finite-difference stencil straddles it.
pub fn gauss_law_error(c: f64, kappa: f64) -> f64 {
    let model = DensityModel::new(c, kappa).unwrap();
    let (x0, a, b) = model.ellipse();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for i in 0..24 {
        for j in 1..=30 {
            let theta = 2.0 * PI * (i as f64 + 0.3) / 24.0;
            let s = 1.6 * j as f64 / 30.0;
            let z = Complex64::new(x0 + a * s * theta.cos(), b * s * theta.sin());
            if (s - 1.0).abs() < 0.02 || z.norm() < 1e-3 {
                continue;
            }
            let d = dbar(|w| green_diagonal(w, &model).unwrap(), z, h);
            let target = PI * density_diagonal(z, &model);
            worst = worst.max((d.re - target).abs()).max(d.im.abs());
        }
    }
    worst
}

/// Continuous mass of the diagonal-η density over its support ellipse.
///
/// Polar coordinates about the origin: the radial integral of
/// `r / √(A² + 4r²)` is `√(A² + 4r²)/4`, so only the angular integral is
/// numerical (trapezoid, spectrally accurate for periodic integrands).
pub fn density_mass(c: f64, kappa: f64) -> f64 {
    let alpha = 1.0 - c * c;
    let big_a = alpha * (1.0 - kappa);
    let x0 = c * (1.0 + kappa);
    let a = kappa.sqrt() * (1.0 + c * c);
    let b = kappa.sqrt() * (1.0 - c * c);
    let prim = |r: f64| (big_a * big_a + 4.0 * r * r).sqrt() / (4.0 * PI * kappa * alpha);
    let steps = 200_000;
    let mut total = 0.0;
    for k in 0..steps {
        let t = 2.0 * PI * (k as f64 + 0.5) / steps as f64;
        let (ct, st) = (t.cos(), t.sin());
        // ((r ct − x0)/a)² + (r st / b)² = 1
        let qa = ct * ct / (a * a) + st * st / (b * b);
        let qb = -2.0 * x0 * ct / (a * a);
        let qc = x0 * x0 / (a * a) - 1.0;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            continue;
        }
        let r_hi = (-qb + disc.sqrt()) / (2.0 * qa);
        let r_lo = ((-qb - disc.sqrt()) / (2.0 * qa)).max(0.0);
        if r_hi > r_lo {
            total += prim(r_hi) - prim(r_lo);
        }
    }
    total * 2.0 * PI / steps as f64
}

/// Closed-form X-marginal: `asinh(2h/√(A² + 4x²)) / (πκα)` with chord half
/// height `h`.
pub fn marginal_x_closed_form(x: f64, c: f64, kappa: f64) -> f64 {
    let alpha = 1.0 - c * c;
    let big_a = alpha * (1.0 - kappa);
    let x0 = c * (1.0 + kappa);
    let a = kappa.sqrt() * (1.0 + c * c);
    let b = kappa.sqrt() * (1.0 - c * c);
    let u = (x - x0) / a;
    if u.abs() >= 1.0 {
        return 0.0;
    }
    let h = b * (1.0 - u * u).sqrt();
    (2.0 * h / (big_a * big_a + 4.0 * x * x).sqrt()).asinh() / (PI * kappa * alpha)
}

/// Entrywise running mean and standard error of a matrix-valued estimator.
struct Moments {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    count: usize,
}

impl Moments {
    fn new(len: usize) -> Self {
        Moments { sum: vec![0.0; len], sum_sq: vec![0.0; len], count: 0 }
    }

    fn push(&mut self, m: &RealMatrix) {
        for ((s, q), v) in self.sum.iter_mut().zip(self.sum_sq.iter_mut()).zip(m.as_slice()) {
            *s += v;
            *q += v * v;
        }
        self.count += 1;
    }

    /// Largest `|mean − expected| / standard_error` over all entries.
    fn max_z(&self, expected: &RealMatrix) -> f64 {
        let r = self.count as f64;
        let mut worst: f64 = 0.0;
        for ((s, q), e) in self.sum.iter().zip(&self.sum_sq).zip(expected.as_slice()) {
            let mean = s / r;
            let var = ((q / r - mean * mean) * r / (r - 1.0)).max(0.0);
            let se = (var / r).sqrt();
            let dev = (mean - e).abs();
            let z = if se > 0.0 { dev / se } else if dev < 1e-12 { 0.0 } else { f64::INFINITY };
            worst = worst.max(z);
        }
        worst
    }
}

/// Monte-Carlo check of the binary correlation identities of the coupled
/// Gaussian law for fixed deterministic test matrices χ. Returns one
/// `(label, max z-score)` per identity.
pub fn covariance_identities(n: usize, t: usize, realizations: usize, seed: u64) -> Vec<(&'static str, f64)> {
    let eta = make_eta(&EtaSpec::new(EtaKind::Tridiagonal { c: 0.25, p: 0.25, q: 0.5 }, n)).unwrap();
    let e = eta.data().clone();
    let sampler = Sampler::new(eta).unwrap();
    let (nf, tf) = (n as f64, t as f64);
    let kappa = nf / tf;

    let chi_t = random_matrix(t, t, seed ^ 1).scaled(1.0 / tf.sqrt());
    let chi_n = random_matrix(n, n, seed ^ 2).scaled(1.0 / nf.sqrt());
    let chi_tn = random_matrix(t, n, seed ^ 3).scaled(1.0 / tf.sqrt());
    let chi_tt = random_matrix(t, t, seed ^ 4).scaled(1.0 / tf.sqrt());
    let avg_t = chi_t.trace() / tf;

    let expected = [
        ("(1/T) A x1 At x2", chi_n.scaled(avg_t)),
        ("(1/T) B x1 Bt x2", chi_n.scaled(avg_t)),
        ("(1/T) A x1 Bt x2", e.matmul(&chi_n).unwrap().scaled(avg_t)),
        ("(1/T) B x1 At x2", e.transpose().matmul(&chi_n).unwrap().scaled(avg_t)),
        ("(1/T) At x1 B x2", chi_tt.scaled(kappa * e.transpose().matmul(&chi_n).unwrap().trace() / nf)),
        ("(1/T) Bt x1 A x2", chi_tt.scaled(kappa * e.matmul(&chi_n).unwrap().trace() / nf)),
        ("A x1 A x2", chi_tn.transpose().matmul(&chi_tt).unwrap()),
        ("B x1 B x2", chi_tn.transpose().matmul(&chi_tt).unwrap()),
    ];
    let mut moments: Vec<Moments> = expected.iter().map(|(_, m)| Moments::new(m.as_slice().len())).collect();

    let inv_t = 1.0 / tf;
    for r in 0..realizations {
        let mut rng = NormalStream::new(sub_seed(seed, r as u64));
        let (a, b) = sampler.sample_pair(t, &mut rng).unwrap();
        let (at, bt) = (a.transpose(), b.transpose());
        let prod = |x: &RealMatrix, c1: &RealMatrix, y: &RealMatrix, c2: &RealMatrix| {
            x.matmul(c1).unwrap().matmul(y).unwrap().matmul(c2).unwrap()
        };
        let estimates = [
            prod(&a, &chi_t, &at, &chi_n).scaled(inv_t),
            prod(&b, &chi_t, &bt, &chi_n).scaled(inv_t),
            prod(&a, &chi_t, &bt, &chi_n).scaled(inv_t),
            prod(&b, &chi_t, &at, &chi_n).scaled(inv_t),
            prod(&at, &chi_n, &b, &chi_tt).scaled(inv_t),
            prod(&bt, &chi_n, &a, &chi_tt).scaled(inv_t),
            prod(&a, &chi_tn, &a, &chi_tt),
            prod(&b, &chi_tn, &b, &chi_tt),
        ];
        for (m, est) in moments.iter_mut().zip(&estimates) {
            m.push(est);
        }
    }
    expected.iter().zip(&moments).map(|((label, e), m)| (*label, m.max_z(e))).collect()
}

/// Worst z-score over all identities, as a report against the 5σ budget.
pub fn covariance_report(n: usize, t: usize, realizations: usize, seed: u64) -> ComparisonReport {
    let worst = covariance_identities(n, t, realizations, seed)
        .into_iter()
        .map(|(_, z)| z)
        .fold(0.0, f64::max);
    ComparisonReport::at_most("covariance identities max z-score", worst, 5.0)
}

/// Eigenvalue CSV bytes for a small tridiagonal ensemble at a given worker count.
pub fn ensemble_csv(workers: usize) -> Vec<u8> {
    let spec = EtaSpec::new(EtaKind::Tridiagonal { c: 0.25, p: 0.25, q: 0.5 }, 48);
    let config = EnsembleConfig::new(48, 96, 16, 20240611, spec);
    let samples = run_ensemble_with_workers(&config, workers).unwrap();
    let mut out = Vec::new();
    write_eigenvalues(&mut out, &samples).unwrap();
    out
}
