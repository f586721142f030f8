//! Traces of the resolvent `(Ψ − η)⁻¹` needed by the contour equations.

use num_complex::Complex64;

use crate::correlation::{EtaMatrix, EtaStructure};
use crate::error::{Error, Result};

/// `f(Ψ) = ‖(Ψ − η)⁻¹‖_F² / N` and `m(Ψ) = tr (Ψ − η)⁻¹ / N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolventTraces {
    pub frobenius: f64,
    pub mean_diagonal: Complex64,
}

/// Evaluator for a fixed η, using the structure of η where possible.
#[derive(Clone, Debug)]
pub enum Resolvent {
    Scalar { c: f64 },
    Tridiagonal { n: usize, c: f64, p: f64, q: f64 },
    /// `c·11ᵗ`
    Equal { n: usize, c: f64 },
    Dense { n: usize, data: Vec<f64> },
    /// Normal η through its eigenvalues.
    Spectrum { lambdas: Vec<Complex64> },
}

impl Resolvent {
    pub fn for_eta(eta: &EtaMatrix) -> Self {
        let n = eta.n();
        match eta.structure() {
            EtaStructure::Zero => Resolvent::Scalar { c: 0.0 },
            EtaStructure::Diagonal(c) => Resolvent::Scalar { c },
            EtaStructure::Tridiagonal { c, p, q } => Resolvent::Tridiagonal { n, c, p, q },
            EtaStructure::Equal(c) => Resolvent::Equal { n, c },
            EtaStructure::Dense => Resolvent::Dense {
                n,
                data: eta.data().as_slice().to_vec(),
            },
        }
    }

    /// Evaluates both traces; [`Error::SingularResolvent`] when `Ψ − η` is
    /// numerically singular.
    pub fn eval(&self, psi: Complex64) -> Result<ResolventTraces> {
        let out = match self {
            Resolvent::Scalar { c } => {
                let d = psi - c;
                if d.norm_sqr() == 0.0 {
                    None
                } else {
                    Some(ResolventTraces {
                        frobenius: 1.0 / d.norm_sqr(),
                        mean_diagonal: 1.0 / d,
                    })
                }
            }
            &Resolvent::Tridiagonal { n, c, p, q } => tridiagonal_traces(psi, n, c, p, q),
            &Resolvent::Equal { n, c } => equal_traces(psi, n, c),
            Resolvent::Dense { n, data } => dense_traces(psi, *n, data),
            Resolvent::Spectrum { lambdas } => spectrum_traces(psi, lambdas),
        };
        match out {
            Some(t) if !t.frobenius.is_nan() && !t.mean_diagonal.is_nan() => Ok(t),
            _ => Err(Error::SingularResolvent { re: psi.re, im: psi.im }),
        }
    }

    /// [`Resolvent::eval`], retried once at `Ψ + 10⁻¹²(1 + i)` if singular.
    pub fn eval_perturbed(&self, psi: Complex64) -> Result<ResolventTraces> {
        match self.eval(psi) {
            Err(Error::SingularResolvent { .. }) => self.eval(psi + Complex64::new(1e-12, 1e-12)),
            other => other,
        }
    }
}

fn spectrum_traces(psi: Complex64, lambdas: &[Complex64]) -> Option<ResolventTraces> {
    let mut f = 0.0;
    let mut m = Complex64::new(0.0, 0.0);
    for &l in lambdas {
        let d = psi - l;
        let nsq = d.norm_sqr();
        if nsq == 0.0 {
            return None;
        }
        f += 1.0 / nsq;
        m += d.conj() / nsq;
    }
    let n = lambdas.len() as f64;
    Some(ResolventTraces {
        frobenius: f / n,
        mean_diagonal: m / n,
    })
}

/// Linear-time traces for `T = Ψ − η` with η tridiagonal, from the forward
/// and backward pivots `α_j`, `β_j` of `T`:
///
/// ```text
/// (T⁻¹)_jj = 1 / (α_j + β_j − a_j)
/// Σ_k |(T⁻¹)_kj|² = |(T⁻¹)_jj|² (1 + U_j + L_j)
/// ```
///
/// where `U_j`, `L_j` accumulate the geometric decay of column `j` above and
/// below the diagonal.
fn tridiagonal_traces(psi: Complex64, n: usize, c: f64, p: f64, q: f64) -> Option<ResolventTraces> {
    let a = psi - c;
    // super-diagonal of T is −q, sub-diagonal −p, so b_j c_j = pq
    let bc = p * q;
    let mut alpha = vec![Complex64::new(0.0, 0.0); n];
    let mut beta = vec![Complex64::new(0.0, 0.0); n];
    alpha[0] = a;
    for j in 1..n {
        if alpha[j - 1].norm_sqr() == 0.0 {
            return None;
        }
        alpha[j] = a - bc / alpha[j - 1];
    }
    beta[n - 1] = a;
    for j in (0..n - 1).rev() {
        if beta[j + 1].norm_sqr() == 0.0 {
            return None;
        }
        beta[j] = a - bc / beta[j + 1];
    }
    let (qq, pp) = (q * q, p * p);
    let mut upper = vec![0.0; n];
    for j in 1..n {
        upper[j] = qq / alpha[j - 1].norm_sqr() * (1.0 + upper[j - 1]);
    }
    let mut lower = 0.0;
    let mut f = 0.0;
    let mut m = Complex64::new(0.0, 0.0);
    for j in (0..n).rev() {
        if j + 1 < n {
            lower = pp / beta[j + 1].norm_sqr() * (1.0 + lower);
        }
        let pivot = alpha[j] + beta[j] - a;
        if pivot.norm_sqr() == 0.0 {
            return None;
        }
        let d = 1.0 / pivot;
        f += d.norm_sqr() * (1.0 + upper[j] + lower);
        m += d;
    }
    Some(ResolventTraces {
        frobenius: f / n as f64,
        mean_diagonal: m / n as f64,
    })
}

/// Sherman–Morrison: `(Ψ − c·11ᵗ)⁻¹ = (I + β·11ᵗ)/Ψ` with `β = c/(Ψ − Nc)`.
fn equal_traces(psi: Complex64, n: usize, c: f64) -> Option<ResolventTraces> {
    let nf = n as f64;
    let shifted = psi - nf * c;
    if psi.norm_sqr() == 0.0 || shifted.norm_sqr() == 0.0 {
        return None;
    }
    let beta = c / shifted;
    let inv = 1.0 / psi.norm_sqr();
    let diag = (1.0 + beta).norm_sqr();
    let off = beta.norm_sqr();
    Some(ResolventTraces {
        frobenius: inv * (diag + (nf - 1.0) * off),
        mean_diagonal: (1.0 + beta) / psi,
    })
}

/// Complex LU with partial pivoting, then the explicit inverse.
fn dense_traces(psi: Complex64, n: usize, data: &[f64]) -> Option<ResolventTraces> {
    let mut lu: Vec<Complex64> = data.iter().map(|&v| Complex64::new(-v, 0.0)).collect();
    for i in 0..n {
        lu[i * n + i] += psi;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let piv = (k..n).max_by(|&x, &y| lu[x * n + k].norm().total_cmp(&lu[y * n + k].norm()))?;
        if lu[piv * n + k].norm_sqr() == 0.0 {
            return None;
        }
        if piv != k {
            perm.swap(piv, k);
            for j in 0..n {
                lu.swap(k * n + j, piv * n + j);
            }
        }
        let pivot = lu[k * n + k];
        for i in k + 1..n {
            let factor = lu[i * n + k] / pivot;
            lu[i * n + k] = factor;
            for j in k + 1..n {
                let u = lu[k * n + j];
                lu[i * n + j] -= factor * u;
            }
        }
    }
    let mut f = 0.0;
    let mut m = Complex64::new(0.0, 0.0);
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for (i, v) in col.iter_mut().enumerate() {
            *v = Complex64::new(if perm[i] == j { 1.0 } else { 0.0 }, 0.0);
        }
        for i in 0..n {
            let mut s = col[i];
            for k in 0..i {
                s -= lu[i * n + k] * col[k];
            }
            col[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in i + 1..n {
                s -= lu[i * n + k] * col[k];
            }
            col[i] = s / lu[i * n + i];
        }
        f += col.iter().map(|v| v.norm_sqr()).sum::<f64>();
        m += col[j];
    }
    Some(ResolventTraces {
        frobenius: f / n as f64,
        mean_diagonal: m / n as f64,
    })
}
