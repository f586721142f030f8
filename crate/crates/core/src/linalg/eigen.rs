//! Eigenvalues of a general real matrix.
//!
//! Pipeline: diagonal balancing, Householder reduction to upper Hessenberg
//! form, then Francis implicit double-shift QR restricted to the active
//! window (eigenvalues only, no Schur vectors). The shift strategy and
//! deflation tests follow the EISPACK `hqr` routine.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{dot, RealMatrix};
use crate::error::{Error, Result};

/// Largest dimension accepted by [`nonsym_eigenvalues`].
pub const MAX_DIMENSION: usize = 2048;

/// Conjugate partners closer than this are snapped to an exact pair.
pub const PAIRING_TOLERANCE: f64 = 1e-8;
/// Unpaired imaginary parts below this are flushed to zero.
pub const FLUSH_TOLERANCE: f64 = 1e-10;

/// Spectrum of a real square matrix.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpectrum {
    pub values: Vec<Complex64>,
    /// Worst of the relative trace and trace-of-square residuals.
    pub backward_error: f64,
}

impl ComplexSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Max distance between each value and the conjugate of its partner.
    pub fn conjugate_defect(&self) -> f64 {
        let mut used = vec![false; self.values.len()];
        let mut worst: f64 = 0.0;
        for i in 0..self.values.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let target = self.values[i].conj();
            let best = (0..self.values.len())
                .filter(|&j| !used[j])
                .min_by(|&a, &b| {
                    (self.values[a] - target)
                        .norm()
                        .total_cmp(&(self.values[b] - target).norm())
                });
            let self_defect = self.values[i].im.abs();
            match best {
                Some(j) if (self.values[j] - target).norm() < self_defect => {
                    used[j] = true;
                    worst = worst.max((self.values[j] - target).norm());
                }
                _ => worst = worst.max(self_defect),
            }
        }
        worst
    }
}

/// All eigenvalues of a square real matrix.
pub fn nonsym_eigenvalues(m: &RealMatrix) -> Result<ComplexSpectrum> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n > MAX_DIMENSION {
        return Err(Error::Dimension(format!(
            "dimension {n} exceeds the eigensolver limit {MAX_DIMENSION}"
        )));
    }
    if m.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(ComplexSpectrum::default());
    }

    let trace = m.trace();
    let trace_sq: f64 = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)] * m[(j, i)]).sum::<f64>())
        .sum();
    let fro = m.frobenius_norm();

    let mut h = m.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let mut values = hessenberg_qr(&mut h)?;
    pair_conjugates(&mut values);

    let sum: Complex64 = values.iter().sum();
    let sum_sq: Complex64 = values.iter().map(|v| v * v).sum();
    let backward_error = if fro > 0.0 {
        ((sum - trace).norm() / fro).max((sum_sq - trace_sq).norm() / (fro * fro))
    } else {
        0.0
    };
    Ok(ComplexSpectrum {
        values,
        backward_error,
    })
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable. Eigenvalues are unchanged; rounding error shrinks.
pub(crate) fn balance(a: &mut RealMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let sq = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sq;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= sq;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for v in a.row_mut(i) {
                    *v *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
pub(crate) fn hessenberg(a: &mut RealMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut ort = vec![0.0; n];
    let mut f = vec![0.0; n];
    for m in 1..n - 1 {
        let scale: f64 = (m..n).map(|i| a[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (m..n).rev() {
            ort[i] = a[(i, m - 1)] / scale;
            h += ort[i] * ort[i];
        }
        let mut g = h.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        h -= ort[m] * g;
        ort[m] -= g;

        // left: A ← (I − u uᵗ/h) A on rows m.., columns m..
        f[m..].iter_mut().for_each(|v| *v = 0.0);
        for i in m..n {
            let oi = ort[i];
            for (fj, &aij) in f[m..].iter_mut().zip(&a.row(i)[m..]) {
                *fj += oi * aij;
            }
        }
        for i in m..n {
            let oi = ort[i] / h;
            for (aij, &fj) in a.row_mut(i)[m..].iter_mut().zip(&f[m..]) {
                *aij -= oi * fj;
            }
        }
        // right: A ← A (I − u uᵗ/h) on all rows, columns m..
        for i in 0..n {
            let row = &mut a.row_mut(i)[m..];
            let g = dot(row, &ort[m..]) / h;
            for (aij, &oj) in row.iter_mut().zip(&ort[m..]) {
                *aij -= g * oj;
            }
        }
        ort[m] *= scale;
        a[(m, m - 1)] = scale * g;
        for i in m + 1..n {
            a[(i, m - 1)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; destroys `h`.
pub(crate) fn hessenberg_qr(h: &mut RealMatrix) -> Result<Vec<Complex64>> {
    let nn = h.rows();
    let mut wr = vec![0.0; nn];
    let mut wi = vec![0.0; nn];
    let eps = f64::EPSILON;
    let max_iterations = 30 * nn.max(1);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    let mut n = nn as isize - 1;
    let mut exshift = 0.0;
    let mut iter = 0;
    let mut total = 0;
    let (mut p, mut q, mut r, mut s, mut z): (f64, f64, f64, f64, f64);
    let (mut w, mut x, mut y);

    while n >= 0 {
        let nu = n as usize;
        // look for a single small subdiagonal element
        let mut l = nu;
        while l > 0 {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            // one root
            h[(nu, nu)] += exshift;
            wr[nu] = h[(nu, nu)];
            wi[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            // two roots
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[(nu, nu)] += exshift;
            h[(nu - 1, nu - 1)] += exshift;
            x = h[(nu, nu)];
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                wr[nu - 1] = x + z;
                wr[nu] = wr[nu - 1];
                if z != 0.0 {
                    wr[nu] = x - w / z;
                }
                wi[nu - 1] = 0.0;
                wi[nu] = 0.0;
            } else {
                wr[nu - 1] = x + p;
                wr[nu] = x + p;
                wi[nu - 1] = z;
                wi[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[(nu, nu)];
            y = h[(nu - 1, nu - 1)];
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];

            // exceptional shifts
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total += 1;
            if total > max_iterations {
                return Err(Error::NoConvergence {
                    algorithm: "Hessenberg QR",
                    iterations: total,
                    dimension: nn,
                });
            }

            // look for two consecutive small subdiagonal elements
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // double QR step on rows l..=nu, columns m..=nu
            let mut k = m;
            while k < nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    // row modification
                    let cols = nu + 1;
                    let stride = h.cols();
                    let data = h.as_mut_slice();
                    let (head, tail) = data.split_at_mut((k + 1) * stride);
                    let row_k = &mut head[k * stride + k..k * stride + cols];
                    let (row_k1, rest) = tail.split_at_mut(stride);
                    let row_k1 = &mut row_k1[k..cols];
                    if notlast {
                        let row_k2 = &mut rest[k..cols];
                        for ((a0, a1), a2) in row_k.iter_mut().zip(row_k1.iter_mut()).zip(row_k2.iter_mut()) {
                            let pp = *a0 + q * *a1 + r * *a2;
                            *a0 -= pp * x;
                            *a1 -= pp * y;
                            *a2 -= pp * z;
                        }
                    } else {
                        for (a0, a1) in row_k.iter_mut().zip(row_k1.iter_mut()) {
                            let pp = *a0 + q * *a1;
                            *a0 -= pp * x;
                            *a1 -= pp * y;
                        }
                    }

                    // column modification
                    let last = nu.min(k + 3);
                    for i in l..=last {
                        let row = &mut h.row_mut(i)[k..];
                        let mut pp = x * row[0] + y * row[1];
                        if notlast {
                            pp += z * row[2];
                            row[2] -= pp * r;
                        }
                        row[0] -= pp;
                        row[1] -= pp * q;
                    }
                }
                k += 1;
            }
        }
    }

    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}

/// Greedy nearest-conjugate matching: partners within
/// [`PAIRING_TOLERANCE`] become exact conjugates; leftovers with tiny
/// imaginary part are made real.
pub(crate) fn pair_conjugates(values: &mut [Complex64]) {
    let n = values.len();
    let mut paired = vec![false; n];
    for i in 0..n {
        if paired[i] || values[i].im <= FLUSH_TOLERANCE {
            continue;
        }
        let target = values[i].conj();
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if j == i || paired[j] || values[j].im >= 0.0 {
                continue;
            }
            let d = (values[j] - target).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        if let Some((j, d)) = best {
            if d <= PAIRING_TOLERANCE * values[i].norm().max(1.0) {
                let re = 0.5 * (values[i].re + values[j].re);
                let im = 0.5 * (values[i].im - values[j].im);
                values[i] = Complex64::new(re, im);
                values[j] = Complex64::new(re, -im);
                paired[i] = true;
                paired[j] = true;
            }
        }
    }
    for (v, &p) in values.iter_mut().zip(&paired) {
        if !p && v.im.abs() < FLUSH_TOLERANCE {
            v.im = 0.0;
        }
    }
}
