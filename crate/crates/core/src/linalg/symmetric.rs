//! Symmetric eigensolvers and the kernels built on them.

use super::matrix::{dot, RealMatrix};
use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps visit `(p, q)` pairs in row order, so results are bit-reproducible.
/// Stops once the off-diagonal Frobenius norm is below `1e-12 · ‖M‖_F`.
/// Returns eigenvalues (unsorted, in diagonal order) and the eigenvector
/// matrix whose columns match them.
pub fn jacobi_eigen(m: &RealMatrix) -> Result<(Vec<f64>, RealMatrix)> {
    if !m.is_square() {
        return Err(Error::Dimension("Jacobi needs a square matrix".into()));
    }
    let n = m.rows();
    let mut a = m.clone().into_vec();
    // rows of `vt` are the eigenvectors, so rotations touch contiguous memory
    let mut vt = RealMatrix::identity(n).into_vec();
    let tol = 1e-12 * m.frobenius_norm();

    for sweep in 0.. {
        let off: f64 = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).map(|j| a[i * n + j] * a[i * n + j]).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                algorithm: "cyclic Jacobi",
                iterations: sweep,
                dimension: n,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, n, p, q, c, s);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                rotate_rows(&mut vt, n, p, q, c, s);
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok((values, RealMatrix::from_vec(n, n, vt)?.transpose()))
}

/// Two-row views `(row p, row q)` of a row-major `n × n` buffer, `p < q`.
fn row_pair(a: &mut [f64], n: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    let (head, tail) = a.split_at_mut(q * n);
    (&mut head[p * n..(p + 1) * n], &mut tail[..n])
}

// A ← Jᵗ A J for the rotation in the (p, q) plane, off-diagonal entries only.
// Rows p and q are updated in place and mirrored into columns p and q.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (rp, rq) = row_pair(a, n, p, q);
    let (dp, dq) = (rp[p], rq[q]);
    let (pq, qp) = (rp[q], rq[p]);
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
    // diagonal and (p, q) entries are set by the caller
    rp[p] = dp;
    rq[q] = dq;
    rp[q] = pq;
    rq[p] = qp;
    for k in 0..n {
        if k != p && k != q {
            a[k * n + p] = a[p * n + k];
            a[k * n + q] = a[q * n + k];
        }
    }
}

fn rotate_rows(vt: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (rp, rq) = row_pair(vt, n, p, q);
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Eigenvalues (ascending) of a symmetric matrix: Householder
/// tridiagonalization followed by implicit QL with Wilkinson shifts.
pub fn symmetric_eigenvalues(m: &RealMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension("symmetric eigenvalues need a square matrix".into()));
    }
    let (mut d, mut e) = tridiagonalize(m);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Returns the diagonal and subdiagonal (`e[i]` couples `i−1` and `i`, `e[0] = 0`).
fn tridiagonalize(m: &RealMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.rows();
    let mut a = m.clone();
    let mut e = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let alpha_norm: f64 = (lo..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            e[lo] = 0.0;
            continue;
        }
        let x0 = a[(lo, k)];
        let alpha = if x0 > 0.0 { -alpha_norm } else { alpha_norm };
        for i in lo..n {
            v[i] = a[(i, k)];
        }
        v[lo] -= alpha;
        let vnorm2: f64 = v[lo..].iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            e[lo] = x0;
            continue;
        }
        let beta = 2.0 / vnorm2;
        // p = β A v ; w = p − (β/2)(pᵗv) v ; A ← A − v wᵗ − w vᵗ
        for i in lo..n {
            p[i] = beta * dot(&a.row(i)[lo..], &v[lo..]);
        }
        let kappa = 0.5 * beta * dot(&p[lo..], &v[lo..]);
        for i in lo..n {
            p[i] -= kappa * v[i];
        }
        for i in lo..n {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a.row_mut(i)[lo..];
            for ((aij, &vj), &wj) in row.iter_mut().zip(&v[lo..]).zip(&p[lo..]) {
                *aij -= vi * wj + wi * vj;
            }
        }
        e[lo] = alpha;
        for i in lo..n {
            a[(i, k)] = 0.0;
            a[(k, i)] = 0.0;
        }
        a[(lo, k)] = alpha;
        a[(k, lo)] = alpha;
    }
    if n >= 2 {
        e[n - 1] = a[(n - 1, n - 2)];
    }
    (a.diagonal(), e)
}

/// Implicit QL on a symmetric tridiagonal matrix; eigenvalues land in `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 30 * n.max(1) {
                    return Err(Error::NoConvergence {
                        algorithm: "tridiagonal QL",
                        iterations: iter,
                        dimension: n,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Symmetric square root of a symmetric positive semidefinite matrix.
///
/// Eigenvalues in `[−1e-10·‖M‖₂, 0)` are clipped to zero; anything more
/// negative is reported as [`Error::NotPsd`].
pub fn symmetric_sqrt(m: &RealMatrix) -> Result<RealMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension("square root needs a square matrix".into()));
    }
    let asym_tol = 1e-12 * m.max_abs();
    if !m.is_symmetric(asym_tol) {
        return Err(Error::InvalidParameter("matrix is not symmetric".into()));
    }
    let n = m.rows();
    if m.is_diagonal() {
        let d = m.diagonal();
        let norm = d.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let root = clipped_roots(&d, norm)?;
        return Ok(RealMatrix::from_diagonal(&root));
    }
    let (values, vectors) = jacobi_eigen(m)?;
    let norm = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let root = clipped_roots(&values, norm)?;
    // S = V diag(√λ) Vᵗ
    let scaled = RealMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * root[j]);
    let mut s = scaled.matmul_transposed(&vectors)?;
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (s[(i, j)] + s[(j, i)]);
            s[(i, j)] = avg;
            s[(j, i)] = avg;
        }
    }
    Ok(s)
}

fn clipped_roots(values: &[f64], norm: f64) -> Result<Vec<f64>> {
    let threshold = 1e-10 * norm;
    values
        .iter()
        .map(|&v| {
            if v < -threshold {
                Err(Error::NotPsd {
                    eigenvalue: v,
                    threshold,
                })
            } else {
                Ok(v.max(0.0).sqrt())
            }
        })
        .collect()
}

/// Singular values in descending order, from the eigenvalues of the smaller
/// Gram matrix (`M Mᵗ` or `Mᵗ M`).
pub fn singular_values(m: &RealMatrix) -> Result<Vec<f64>> {
    if m.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let gram = if m.rows() <= m.cols() {
        m.matmul_transposed(m)?
    } else {
        let t = m.transpose();
        t.matmul_transposed(&t)?
    };
    let mut s: Vec<f64> = symmetric_eigenvalues(&gram)?
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Largest singular value by power iteration on `ηᵗη`, with a full
/// symmetric eigensolve as fallback when iteration stalls.
///
/// `apply` computes `M v` and `apply_t` computes `Mᵗ v`.
pub fn largest_singular_value(
    n: usize,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    apply_t: impl Fn(&[f64]) -> Vec<f64>,
    dense: impl FnOnce() -> RealMatrix,
) -> Result<f64> {
    const REL_TOL: f64 = 1e-10;
    const MAX_ITER: usize = 10_000;
    const FALLBACK_LIMIT: usize = 1024;
    if n == 0 {
        return Ok(0.0);
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 + 1.0).sqrt() * 1e-3).collect();
    normalize(&mut v);
    let mut lambda = 0.0;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let w = apply_t(&apply(&v));
        let next = dot(&w, &v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        // the residual bounds the eigenvalue error even when the top of the
        // spectrum is clustered and the Rayleigh quotient creeps
        let residual = w.iter().zip(&v).map(|(a, b)| (a - next * b).powi(2)).sum::<f64>().sqrt();
        lambda = next;
        v = w;
        normalize(&mut v);
        if residual <= REL_TOL * next.abs() {
            converged = true;
            break;
        }
    }
    if converged {
        return Ok(lambda.max(0.0).sqrt());
    }
    if n > FALLBACK_LIMIT {
        return Err(Error::NoConvergence {
            algorithm: "power iteration",
            iterations: MAX_ITER,
            dimension: n,
        });
    }
    let m = dense();
    let gram = m.transpose().matmul(&m)?;
    let top = symmetric_eigenvalues(&gram)?.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym_test_matrix(n: usize) -> RealMatrix {
        RealMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            (a * 0.7 + b * 0.3).sin() + if i == j { 2.0 } else { 0.0 }
        })
    }

    #[test]
    fn jacobi_and_ql_agree() {
        let m = sym_test_matrix(9);
        let (mut jac, _) = jacobi_eigen(&m).unwrap();
        jac.sort_by(f64::total_cmp);
        let ql = symmetric_eigenvalues(&m).unwrap();
        for (a, b) in jac.iter().zip(&ql) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
    }

    #[test]
    fn jacobi_vectors_diagonalize() {
        let m = sym_test_matrix(6);
        let (vals, v) = jacobi_eigen(&m).unwrap();
        let mv = m.matmul(&v).unwrap();
        for j in 0..6 {
            for i in 0..6 {
                assert!((mv[(i, j)] - vals[j] * v[(i, j)]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn sqrt_of_identity_and_diagonal() {
        assert_eq!(symmetric_sqrt(&RealMatrix::identity(4)).unwrap(), RealMatrix::identity(4));
        let s = symmetric_sqrt(&RealMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert_eq!(s, RealMatrix::from_diagonal(&[2.0, 3.0]));
    }

    #[test]
    fn sqrt_of_dense_psd() {
        let b = RealMatrix::from_fn(5, 5, |i, j| ((i * 5 + j) as f64 * 0.37).cos());
        let m = b.matmul_transposed(&b).unwrap();
        let s = symmetric_sqrt(&m).unwrap();
        let back = s.matmul(&s).unwrap();
        let err = back.sub(&m).unwrap().frobenius_norm() / m.frobenius_norm();
        assert!(err < 1e-8, "relative error {err}");
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let m = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(symmetric_sqrt(&m), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn sqrt_clips_round_off_negatives() {
        let m = RealMatrix::from_diagonal(&[1.0, -1e-14]);
        let s = symmetric_sqrt(&m).unwrap();
        assert_eq!(s[(1, 1)], 0.0);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let s = singular_values(&RealMatrix::from_diagonal(&[3.0, -2.0])).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_values_rectangular() {
        let m = RealMatrix::from_fn(3, 5, |i, j| (i + 2 * j) as f64 * 0.1 - 0.4);
        let s = singular_values(&m).unwrap();
        assert_eq!(s.len(), 3);
        let sum_sq: f64 = s.iter().map(|x| x * x).sum();
        let fro2 = m.frobenius_norm().powi(2);
        assert!((sum_sq - fro2).abs() <= 1e-8 * fro2);
    }
}
