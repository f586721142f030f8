use nswishart::linalg::{
    jacobi_eigen, nonsym_eigenvalues, schur_block_inverse, singular_values, symmetric_eigenvalues, symmetric_sqrt,
    try_inverse, RealMatrix,
};
use nswishart::sampling::NormalStream;
use nswishart::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn random_matrix(rows: usize, cols: usize, seed: u64) -> RealMatrix {
    NormalStream::new(seed).normal_matrix(rows, cols)
}

/// Greedy multiset match; returns the largest pairing distance.
fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
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

fn companion(coeffs: &[f64]) -> RealMatrix {
    // monic polynomial z^n + c_{n-1} z^{n-1} + ... + c_0, coeffs = [c_0, .., c_{n-1}]
    let n = coeffs.len();
    RealMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -coeffs[n - 1 - j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    })
}

#[test]
fn cube_roots_of_unity() {
    let spec = nonsym_eigenvalues(&companion(&[-1.0, 0.0, 0.0])).unwrap();
    let roots: Vec<Complex64> = (0..3)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0))
        .collect();
    assert!(multiset_distance(&spec.values, &roots) < 1e-10);
}

#[test]
fn companion_roots_of_products() {
    // (z − 0.5)(z + 0.25)(z² + 0.2z + 0.5)(z − 0.9)
    let roots = [
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.25, 0.0),
        Complex64::new(-0.1, 0.7),
        Complex64::new(-0.1, -0.7),
        Complex64::new(0.9, 0.0),
    ];
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= c * r;
        }
        poly = next;
    }
    // poly[0] is the leading coefficient; coeffs[k] multiplies z^k
    let n = roots.len();
    let coeffs: Vec<f64> = (0..n).map(|k| poly[n - k].re).collect();
    let spec = nonsym_eigenvalues(&companion(&coeffs)).unwrap();
    assert!(multiset_distance(&spec.values, &roots) < 1e-8);
}

#[test]
fn rectangular_and_oversized_rejected() {
    assert!(matches!(nonsym_eigenvalues(&RealMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
    assert!(nonsym_eigenvalues(&RealMatrix::zeros(2049, 2049)).is_err());
}

#[test]
fn singular_value_examples() {
    let s = singular_values(&RealMatrix::from_diagonal(&[3.0, -2.0])).unwrap();
    assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 2.0).abs() < 1e-14);

    let n = 16;
    let c = 0.05;
    let s = singular_values(&RealMatrix::from_fn(n, n, |_, _| c)).unwrap();
    assert!((s[0] - n as f64 * c).abs() < 1e-12);
    assert!(s[1..].iter().all(|v| v.abs() < 1e-7));
}

#[test]
fn singular_values_match_gram_eigenvalues() {
    let m = random_matrix(4, 4, 9);
    let gram = m.matmul_transposed(&m).unwrap();
    let (mut ev, _) = jacobi_eigen(&gram).unwrap();
    ev.sort_by(|a, b| b.total_cmp(a));
    let s = singular_values(&m).unwrap();
    for (x, e) in s.iter().zip(&ev) {
        assert!((x - e.max(0.0).sqrt()).abs() < 1e-10);
    }
}

#[test]
fn sqrt_examples() {
    let i = RealMatrix::identity(4);
    assert_eq!(symmetric_sqrt(&i).unwrap(), i);
    let s = symmetric_sqrt(&RealMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
    assert_eq!(s, RealMatrix::from_diagonal(&[2.0, 3.0]));
    let err = symmetric_sqrt(&RealMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap()).unwrap_err();
    assert!(matches!(err, Error::NotPsd { .. }));
}

#[test]
fn xi_inverse_for_diagonal_eta() {
    let (n, c) = (5, 0.3);
    let i = RealMatrix::identity(n);
    let eta = i.scaled(c);
    let inv = schur_block_inverse(&i, &eta, &eta, &i).unwrap();
    let expected = i.scaled(1.0 / (1.0 - c * c));
    assert!(inv.top_left.sub(&expected).unwrap().max_abs() < 1e-14);
    assert!(inv.bottom_right.sub(&expected).unwrap().max_abs() < 1e-14);
    assert!(inv.top_right.sub(&i.scaled(-c / (1.0 - c * c))).unwrap().max_abs() < 1e-14);
}

#[test]
fn symmetric_eigen_routes_agree() {
    let a = random_matrix(30, 30, 4);
    let m = a.add(&a.transpose()).unwrap();
    let (mut jac, v) = jacobi_eigen(&m).unwrap();
    let ql = symmetric_eigenvalues(&m).unwrap();
    jac.sort_by(f64::total_cmp);
    for (x, y) in jac.iter().zip(&ql) {
        assert!((x - y).abs() < 1e-10);
    }
    let vtv = v.transpose().matmul(&v).unwrap();
    assert!(vtv.sub(&RealMatrix::identity(30)).unwrap().max_abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transpose_has_same_spectrum(n in 1usize..40, seed in any::<u64>()) {
        let m = random_matrix(n, n, seed);
        let a = nonsym_eigenvalues(&m).unwrap();
        let b = nonsym_eigenvalues(&m.transpose()).unwrap();
        prop_assert!(multiset_distance(&a.values, &b.values) < 1e-8);
    }

    #[test]
    fn spectrum_invariants(n in 1usize..60, seed in any::<u64>()) {
        let m = random_matrix(n, n, seed);
        let spec = nonsym_eigenvalues(&m).unwrap();
        let fro = m.frobenius_norm();
        let sum: Complex64 = spec.values.iter().sum();
        prop_assert!((sum.re - m.trace()).abs() <= 1e-6 * fro);
        prop_assert!(sum.im.abs() <= 1e-6 * fro);
        let sq: Complex64 = spec.values.iter().map(|v| v * v).sum();
        let tr2 = m.matmul(&m).unwrap().trace();
        prop_assert!((sq.re - tr2).abs() <= 1e-5 * fro * fro);
        prop_assert!(spec.conjugate_defect() <= 1e-8);
    }

    #[test]
    fn singular_values_keep_frobenius(rows in 1usize..20, cols in 1usize..20, seed in any::<u64>()) {
        let m = random_matrix(rows, cols, seed);
        let s = singular_values(&m).unwrap();
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.iter().all(|v| *v >= 0.0));
        let sum: f64 = s.iter().map(|v| v * v).sum();
        let fro2 = m.frobenius_norm().powi(2);
        prop_assert!((sum - fro2).abs() <= 1e-8 * fro2);
    }

    #[test]
    fn sqrt_of_square(n in 1usize..25, seed in any::<u64>()) {
        let a = random_matrix(n, n, seed);
        let s = a.matmul_transposed(&a).unwrap();
        // S is symmetric PSD; its square has S as the PSD root
        let s = RealMatrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
        let root = symmetric_sqrt(&s.matmul(&s).unwrap()).unwrap();
        prop_assert!(root.sub(&s).unwrap().frobenius_norm() <= 1e-7 * s.frobenius_norm().max(1.0));
    }

    #[test]
    fn sqrt_squares_back(n in 1usize..25, seed in any::<u64>()) {
        let a = random_matrix(n, n + 3, seed);
        let m = a.matmul_transposed(&a).unwrap();
        let m = RealMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        let root = symmetric_sqrt(&m).unwrap();
        prop_assert!(root.is_symmetric(0.0));
        let back = root.matmul(&root).unwrap();
        prop_assert!(back.sub(&m).unwrap().frobenius_norm() <= 1e-8 * m.frobenius_norm());
    }

    #[test]
    fn schur_matches_direct(p in 1usize..32, q in 1usize..32, seed in any::<u64>()) {
        let n = p + q;
        let m = random_matrix(n, n, seed).add(&RealMatrix::identity(n).scaled(2.0 * (n as f64).sqrt())).unwrap();
        let inv = schur_block_inverse(&m.block(0, 0, p, p), &m.block(0, p, p, q), &m.block(p, 0, q, p), &m.block(p, p, q, q)).unwrap();
        let direct = try_inverse(&m).unwrap();
        prop_assert!(inv.assemble().sub(&direct).unwrap().max_abs() <= 1e-9);
        let prod = m.matmul(&inv.assemble()).unwrap();
        prop_assert!(prod.sub(&RealMatrix::identity(n)).unwrap().max_abs() <= 1e-8);
    }
}
