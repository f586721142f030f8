mod common;

use common::dbar;
use nswishart::analytics::{
    density_diagonal, ellipse_contour, general_contour, green_diagonal, hausdorff_distance, loop_solve_diagonal,
    marginal_density, radial_density, spectrum_contour, tridiag_contour, Axis, ContourCurve, DensityModel,
    TridiagVariant,
};
use nswishart::correlation::tridiagonal_spectrum;
use nswishart::{make_eta, EtaKind, EtaSpec};
use num_complex::Complex64;

const N: usize = 512;
const KAPPA: f64 = 0.5;
const POINTS: usize = 256;

fn conj_gap(curve: &ContourCurve) -> f64 {
    let mirrored: Vec<Complex64> = curve.points.iter().map(|z| z.conj()).collect();
    hausdorff_distance(&curve.points, &mirrored)
}

/// All available contour methods for one normal η; every pair must agree.
fn cross_check(kind: EtaKind, variant: Option<(f64, f64, TridiagVariant)>) {
    let eta = make_eta(&EtaSpec::new(kind.clone(), N)).unwrap();
    assert!(eta.is_normal());
    let mut curves = vec![
        ("spectrum", spectrum_contour(&eta.eigenvalues().unwrap(), KAPPA, POINTS).unwrap()),
        ("general", general_contour(&eta, KAPPA, POINTS).unwrap()),
    ];
    if let Some((c, c0, v)) = variant {
        curves.push(("continuum", tridiag_contour(c, c0, KAPPA, v, POINTS).unwrap()));
    }
    if let EtaKind::Diagonal { c } = kind {
        curves.push(("ellipse", ellipse_contour(c, KAPPA, POINTS).unwrap()));
    }
    for (i, (na, a)) in curves.iter().enumerate() {
        assert!(conj_gap(a) < 1e-2, "{na} not conjugation symmetric");
        for (nb, b) in &curves[i + 1..] {
            let d = hausdorff_distance(&a.points, &b.points);
            assert!(d < 1e-2, "{kind:?}: {na} vs {nb} differ by {d}");
        }
    }
}

#[test]
fn case_i_diagonal_methods_agree() {
    cross_check(EtaKind::Diagonal { c: 0.25 }, Some((0.25, 0.0, TridiagVariant::Symmetric)));
    cross_check(EtaKind::Diagonal { c: -0.25 }, None);
}

#[test]
fn case_ii_symmetric_methods_agree() {
    cross_check(EtaKind::Tridiagonal { c: 0.25, p: 0.25, q: 0.25 }, Some((0.25, 0.25, TridiagVariant::Symmetric)));
}

#[test]
fn case_iii_antisymmetric_methods_agree() {
    cross_check(EtaKind::Tridiagonal { c: 0.0, p: 0.25, q: -0.25 }, Some((0.0, 0.25, TridiagVariant::AntiCommuting)));
}

#[test]
fn case_iv_shifted_antisymmetric_methods_agree() {
    cross_check(EtaKind::Tridiagonal { c: 0.25, p: 0.25, q: -0.25 }, Some((0.25, 0.25, TridiagVariant::AntiCommuting)));
}

#[test]
fn finite_spectrum_tracks_continuum_closely() {
    let lambdas = tridiagonal_spectrum(0.25, 0.25, 0.25, N);
    let a = spectrum_contour(&lambdas, KAPPA, POINTS).unwrap();
    let b = tridiag_contour(0.25, 0.25, KAPPA, TridiagVariant::Symmetric, POINTS).unwrap();
    assert!(hausdorff_distance(&a.points, &b.points) < 1e-3);
}

#[test]
fn spectrum_contour_ignores_eigenvalue_order() {
    let lambdas = tridiagonal_spectrum(0.25, 0.3, 0.3, 128);
    let mut shuffled = lambdas.clone();
    shuffled.reverse();
    shuffled.rotate_left(37);
    let a = spectrum_contour(&lambdas, KAPPA, POINTS).unwrap();
    let b = spectrum_contour(&shuffled, KAPPA, POINTS).unwrap();
    let gap = a.points.iter().zip(&b.points).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(gap < 1e-8, "{gap}");
}

#[test]
fn uncorrelated_contours_are_point_symmetric() {
    for curve in [
        ellipse_contour(0.0, KAPPA, POINTS).unwrap(),
        tridiag_contour(0.0, 0.25, KAPPA, TridiagVariant::Symmetric, POINTS).unwrap(),
        tridiag_contour(0.0, 0.3, KAPPA, TridiagVariant::AntiCommuting, POINTS).unwrap(),
    ] {
        let flipped: Vec<Complex64> = curve.points.iter().map(|z| -z).collect();
        assert!(hausdorff_distance(&curve.points, &flipped) < 1e-6);
        assert!(conj_gap(&curve) < 1e-6);
    }
}

#[test]
fn figure_panels_are_simple_curves() {
    for c0 in [0.125, 0.25, 0.3125, 0.375] {
        for (c, v) in [
            (0.25, TridiagVariant::Symmetric),
            (0.0, TridiagVariant::AntiCommuting),
            (0.25, TridiagVariant::AntiCommuting),
        ] {
            let curve = tridiag_contour(c, c0, KAPPA, v, POINTS).unwrap();
            curve.check_simple().unwrap();
            assert!(curve.area() > 0.0);
        }
    }
}

#[test]
fn nonnormal_contour_departs_from_normal_twin() {
    let nonnormal = make_eta(&EtaSpec::new(EtaKind::Tridiagonal { c: 0.25, p: 0.25, q: 0.5 }, N)).unwrap();
    let twin = 0.125f64.sqrt();
    let normal = make_eta(&EtaSpec::new(EtaKind::Tridiagonal { c: 0.25, p: twin, q: twin }, N)).unwrap();
    let a = general_contour(&nonnormal, KAPPA, POINTS).unwrap();
    let b = spectrum_contour(&normal.eigenvalues().unwrap(), KAPPA, POINTS).unwrap();
    assert!(hausdorff_distance(&a.points, &b.points) > 0.02);
    a.check_simple().unwrap();
}

#[test]
fn uncorrelated_unit_kappa_green_function() {
    for z in [Complex64::new(0.5, 0.0), Complex64::new(0.1, 0.3), Complex64::new(-0.2, -0.6)] {
        let g = loop_solve_diagonal(z, 0.0, 1.0).unwrap().g;
        let want = z.norm() / z;
        assert!((g - want).norm() < 1e-14);
    }
}

#[test]
fn green_function_is_holomorphic_outside_and_matches_asymptotics() {
    let model = DensityModel::new(0.25, 0.5).unwrap();
    for z in [Complex64::new(3.0, 0.5), Complex64::new(-2.0, 2.0), Complex64::new(0.0, -4.0)] {
        let d = dbar(|w| green_diagonal(w, &model).unwrap(), z, 1e-6);
        assert!(d.norm() < 1e-6);
    }
    // g(z) ~ 1/z far away
    let far = Complex64::new(1e4, 3e3);
    let g = green_diagonal(far, &model).unwrap();
    assert!((g * far - 1.0).norm() < 1e-3);
}

#[test]
fn green_function_continuous_across_boundary() {
    let model = DensityModel::new(0.25, 0.5).unwrap();
    let (x0, a, b) = model.ellipse();
    for k in 0..16 {
        let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / 16.0;
        let edge = Complex64::new(x0 + a * t.cos(), b * t.sin());
        let inside = green_diagonal(edge * (1.0 - 1e-9) + x0 * 1e-9, &model).unwrap();
        let outside = green_diagonal(edge * (1.0 + 1e-9) - x0 * 1e-9, &model).unwrap();
        assert!((inside - outside).norm() < 1e-6, "angle {t}");
    }
}

#[test]
fn radial_density_independent_of_sign_of_c() {
    let plus = DensityModel::new(0.25, KAPPA).unwrap();
    let minus = DensityModel::new(-0.25, KAPPA).unwrap();
    for k in 1..60 {
        let r = k as f64 / 50.0;
        let (a, b) = (radial_density(r, &plus, 257), radial_density(r, &minus, 257));
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn marginals_reflect_with_c() {
    let plus = DensityModel::new(0.25, KAPPA).unwrap();
    let minus = DensityModel::new(-0.25, KAPPA).unwrap();
    for k in 0..40 {
        let t = -1.2 + 2.4 * k as f64 / 39.0;
        let x = marginal_density(Axis::X, t, &plus, 1025);
        assert!((x - marginal_density(Axis::X, -t, &minus, 1025)).abs() < 1e-9);
        let y = marginal_density(Axis::Y, t, &plus, 1025);
        assert!((y - marginal_density(Axis::Y, -t, &plus, 1025)).abs() < 1e-9);
        assert!((y - marginal_density(Axis::Y, t, &minus, 1025)).abs() < 1e-9);
    }
}

#[test]
fn density_vanishes_outside_support() {
    let model = DensityModel::new(0.25, KAPPA).unwrap();
    let (x0, a, b) = model.ellipse();
    assert_eq!(density_diagonal(Complex64::new(x0 + a * 1.001, 0.0), &model), 0.0);
    assert_eq!(density_diagonal(Complex64::new(x0, b * 1.001), &model), 0.0);
    assert!(density_diagonal(Complex64::new(x0, b * 0.999), &model) > 0.0);
}
