use nswishart::analytics::TridiagVariant;
use nswishart::stats::DensityMode;
use nswishart::EtaKind;
use nswishart_py::{density_mode, eta_kind, tridiag_variant};

#[test]
fn eta_kind_names() {
    assert_eq!(eta_kind("zero", 0.3, 0.0, 0.0, None), Ok(EtaKind::Zero));
    assert_eq!(eta_kind("diagonal", 0.25, 0.0, 0.0, None), Ok(EtaKind::Diagonal { c: 0.25 }));
    assert_eq!(eta_kind("equal", 0.001, 0.0, 0.0, None), Ok(EtaKind::EqualCross { c: 0.001 }));
    assert_eq!(
        eta_kind("tridiagonal", 0.25, 0.25, 0.5, None),
        Ok(EtaKind::Tridiagonal { c: 0.25, p: 0.25, q: 0.5 })
    );
    let rows = vec![vec![0.1, 0.0], vec![0.0, 0.1]];
    assert_eq!(eta_kind("dense", 0.0, 0.0, 0.0, Some(rows.clone())), Ok(EtaKind::Dense { rows }));
    assert!(eta_kind("dense", 0.0, 0.0, 0.0, None).is_err());
    assert!(eta_kind("identity", 0.0, 0.0, 0.0, None).is_err());
}

#[test]
fn mode_and_variant_names() {
    assert_eq!(density_mode("radial"), Ok(DensityMode::Radial));
    assert_eq!(density_mode("marginal_y"), Ok(DensityMode::MarginalY));
    assert_eq!(density_mode("planar"), Ok(DensityMode::Planar2D));
    assert!(density_mode("angular").is_err());
    assert_eq!(tridiag_variant("anticommuting"), Ok(TridiagVariant::AntiCommuting));
    assert!(tridiag_variant("skew").is_err());
}
