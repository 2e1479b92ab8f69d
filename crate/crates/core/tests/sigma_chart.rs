mod common;

use common::lopsided;
use finsler_core::jetcalc::{DiffMode, FdStep};
use finsler_core::sigma_chart::{
    berwald_coframe, flag_curvature, form_step, frame_derivative, indicatrix_lift, killing_residuals,
    landsberg_field, main_scalar_field, random_points, residual_report, scalars_at, structure_residuals,
    write_residual_csv, MIN_AREA,
};
use finsler_core::spherical::builtin::{euclid, funk, funk_reversed, klein_sphere};
use finsler_core::spherical::{vars_from_xy, SphericalMetric};
use finsler_core::Error;

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[test]
fn curvature_is_constant_on_fixtures() {
    let fixtures: [(SphericalMetric, f64); 5] = [
        (funk(), -0.25),
        (funk_reversed(), -0.25),
        (funk().with_scale(0.5), -1.0),
        (klein_sphere(), 1.0),
        (euclid(), 0.0),
    ];
    for (m, k) in fixtures {
        let ks: Vec<f64> = random_points(&m, 100, 11)
            .unwrap()
            .iter()
            .map(|p| flag_curvature(&m, p, FdStep::default()).unwrap())
            .collect();
        let (mean, std) = mean_and_std(&ks);
        assert!(std <= 1e-5, "{}: std {std:e}", m.name);
        assert!((mean - k).abs() <= 1e-5, "{}: mean {mean}", m.name);
    }
}

#[test]
fn lopsided_curvature_varies() {
    let m = lopsided();
    let ks: Vec<f64> = random_points(&m, 20, 5)
        .unwrap()
        .iter()
        .map(|p| flag_curvature(&m, p, FdStep::default()).unwrap())
        .collect();
    assert!(mean_and_std(&ks).1 > 1e-3);
}

#[test]
fn structure_equations_hold() {
    for m in [funk(), funk().with_scale(0.5), klein_sphere(), euclid(), lopsided()] {
        for p in random_points(&m, 40, 2).unwrap() {
            let r = structure_residuals(&m, &p, FdStep::default()).unwrap();
            assert!(r.max() <= 1e-5, "{}: {:?} at {:?}", m.name, r.r, p.chart());
        }
    }
}

#[test]
fn structure_equations_hold_in_fd_mode() {
    let m = funk().with_scale(0.5).with_mode(DiffMode::fd());
    for p in random_points(&m, 20, 8).unwrap() {
        let r = structure_residuals(&m, &p, form_step(m.mode)).unwrap();
        assert!(r.max() <= 1e-5, "{:?} at {:?}", r.r, p.chart());
    }
}

#[test]
fn bianchi_chain() {
    for (m, k) in [(funk().with_scale(0.5), -1.0), (funk(), -0.25), (klein_sphere(), 1.0)] {
        for p in random_points(&m, 30, 4).unwrap() {
            let di = frame_derivative(&m, main_scalar_field, &p, FdStep::default()).unwrap();
            let dj = frame_derivative(&m, landsberg_field, &p, FdStep::default()).unwrap();
            let (i, j) = scalars_at(&m, &p).unwrap();
            assert!((di[0] - j).abs() <= 2e-4, "{}: I_1 = {} vs J = {j}", m.name, di[0]);
            assert!((dj[0] + k * i).abs() <= 2e-4, "{}: J_1 = {} vs -KI = {}", m.name, dj[0], -k * i);
        }
    }
}

#[test]
fn bianchi_chain_general_metric() {
    // I_1 = J does not need constant curvature.
    let m = lopsided();
    for p in random_points(&m, 20, 9).unwrap() {
        let di = frame_derivative(&m, main_scalar_field, &p, FdStep::default()).unwrap();
        let (_, j) = scalars_at(&m, &p).unwrap();
        assert!((di[0] - j).abs() <= 2e-4);
    }
}

#[test]
fn killing_identities() {
    for m in [funk().with_scale(0.5), klein_sphere(), euclid()] {
        for p in random_points(&m, 20, 6).unwrap() {
            let r = killing_residuals(&m, &p, FdStep::default()).unwrap();
            assert!(r.max() <= 1e-4, "{}: {r:?}", m.name);
        }
    }
}

#[test]
fn killing_identities_general_metric() {
    // Only the lj residual relies on constant curvature.
    let m = lopsided();
    for p in random_points(&m, 20, 6).unwrap() {
        let r = killing_residuals(&m, &p, FdStep::default()).unwrap();
        assert!([r.a1, r.a2, r.a3, r.li].iter().all(|v| *v <= 1e-4), "{r:?}");
    }
}

#[test]
fn coframe_nondegenerate_on_samples() {
    for m in [funk(), klein_sphere(), euclid(), lopsided()] {
        for p in random_points(&m, 100, 3).unwrap() {
            let det = berwald_coframe(&m, &p).unwrap().det();
            assert!(det.abs() >= 1e-6, "{}: det {det:e}", m.name);
        }
    }
}

#[test]
fn random_points_respect_area_floor_and_seed() {
    let m = funk();
    let a = random_points(&m, 50, 17).unwrap();
    assert_eq!(a, random_points(&m, 50, 17).unwrap());
    assert_ne!(a, random_points(&m, 50, 18).unwrap());
    for p in &a {
        let v = vars_from_xy(&p.tangent).unwrap();
        assert!(v.area.abs() >= MIN_AREA - 1e-12);
        assert!(p.x1.hypot(p.x2) <= 0.8);
        assert!((m.finsler(&p.tangent).unwrap() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn residual_csv_is_deterministic() {
    let m = klein_sphere();
    let write = || {
        let rows = residual_report(&m, 25, 42, FdStep::default()).unwrap();
        let mut buf = Vec::new();
        write_residual_csv(&mut buf, 42, &rows).unwrap();
        String::from_utf8(buf).unwrap()
    };
    let first = write();
    assert_eq!(first, write());
    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("# seed=42"));
    assert_eq!(lines.next(), Some("point_id,x1,x2,psi,R1,R2,R3,K"));
    assert_eq!(lines.count(), 25);
    assert!(!first.contains('\r'));
}

#[test]
fn lift_outside_domain_fails() {
    assert!(matches!(indicatrix_lift(&funk(), [0.8, 0.7], 0.0), Err(Error::Domain(_))));
}
