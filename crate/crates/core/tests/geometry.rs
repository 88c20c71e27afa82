use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use soulcurv::geometry::*;
use soulcurv::zoo::{hopf_example, unit_s2_metric, unit_s3_metric, unit_s4};
use soulcurv::Error;

fn s4_curvature(coords: Vec<f64>) -> RiemannAtPoint {
    let e = unit_s4();
    let p = e.metric.point(coords).unwrap();
    riemann(&e.metric, &p, e.hints.fd_step).unwrap()
}

#[test]
fn sign_convention_holds() {
    verify_sign_convention().unwrap();
    let m = unit_s2_metric();
    let r = riemann(&m, &m.point(vec![1.1, 0.4]).unwrap(), m.default_step()).unwrap();
    assert!(frame_sectional(&r, 0, 1) > 0.0);
}

#[test]
fn analytic_and_finite_difference_agree() {
    for metric in [unit_s2_metric(), unit_s3_metric()] {
        let fd = metric.clone().with_mode(DerivativeMode::FiniteDifference);
        let coords: Vec<f64> = (0..metric.dim()).map(|i| 0.6 + 0.1 * i as f64).collect();
        let p = metric.point(coords).unwrap();
        let a = riemann(&metric, &p, metric.default_step()).unwrap();
        let b = riemann(&fd, &p, metric.default_step()).unwrap();
        let diff = a
            .tensor()
            .as_slice()
            .iter()
            .zip(b.tensor().as_slice())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(diff < 1e-4, "{}: {diff}", metric.name());
    }
}

#[test]
fn step_halving_shows_fourth_order() {
    let e = unit_s4();
    let p = e.metric.point(vec![0.3, -0.2, 0.5, 0.1]).unwrap();
    let err = |h: f64| (frame_sectional(&riemann(&e.metric, &p, h).unwrap(), 0, 1) - 1.0).abs();
    let (coarse, fine) = (err(0.08), err(0.04));
    assert!(coarse / fine > 8.0, "ratio {}", coarse / fine);
}

#[test]
fn margin_is_two_steps() {
    let m = unit_s2_metric();
    let lo = m.domain().lo[0];
    let h = 1e-3;
    assert!(riemann(&m, &m.point(vec![lo + 2.0 * h + 1e-9, 0.0]).unwrap(), h).is_ok());
    let near = m.point(vec![lo + 1.5 * h, 0.0]).unwrap();
    assert!(matches!(
        riemann(&m, &near, h),
        Err(Error::DomainMargin { axis: 0, .. })
    ));
}

#[test]
fn hopf_metric_is_symmetric_at_the_soul() {
    let e = hopf_example(1.0).unwrap();
    let p = e.metric.point(vec![0.7, 1.3, 0.0, 0.0]).unwrap();
    let r = riemann(&e.metric, &p, e.hints.fd_step).unwrap();
    assert!(r.residuals().worst() < 1e-6 * r.max_abs());
}

fn coords4() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.2f64..1.2, 4)
}

fn vec4() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sectional_curvature_depends_only_on_the_plane(
        c in coords4(), x in vec4(), y in vec4(), m in prop::collection::vec(-2.0f64..2.0, 4)
    ) {
        let det = m[0] * m[3] - m[1] * m[2];
        prop_assume!(det.abs() > 0.1);
        let r = s4_curvature(c);
        let (x, y) = (DVector::from_vec(x), DVector::from_vec(y));
        let k = match sectional_curvature(&r, &x, &y) { Ok(k) => k, Err(_) => return Ok(()) };
        let x2 = &x * m[0] + &y * m[1];
        let y2 = &x * m[2] + &y * m[3];
        let k2 = sectional_curvature(&r, &x2, &y2).unwrap();
        prop_assert!((k - k2).abs() < 1e-9 * k.abs().max(1.0));
    }

    #[test]
    fn scalar_curvature_is_frame_independent(c in coords4(), seed in prop::collection::vec(-1.0f64..1.0, 16)) {
        let r = s4_curvature(c);
        let vs: Vec<DVector<f64>> = (0..4).map(|i| DVector::from_column_slice(&seed[4 * i..4 * i + 4])).collect();
        let g = r.frame().metric().clone();
        let frame = match orthonormalize(&g, &vs) { Ok(f) => f, Err(_) => return Ok(()) };
        let r2 = r.reframe(&frame);
        prop_assert!((scalar_curvature(&r) - scalar_curvature(&r2)).abs() < 1e-9);
        prop_assert!(r2.residuals().worst() < 1e-9);
    }
}

#[test]
fn kulkarni_nomizu_of_metric_has_constant_curvature() {
    let id = DMatrix::<f64>::identity(4, 4);
    let r = RiemannAtPoint::kulkarni_nomizu(&id, &id);
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                assert_relative_eq!(frame_sectional(&r, i, j), 2.0, epsilon = 1e-14);
            }
        }
    }
}
