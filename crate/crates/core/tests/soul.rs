use rand::Rng;
use soulcurv::bivector::{curvature_operator, spectral_report};
use soulcurv::geometry::{coordinate_frame, Point, RiemannAtPoint};
use soulcurv::integral::soul_node_curvature;
use soulcurv::sampling::{random_symmetric, stream_rng};
use soulcurv::soul::*;
use soulcurv::zoo::{hopf_example, product_s2_r2, product_t2_r2, ZooEntry};

fn soul_points(entry: &ZooEntry, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let bx = entry.hints.soul_sample_box.clone().unwrap();
    let mut rng = stream_rng(seed, 0);
    (0..count)
        .map(|_| bx.lerp(&[rng.random(), rng.random()]))
        .collect()
}

#[test]
fn hopf_soul_relations_hold() {
    let e = hopf_example(1.0).unwrap();
    let soul = e.soul.as_ref().unwrap();
    for (i, param) in soul_points(&e, 12, 5).iter().enumerate() {
        let (frame, r) = soul_node_curvature(soul, param, e.hints.fd_step).unwrap();
        let rel = pointwise_relations(&r, &frame);
        assert!(rel.holds(), "{rel:?}");
        assert!(
            rel.mixed_plane_max_k < 1e-5
                && rel.flat_plane_residual < 1e-5
                && rel.doubling_residual < 1e-4
        );
        let slack = determinant_inequality(&r, &frame, 10_000, i as u64)
            .value()
            .unwrap();
        assert!(slack >= -1e-8, "sampled determinant slack {slack}");
        // the soul is a round sphere of radius 1/2
        assert!((r.get(0, 1, 1, 0) - 4.0).abs() < 1e-6);
    }
}

#[test]
fn hopf_soul_has_obstruction_witness() {
    let e = hopf_example(1.0).unwrap();
    let soul = e.soul.as_ref().unwrap();
    for (i, param) in soul_points(&e, 4, 9).iter().enumerate() {
        let (frame, r) = soul_node_curvature(soul, param, e.hints.fd_step).unwrap();
        let outcome = obstruction_witness(&r, &frame, 64, i as u64).unwrap();
        let w = outcome.witness().expect("non-flat normal bundle");
        assert!(w.alpha > 0.01);
        assert!(w.orthonormality_residual < 1e-8);
        assert!(w.pattern_residual() < 1e-4);
        assert!((w.sum_value + 0.5 * w.alpha).abs() < 1e-4 * w.alpha);
        let report = spectral_report(&curvature_operator(&r).unwrap(), None).unwrap();
        assert!(!report.k_nonnegative(3));
        assert!(report.k_nonnegative(report.eigenvalues.len()));
    }
}

#[test]
fn product_souls_have_flat_normal_bundles() {
    for e in [product_s2_r2(), product_t2_r2()] {
        let soul = e.soul.as_ref().unwrap();
        for (i, param) in soul_points(&e, 4, 2).iter().enumerate() {
            let (frame, r) = soul_node_curvature(soul, param, e.hints.fd_step).unwrap();
            match obstruction_witness(&r, &frame, 64, i as u64).unwrap() {
                WitnessOutcome::FlatNormalBundle { max_alpha, .. } => {
                    assert!(max_alpha < 1e-7, "{}", e.name)
                }
                other => panic!("{}: {other:?}", e.name),
            }
            let t = trace_inequality(&r, &frame);
            assert!(t.lhs.abs() < 1e-12 && t.trace_slack >= -1e-8 && t.scalar_slack >= -1e-8);
        }
    }
}

#[test]
fn random_algebraic_tensor_is_flagged() {
    let frame = AdaptedFrame::from_frame(
        coordinate_frame(&nalgebra::DMatrix::identity(4, 4)).unwrap(),
        2,
        Point::new("algebraic", vec![0.0; 4]).unwrap(),
    );
    for seed in 0..10 {
        let mut rng = stream_rng(seed, 0);
        let r = RiemannAtPoint::kulkarni_nomizu(
            &random_symmetric(&mut rng, 4),
            &random_symmetric(&mut rng, 4),
        );
        let rel = pointwise_relations(&r, &frame);
        assert!(!rel.holds(), "seed {seed} passed as a soul: {rel:?}");
    }
}

#[test]
fn reversing_normals_negates_normal_curvature() {
    let e = hopf_example(1.0).unwrap();
    let soul = e.soul.as_ref().unwrap();
    let (frame, r) = soul_node_curvature(soul, &[0.6, 2.0], e.hints.fd_step).unwrap();
    let flipped = frame.with_normals_reversed();
    let r2 = soulcurv::geometry::riemann_in_frame(
        &soul.ambient,
        &flipped.point,
        e.hints.fd_step,
        &flipped.frame,
    )
    .unwrap();
    assert!((r.get(0, 1, 3, 2) + r2.get(0, 1, 3, 2)).abs() < 1e-10);
    assert!(r.get(0, 1, 3, 2).abs() > 1.0);
}

#[test]
fn pole_parameter_is_rejected() {
    let e = hopf_example(1.0).unwrap();
    let soul = e.soul.as_ref().unwrap();
    assert!(adapted_frame(soul, &[0.0, 1.0]).is_err());
    assert!(adapted_frame(soul, &[std::f64::consts::FRAC_PI_2, 1.0]).is_err());
}
