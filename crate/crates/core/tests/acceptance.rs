//! One line per acceptance criterion; tolerances are literal so they cannot drift with
//! the library defaults.

use std::time::{Duration, Instant};

use rand::Rng;
use soulcurv::bivector::{
    curvature_operator, frame_sum_min, spectral_report, CurvatureOperatorMatrix,
};
use soulcurv::geometry::{
    coordinate_frame, frame_sectional, riemann, scalar_curvature, Point, RiemannAtPoint,
    RESIDUAL_SCALE_FLOOR,
};
use soulcurv::integral::{
    euler_number, euler_number_oriented, norm_inequality_report, soul_node_curvature,
    NormalOrientation,
};
use soulcurv::report::{run, RunConfig, Suite, SuiteDetail, SuiteStatus};
use soulcurv::sampling::{random_symmetric, stream_rng};
use soulcurv::soul::{
    determinant_inequality, obstruction_witness, pointwise_relations, AdaptedFrame, WitnessOutcome,
};
use soulcurv::zoo::{
    hopf_example, product_s2_r2, product_t2_r2, unit_s2, unit_s3, zoo_catalog, ZooEntry,
};
use soulcurv::{Error, Result};

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        passed,
        summary: summary.into(),
    })
}

fn soul_params(e: &ZooEntry, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let bx = e.hints.soul_sample_box.clone().expect("soul sample box");
    let mut rng = stream_rng(seed, 0);
    (0..count)
        .map(|_| bx.lerp(&[rng.random(), rng.random()]))
        .collect()
}

fn tensor_identities() -> Result<Outcome> {
    let started = Instant::now();
    let names: Vec<String> = zoo_catalog().into_iter().map(|e| e.name).collect();
    let mut cfg = RunConfig::for_entries(names.clone(), &[Suite::Identities]);
    cfg.sample_points = 20;
    let report = run(&cfg)?;
    let mut worst_rel: f64 = 0.0;
    let mut worst_flat: f64 = 0.0;
    let mut points = 0;
    for e in &report.entries {
        let Some(SuiteDetail::Identities(d)) =
            &e.suite(Suite::Identities).and_then(|s| s.detail.clone())
        else {
            return outcome(false, format!("{}: identity suite did not run", e.name));
        };
        let flat = e
            .expected
            .curvature_flags
            .contains(&soulcurv::geometry::CurvatureFlag::Flat);
        for p in &d.points {
            points += 1;
            worst_rel = worst_rel.max(p.residuals.worst() / p.max_abs_r.max(RESIDUAL_SCALE_FLOOR));
            if flat {
                worst_flat = worst_flat.max(p.max_abs_r);
            }
        }
    }
    let elapsed = started.elapsed();
    outcome(
        names.len() >= 6 && points >= 20 * names.len() && worst_rel < 1e-6 && worst_flat < 1e-8 && elapsed < Duration::from_secs(20),
        format!(
            "{} entries x 20 points, symmetry residual/max|R| {worst_rel:.2e} (< 1e-6), flat max|R| {worst_flat:.2e} (< 1e-8), {:.1} s (< 20 s)",
            names.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn constant_curvature() -> Result<Outcome> {
    let s3 = unit_s3();
    let p3 = s3.metric.point(vec![0.7, 0.3, -1.1])?;
    let r3 = riemann(&s3.metric, &p3, s3.hints.fd_step)?;
    let op = curvature_operator(&r3)?;
    let op_err = (op.m.clone() - nalgebra::DMatrix::<f64>::identity(3, 3)).amax();
    let s2 = unit_s2();
    let p2 = s2.metric.point(vec![1.2, 0.5])?;
    let r2 = riemann(&s2.metric, &p2, s2.hints.fd_step)?;
    let k_err = (frame_sectional(&r2, 0, 1) - 1.0).abs();
    let s3_err = (scalar_curvature(&r3) - 6.0).abs();
    let s2_err = (scalar_curvature(&r2) - 2.0).abs();
    outcome(
        op_err < 1e-5 && k_err < 1e-5 && s3_err < 1e-4 && s2_err < 1e-4,
        format!("S3 |rho - I| {op_err:.2e}, S2 |K - 1| {k_err:.2e}, scalar errors {s3_err:.2e} / {s2_err:.2e}"),
    )
}

fn ky_fan() -> Result<Outcome> {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    let mut disagreements = 0;
    let mut cases = 0;
    for i in 0..200u64 {
        let mut rng = stream_rng(2024, i);
        let n = rng.random_range(1..=10);
        let shift = rng.random_range(-1.5..1.5);
        let op = CurvatureOperatorMatrix::from_matrix(
            random_symmetric(&mut rng, n) + nalgebra::DMatrix::identity(n, n) * shift,
        )?;
        let report = spectral_report(&op, None)?;
        for k in 1..=n {
            let m = frame_sum_min(&op, k, 32, i)?.min_value;
            worst = worst.max((m - report.partial_sums[k - 1]).abs());
            if (m >= -report.tolerance) != report.k_nonnegative(k) {
                disagreements += 1;
            }
            cases += 1;
        }
    }
    let elapsed = started.elapsed();
    outcome(
        worst < 1e-6 && disagreements == 0 && elapsed < Duration::from_secs(15),
        format!(
            "200 matrices, {cases} (matrix, k) cases, max |frame min - partial sum| {worst:.2e} (< 1e-6), {disagreements} verdict disagreements, {:.1} s (< 15 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn soul_relations() -> Result<Outcome> {
    let e = hopf_example(1.0)?;
    let soul = e.soul.as_ref().expect("soul");
    let (mut mixed, mut flat, mut doubling, mut ineq): (f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, f64::INFINITY);
    let params = soul_params(&e, 12, 77);
    for (i, param) in params.iter().enumerate() {
        let (frame, r) = soul_node_curvature(soul, param, e.hints.fd_step)?;
        let rel = pointwise_relations(&r, &frame);
        mixed = mixed.max(rel.mixed_plane_max_k);
        flat = flat.max(rel.flat_plane_residual);
        doubling = doubling.max(rel.doubling_residual);
        ineq = ineq.min(
            determinant_inequality(&r, &frame, 10_000, i as u64)
                .value()
                .expect("2 + 2 split"),
        );
    }
    let frame = AdaptedFrame::from_frame(
        coordinate_frame(&nalgebra::DMatrix::identity(4, 4))?,
        2,
        Point::new("algebraic", vec![0.0; 4])?,
    );
    let mut rng = stream_rng(13, 0);
    let control = RiemannAtPoint::kulkarni_nomizu(
        &random_symmetric(&mut rng, 4),
        &random_symmetric(&mut rng, 4),
    );
    let flagged = !pointwise_relations(&control, &frame).holds();
    outcome(
        mixed < 1e-5 && flat < 1e-5 && doubling < 1e-4 && ineq >= -1e-8 && flagged,
        format!(
            "{} soul points: mixed |K| {mixed:.2e}, flat-plane {flat:.2e}, doubling relation {doubling:.2e}, sampled determinant slack {ineq:.3} over 1e4 frames, negative control flagged: {flagged}",
            params.len()
        ),
    )
}

fn witness_detector() -> Result<Outcome> {
    let e = hopf_example(1.0)?;
    let soul = e.soul.as_ref().expect("soul");
    let (frame, r) = soul_node_curvature(soul, &[0.8, 1.9], e.hints.fd_step)?;
    let out = obstruction_witness(&r, &frame, 256, 1)?;
    let Some(w) = out.witness() else {
        return outcome(false, "no witness on the Hopf example");
    };
    let three_nonneg = spectral_report(&curvature_operator(&r)?, None)?.k_nonnegative(3);
    let mut product_alpha: f64 = 0.0;
    let mut products_flat = true;
    for p in [product_s2_r2(), product_t2_r2()] {
        let soul = p.soul.as_ref().expect("soul");
        for param in soul_params(&p, 5, 3) {
            let (frame, r) = soul_node_curvature(soul, &param, p.hints.fd_step)?;
            match obstruction_witness(&r, &frame, 256, 1)? {
                WitnessOutcome::FlatNormalBundle { max_alpha, .. } => {
                    product_alpha = product_alpha.max(max_alpha)
                }
                _ => products_flat = false,
            }
        }
    }
    outcome(
        w.alpha > 0.01
            && w.orthonormality_residual < 1e-8
            && w.pattern_residual() < 1e-4
            && !three_nonneg
            && products_flat
            && product_alpha < 1e-7,
        format!(
            "alpha {:.6}, bivector Gram defect {:.1e}, pattern residual {:.1e}, 3-nonnegative {three_nonneg}; products flat {products_flat} with max alpha {product_alpha:.1e}",
            w.alpha,
            w.orthonormality_residual,
            w.pattern_residual()
        ),
    )
}

fn norm_chain() -> Result<Outcome> {
    let e = hopf_example(1.0)?;
    let a = norm_inequality_report(&e, 2.0, 16)?;
    let b = norm_inequality_report(&e, 2.0, 32)?;
    let inequality =
        b.rnabla_norm <= b.s_norm / 3.0 + 1e-6 && a.rnabla_norm <= a.s_norm / 3.0 + 1e-6;
    let stable = ((a.s_norm - b.s_norm) / b.s_norm).abs() < 1e-3
        && ((a.rnabla_norm - b.rnabla_norm) / b.rnabla_norm).abs() < 1e-3;
    let rejected = matches!(
        norm_inequality_report(&e, 1.0, 8),
        Err(Error::HypothesisViolated { .. })
    );
    let pointwise = a.pointwise_min_trace_slack.min(b.pointwise_min_trace_slack);
    outcome(
        pointwise >= -1e-8 && inequality && stable && rejected,
        format!(
            "min pointwise slack {pointwise:.4} over {} nodes, |R^nabla|_2 {:.6} <= |s_M|_2/3 {:.6}, resolution 16 -> 32 change {:.1e}, r = 1 rejected: {rejected}",
            b.node_count,
            b.rnabla_norm,
            b.s_norm / 3.0,
            ((a.rnabla_norm - b.rnabla_norm) / b.rnabla_norm).abs()
        ),
    )
}

fn euler_certificate() -> Result<Outcome> {
    let e = hopf_example(1.0)?;
    let chi = euler_number(&e, 16)?;
    let rev = euler_number_oriented(&e, 16, NormalOrientation::Reversed)?;
    let p1 = euler_number(&product_s2_r2(), 16)?;
    let p2 = euler_number(&product_t2_r2(), 16)?;
    outcome(
        (chi.abs() - 1.0).abs() < 1e-2 && p1.abs() < 1e-6 && p2.abs() < 1e-6 && rev == -chi,
        format!("Hopf {chi:.6}, reversed {rev:.6}, products {p1:.1e} / {p2:.1e}"),
    )
}

fn determinism() -> Result<Outcome> {
    let mut cfg = RunConfig::for_entries(["unit_s4", "product_s2_r2", "hopf_example"], &Suite::ALL);
    cfg.sample_points = 6;
    cfg.soul_points = 3;
    cfg.frame_samples = 1000;
    cfg.resolution = 8;
    cfg.seed = 99;
    let first = run(&cfg)?;
    let again = run(&cfg)?.to_json()?;
    cfg.threads = Some(1);
    let single = run(&cfg)?.to_json()?;
    cfg.threads = Some(3);
    let three = run(&cfg)?.to_json()?;
    let json = first.to_json()?;
    let complete = first
        .entries
        .iter()
        .all(|e| e.suites.iter().all(|s| s.status != SuiteStatus::Error));
    outcome(
        json == again && json == single && json == three && complete,
        format!(
            "{} bytes, identical across repeat and 1 / 3 / default threads: {}",
            json.len(),
            json == again && json == single && json == three
        ),
    )
}

type Criterion = fn() -> Result<Outcome>;

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("tensor identities", tensor_identities),
        ("constant-curvature oracle", constant_curvature),
        ("Ky Fan equivalence", ky_fan),
        ("relations at the soul", soul_relations),
        ("obstruction witness", witness_detector),
        ("norm inequality chain", norm_chain),
        ("Euler certificate", euler_certificate),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (passed, summary) = match check() {
            Ok(o) => (o.passed, o.summary),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "criterion {} [{}] {name}: {summary} ({:.2} s)",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
