use soulcurv::report::{run, RunConfig, Suite, SuiteStatus};
use soulcurv::zoo::{lookup, zoo_catalog};
use soulcurv::Error;

#[test]
fn catalog_names_are_unique_and_resolvable() {
    let names: Vec<String> = zoo_catalog().into_iter().map(|e| e.name).collect();
    assert!(names.len() >= 6);
    for (i, n) in names.iter().enumerate() {
        assert!(!names[..i].contains(n), "duplicate {n}");
        assert_eq!(&lookup(n).unwrap().name, n);
    }
    assert!(matches!(lookup("moebius"), Err(Error::UnknownEntry(_))));
}

#[test]
fn every_expectation_is_checked_and_met() {
    let names: Vec<String> = zoo_catalog().into_iter().map(|e| e.name).collect();
    let mut cfg = RunConfig::for_entries(names, &Suite::ALL);
    cfg.sample_points = 4;
    cfg.soul_points = 2;
    cfg.frame_samples = 200;
    cfg.resolution = 6;
    let report = run(&cfg).unwrap();
    assert!(report.passed, "{:#?}", report.failures);
    for e in &report.entries {
        let has = |suite, check: &str| {
            e.suite(suite)
                .and_then(|s| s.check(check))
                .is_some_and(|c| c.passed)
        };
        let x = &e.expected;
        if x.constant_curvature.is_some() {
            assert!(
                has(Suite::Identities, "constant_sectional_error")
                    && has(Suite::Spectral, "operator_identity_deviation")
            );
        }
        match x.expected_split {
            Some(true) => assert!(has(Suite::Soul, "max_alpha")),
            Some(false) => assert!(has(Suite::Soul, "witness_pattern_residual")),
            None => {}
        }
        if let Some(chi) = x.euler_abs {
            assert!(
                has(
                    Suite::Euler,
                    if chi == 0.0 {
                        "euler_abs"
                    } else {
                        "euler_abs_error"
                    }
                ),
                "{}",
                e.name
            );
        }
        if x.far_field_radial_curvature.is_some() {
            assert!(has(Suite::Identities, "far_field_radial_curvature_error"));
        }
        if x.soul_tangent_curvature.is_some() {
            assert!(has(Suite::Soul, "soul_tangent_curvature_error"));
        }
        for s in &e.suites {
            assert_ne!(s.status, SuiteStatus::Error, "{} {}", e.name, s.suite);
        }
    }
}
