//! Configuration-driven runs: pick zoo entries and suites, check every expectation in the
//! entries' metadata, and assemble a versioned JSON report.
//!
//! Every random choice is drawn from a stream derived from the config seed, the entry
//! name, the suite and the point index, so a report is a pure function of its config.
//! Wall time is the one exception and is only included on request.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bivector::{curvature_operator, frame_sum_min, spectral_report, SpectralReport};
use crate::error::{Error, Result};
use crate::geometry::{
    frame_sectional, riemann, scalar_curvature, sectional_curvature, CoordBox, CurvatureFlag,
    SymmetryResiduals, RESIDUAL_SCALE_FLOOR,
};
use crate::integral::{
    euler_number_oriented, norm_inequality_report, soul_node_curvature, NormReport,
    NormalOrientation,
};
use crate::sampling::{random_unit, stream_rng};
use crate::soul::{
    determinant_inequality, obstruction_witness, pointwise_relations_with, Applicable,
    RelationReport, WitnessOutcome,
};
use crate::tolerances::Tolerances;
use crate::zoo::{zoo_catalog, Expectations, ZooEntry};

pub const SCHEMA_VERSION: u32 = 1;

/// Random frames tried by `frame_sum_min` in the spectral suite.
const FRAME_SUM_SAMPLES: usize = 64;
/// Random tangent/normal triples tried by the witness search.
const WITNESS_SEARCH_SAMPLES: usize = 256;
/// Random planes per point for the nonnegative-sectional check.
const PLANE_SAMPLES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Spectral,
    Soul,
    Norms,
    Euler,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Identities,
        Suite::Spectral,
        Suite::Soul,
        Suite::Norms,
        Suite::Euler,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Spectral => "spectral",
            Suite::Soul => "soul",
            Suite::Norms => "norms",
            Suite::Euler => "euler",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.as_str() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    entries: Vec<String>,
    suites: Option<Vec<String>>,
    seed: Option<u64>,
    fd_step: Option<f64>,
    #[serde(default)]
    tolerances: Tolerances,
    r: Option<f64>,
    resolution: Option<usize>,
    output: Option<PathBuf>,
    threads: Option<usize>,
    sample_points: Option<usize>,
    soul_points: Option<usize>,
    frame_samples: Option<usize>,
    record_wall_time: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub entries: Vec<String>,
    pub suites: Vec<Suite>,
    pub seed: u64,
    /// Overrides every entry's recommended finite-difference step.
    pub fd_step: Option<f64>,
    pub tolerances: Tolerances,
    /// Exponent of the norm suite.
    pub r: f64,
    /// Gauss–Legendre points per soul parameter axis.
    pub resolution: usize,
    pub output: Option<PathBuf>,
    /// Worker threads; the report does not depend on it.
    pub threads: Option<usize>,
    /// Ambient points per entry for the identity and spectral suites.
    pub sample_points: usize,
    /// Soul points per entry for the soul suite.
    pub soul_points: usize,
    /// Random frames per soul point for the sampled determinant inequality.
    pub frame_samples: usize,
    pub record_wall_time: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            entries: Vec::new(),
            suites: Suite::ALL.to_vec(),
            seed: 0,
            fd_step: None,
            tolerances: Tolerances::default(),
            r: 2.0,
            resolution: 16,
            output: None,
            threads: None,
            sample_points: 20,
            soul_points: 10,
            frame_samples: 10_000,
            record_wall_time: false,
        }
    }
}

impl RunConfig {
    pub fn for_entries<S: Into<String>>(
        entries: impl IntoIterator<Item = S>,
        suites: &[Suite],
    ) -> Self {
        Self {
            entries: entries.into_iter().map(Into::into).collect(),
            suites: suites.to_vec(),
            ..Self::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let d = Self::default();
        let suites = match raw.suites {
            Some(names) => names
                .iter()
                .map(|s| s.parse())
                .collect::<Result<Vec<Suite>>>()?,
            None => d.suites,
        };
        Ok(Self {
            entries: raw.entries,
            suites,
            seed: raw.seed.unwrap_or(d.seed),
            fd_step: raw.fd_step,
            tolerances: raw.tolerances,
            r: raw.r.unwrap_or(d.r),
            resolution: raw.resolution.unwrap_or(d.resolution),
            output: raw.output,
            threads: raw.threads,
            sample_points: raw.sample_points.unwrap_or(d.sample_points),
            soul_points: raw.soul_points.unwrap_or(d.soul_points),
            frame_samples: raw.frame_samples.unwrap_or(d.frame_samples),
            record_wall_time: raw.record_wall_time.unwrap_or(d.record_wall_time),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Checks everything that does not need an entry's geometry.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.entries.is_empty() {
            return bad("no entries selected".into());
        }
        if self.suites.is_empty() {
            return bad("no suites selected".into());
        }
        if let Some(h) = self.fd_step {
            if !(h.is_finite() && h > 0.0) {
                return bad(format!("fd_step must be positive, got {h}"));
            }
        }
        if !(self.r.is_finite() && self.r >= 1.0) {
            return Err(Error::InvalidExponent(self.r));
        }
        if self.resolution == 0
            || self.sample_points == 0
            || self.soul_points == 0
            || self.frame_samples == 0
        {
            return bad("resolution and sample counts must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value < limit`
    Below,
    /// `value ≤ limit`
    AtMost,
    /// `value ≥ limit`
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, value: f64, comparison: Comparison, limit: f64) -> Self {
        let passed = match comparison {
            Comparison::Below => value < limit,
            Comparison::AtMost => value <= limit,
            Comparison::AtLeast => value >= limit,
        };
        Self {
            name: name.to_string(),
            value,
            comparison,
            limit,
            passed,
        }
    }

    fn below(name: &str, value: f64, limit: f64) -> Self {
        Self::new(name, value, Comparison::Below, limit)
    }

    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self::new(name, value, Comparison::AtMost, limit)
    }

    fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self::new(name, value, Comparison::AtLeast, limit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteStatus {
    Passed,
    Failed,
    NotApplicable,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityPoint {
    pub coords: Vec<f64>,
    pub max_abs_r: f64,
    pub residuals: SymmetryResiduals,
    pub scalar_curvature: f64,
    pub min_frame_sectional: f64,
    pub max_frame_sectional: f64,
    /// Smallest curvature over frame planes and random planes.
    pub min_sampled_sectional: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FarFieldPoint {
    pub coords: Vec<f64>,
    /// `K(radial, e_i)` over the coordinate frame.
    pub radial_curvatures: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityDetail {
    pub points: Vec<IdentityPoint>,
    pub far_field: Vec<FarFieldPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub coords: Vec<f64>,
    pub report: SpectralReport,
    /// `frame_sum_min(k)` for `k = 1..=N`.
    pub frame_minima: Vec<f64>,
    pub max_frame_sum_deviation: f64,
    pub verdict_disagreements: usize,
    /// `max |ρ − κ·Id|` entrywise, for constant-curvature entries.
    pub identity_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralDetail {
    pub points: Vec<SpectralPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SoulPoint {
    pub param: Vec<f64>,
    pub relations: RelationReport,
    pub determinant_sampled: Applicable<f64>,
    pub witness: WitnessOutcome,
    pub tangent_curvature: Option<f64>,
    /// 3-nonnegativity of the curvature operator at the point.
    pub three_nonnegative: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SoulDetail {
    pub points: Vec<SoulPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EulerDetail {
    pub value: f64,
    /// Value with the normal frame order swapped.
    pub reversed: f64,
    pub resolution: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SuiteDetail {
    Identities(IdentityDetail),
    Spectral(SpectralDetail),
    Soul(SoulDetail),
    Norms(NormReport),
    Euler(EulerDetail),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub status: SuiteStatus,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<SuiteDetail>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SuiteReport {
    fn finished(suite: Suite, checks: Vec<Check>, detail: SuiteDetail) -> Self {
        let status = if checks.iter().all(|c| c.passed) {
            SuiteStatus::Passed
        } else {
            SuiteStatus::Failed
        };
        Self {
            suite,
            status,
            checks,
            detail: Some(detail),
            note: None,
        }
    }

    fn not_applicable(suite: Suite, note: impl Into<String>) -> Self {
        Self {
            suite,
            status: SuiteStatus::NotApplicable,
            checks: Vec::new(),
            detail: None,
            note: Some(note.into()),
        }
    }

    fn error(suite: Suite, err: &Error) -> Self {
        Self {
            suite,
            status: SuiteStatus::Error,
            checks: Vec::new(),
            detail: None,
            note: Some(err.to_string()),
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub description: String,
    pub dim: usize,
    pub fd_step: f64,
    pub sample_box: CoordBox,
    pub expected: Expectations,
    pub suites: Vec<SuiteReport>,
}

impl EntryReport {
    pub fn suite(&self, suite: Suite) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == suite)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub entry: String,
    pub suite: Suite,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
    pub fd_step: Option<f64>,
    pub r: f64,
    pub resolution: usize,
    pub sample_points: usize,
    pub soul_points: usize,
    pub frame_samples: usize,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub environment: Environment,
    pub entries: Vec<EntryReport>,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

impl RunReport {
    pub fn entry(&self, name: &str) -> Option<&EntryReport> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// 0 if every expectation held, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Exit code for an error that prevented a run.
pub const CONFIG_ERROR_EXIT: i32 = 2;

/// Runs a validated config; `threads` selects a dedicated pool.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let catalog = zoo_catalog();
    let mut entries = Vec::with_capacity(config.entries.len());
    for name in &config.entries {
        let mut entry = catalog
            .iter()
            .find(|e| &e.name == name)
            .cloned()
            .ok_or_else(|| Error::UnknownEntry(name.clone()))?;
        if let Some(h) = config.fd_step {
            entry.hints.fd_step = h;
        }
        if config.suites.contains(&Suite::Norms) {
            if let Some(soul) = &entry.soul {
                let half_dim = 0.5 * soul.param_dim() as f64;
                if config.r <= half_dim {
                    return Err(Error::HypothesisViolated {
                        r: config.r,
                        half_dim,
                    });
                }
            }
        }
        entries.push(entry);
    }

    let started = Instant::now();
    let body = || {
        entries
            .par_iter()
            .map(|e| run_entry(config, e))
            .collect::<Vec<_>>()
    };
    let reports = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(body),
        None => body(),
    };

    let mut failures = Vec::new();
    for entry in &reports {
        for suite in &entry.suites {
            match suite.status {
                SuiteStatus::Failed => {
                    failures.extend(suite.checks.iter().filter(|c| !c.passed).map(|c| Failure {
                        entry: entry.name.clone(),
                        suite: suite.suite,
                        check: c.name.clone(),
                        detail: format!("{} {:?} {} does not hold", c.value, c.comparison, c.limit),
                    }))
                }
                SuiteStatus::Error => failures.push(Failure {
                    entry: entry.name.clone(),
                    suite: suite.suite,
                    check: "evaluation".into(),
                    detail: suite.note.clone().unwrap_or_default(),
                }),
                SuiteStatus::Passed | SuiteStatus::NotApplicable => {}
            }
        }
    }

    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        environment: Environment {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            fd_step: config.fd_step,
            r: config.r,
            resolution: config.resolution,
            sample_points: config.sample_points,
            soul_points: config.soul_points,
            frame_samples: config.frame_samples,
            tolerances: config.tolerances,
            wall_time_seconds: config
                .record_wall_time
                .then(|| started.elapsed().as_secs_f64()),
        },
        passed: failures.is_empty(),
        entries: reports,
        failures,
    })
}

fn run_entry(config: &RunConfig, entry: &ZooEntry) -> EntryReport {
    let suites = config
        .suites
        .iter()
        .map(|&suite| {
            let outcome = match suite {
                Suite::Identities => identities(config, entry),
                Suite::Spectral => spectral(config, entry),
                Suite::Soul => soul_suite(config, entry),
                Suite::Norms => norms(config, entry),
                Suite::Euler => euler(config, entry),
            };
            outcome.unwrap_or_else(|e| SuiteReport::error(suite, &e))
        })
        .collect();
    EntryReport {
        name: entry.name.clone(),
        description: entry.description.clone(),
        dim: entry.metric.dim(),
        fd_step: entry.hints.fd_step,
        sample_box: entry.hints.sample_box.clone(),
        expected: entry.expected.clone(),
        suites,
    }
}

/// Seed for one (entry, suite, index) stream; FNV-1a over the tag, then SplitMix64.
fn derive_seed(seed: u64, tag: &str, index: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn sample_box_points(bx: &CoordBox, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream_rng(seed, 0);
    (0..count)
        .map(|_| {
            let t: Vec<f64> = (0..bx.dim()).map(|_| rng.random::<f64>()).collect();
            bx.lerp(&t)
        })
        .collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

fn identities(config: &RunConfig, entry: &ZooEntry) -> Result<SuiteReport> {
    let tol = &config.tolerances;
    let metric = &entry.metric;
    let n = metric.dim();
    let step = entry.hints.fd_step;
    let seed = derive_seed(config.seed, &format!("{}/identities", entry.name), 0);
    let coords = sample_box_points(&entry.hints.sample_box, config.sample_points, seed);

    let points = coords
        .into_par_iter()
        .enumerate()
        .map(|(idx, x)| {
            let p = metric.point(x)?;
            let r = riemann(metric, &p, step)?;
            let mut frame_k = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    frame_k.push(frame_sectional(&r, i, j));
                }
            }
            let mut rng = stream_rng(seed, 1 + idx as u64);
            let mut sampled = frame_k.clone();
            for _ in 0..PLANE_SAMPLES {
                let (x, y) = (random_unit(&mut rng, n), random_unit(&mut rng, n));
                if let Ok(k) = sectional_curvature(&r, &x, &y) {
                    sampled.push(k);
                }
            }
            Ok(IdentityPoint {
                coords: p.coords.clone(),
                max_abs_r: r.max_abs(),
                residuals: r.residuals(),
                scalar_curvature: scalar_curvature(&r),
                min_frame_sectional: min_of(frame_k.iter().copied()),
                max_frame_sectional: frame_k.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                min_sampled_sectional: min_of(sampled),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut checks = vec![Check::below(
        "symmetry_residual_rel",
        max_of(
            points
                .iter()
                .map(|p| p.residuals.worst() / p.max_abs_r.max(RESIDUAL_SCALE_FLOOR)),
        ),
        tol.symmetry_rel,
    )];
    if metric.has_flag(CurvatureFlag::Flat) {
        checks.push(Check::below(
            "flat_max_abs_r",
            max_of(points.iter().map(|p| p.max_abs_r)),
            tol.flat_max_r,
        ));
    }
    if let Some(kappa) = entry.expected.constant_curvature {
        let sec_err = max_of(points.iter().flat_map(|p| {
            [
                (p.min_frame_sectional - kappa).abs(),
                (p.max_frame_sectional - kappa).abs(),
            ]
        }));
        let scalar = (n * (n - 1)) as f64 * kappa;
        checks.push(Check::below(
            "constant_sectional_error",
            sec_err,
            tol.constant_curvature,
        ));
        checks.push(Check::below(
            "scalar_curvature_error",
            max_of(points.iter().map(|p| (p.scalar_curvature - scalar).abs())),
            tol.scalar_curvature,
        ));
    }
    if metric.has_flag(CurvatureFlag::NonnegativeSectional) {
        checks.push(Check::at_least(
            "min_sampled_sectional",
            min_of(points.iter().map(|p| p.min_sampled_sectional)),
            -tol.nonneg_sectional,
        ));
    }

    let mut far_field = Vec::new();
    if let Some(k_expected) = entry.expected.far_field_radial_curvature {
        for (p, radial) in entry
            .hints
            .far_field_points
            .iter()
            .zip(&entry.hints.far_field_radial)
        {
            let r = riemann(metric, p, step)?;
            let x = r.frame().components(radial);
            let mut ks = Vec::with_capacity(n);
            for i in 0..n {
                let e = DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
                if let Ok(k) = sectional_curvature(&r, &x, &e) {
                    ks.push(k);
                }
            }
            far_field.push(FarFieldPoint {
                coords: p.coords.clone(),
                radial_curvatures: ks,
            });
        }
        if !far_field.is_empty() {
            checks.push(Check::below(
                "far_field_radial_curvature_error",
                max_of(
                    far_field
                        .iter()
                        .flat_map(|f| f.radial_curvatures.iter().map(|k| (k - k_expected).abs())),
                ),
                tol.far_field,
            ));
        }
    }
    Ok(SuiteReport::finished(
        Suite::Identities,
        checks,
        SuiteDetail::Identities(IdentityDetail { points, far_field }),
    ))
}

fn spectral(config: &RunConfig, entry: &ZooEntry) -> Result<SuiteReport> {
    let tol = &config.tolerances;
    let metric = &entry.metric;
    let step = entry.hints.fd_step;
    let tag = format!("{}/spectral", entry.name);
    let coords = sample_box_points(
        &entry.hints.sample_box,
        config.sample_points,
        derive_seed(config.seed, &tag, 0),
    );
    let kappa = entry.expected.constant_curvature;

    let points = coords
        .into_par_iter()
        .enumerate()
        .map(|(idx, x)| {
            let p = metric.point(x)?;
            let r = riemann(metric, &p, step)?;
            let op = curvature_operator(&r)?;
            let report = spectral_report(&op, None)?;
            let seed = derive_seed(config.seed, &tag, 1 + idx);
            let mut frame_minima = Vec::with_capacity(op.dim());
            let mut deviation: f64 = 0.0;
            let mut disagreements = 0;
            for k in 1..=op.dim() {
                let m = frame_sum_min(&op, k, FRAME_SUM_SAMPLES, seed)?.min_value;
                deviation = deviation.max((m - report.partial_sums[k - 1]).abs());
                if (m >= -report.tolerance) != report.k_nonnegative(k) {
                    disagreements += 1;
                }
                frame_minima.push(m);
            }
            let identity_deviation = kappa.map(|kappa| {
                let n = op.dim();
                (op.m.clone() - nalgebra::DMatrix::<f64>::identity(n, n) * kappa).amax()
            });
            Ok(SpectralPoint {
                coords: p.coords.clone(),
                report,
                frame_minima,
                max_frame_sum_deviation: deviation,
                verdict_disagreements: disagreements,
                identity_deviation,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut checks = vec![
        Check::below(
            "frame_sum_deviation",
            max_of(points.iter().map(|p| p.max_frame_sum_deviation)),
            tol.frame_sum,
        ),
        Check::at_most(
            "verdict_route_disagreements",
            points
                .iter()
                .map(|p| p.verdict_disagreements)
                .sum::<usize>() as f64,
            0.0,
        ),
    ];
    if metric.has_flag(CurvatureFlag::NonnegativeCurvatureOperator) {
        checks.push(Check::at_most(
            "points_not_1_nonnegative",
            points.iter().filter(|p| !p.report.k_nonnegative(1)).count() as f64,
            0.0,
        ));
    }
    if kappa.is_some() {
        checks.push(Check::below(
            "operator_identity_deviation",
            max_of(points.iter().filter_map(|p| p.identity_deviation)),
            tol.constant_curvature,
        ));
    }
    Ok(SuiteReport::finished(
        Suite::Spectral,
        checks,
        SuiteDetail::Spectral(SpectralDetail { points }),
    ))
}

fn soul_suite(config: &RunConfig, entry: &ZooEntry) -> Result<SuiteReport> {
    let Some(soul) = &entry.soul else {
        return Ok(SuiteReport::not_applicable(
            Suite::Soul,
            "entry has no soul",
        ));
    };
    let tol = &config.tolerances;
    let step = entry.hints.fd_step;
    let tag = format!("{}/soul", entry.name);
    let bx = entry
        .hints
        .soul_sample_box
        .as_ref()
        .unwrap_or(&soul.param_box);
    let params = sample_box_points(bx, config.soul_points, derive_seed(config.seed, &tag, 0));

    let points = params
        .into_par_iter()
        .enumerate()
        .map(|(idx, param)| {
            let (frame, r) = soul_node_curvature(soul, &param, step)?;
            let seed = derive_seed(config.seed, &tag, 1 + idx);
            let relations = pointwise_relations_with(&r, &frame, tol.relations());
            let determinant_sampled =
                determinant_inequality(&r, &frame, config.frame_samples, seed);
            let witness = obstruction_witness(&r, &frame, WITNESS_SEARCH_SAMPLES, seed)?;
            let tangent_curvature = (frame.tangent_dim >= 2).then(|| frame_sectional(&r, 0, 1));
            let report = spectral_report(&curvature_operator(&r)?, None)?;
            let three_nonnegative = report.verdict(3).map(|v| v.nonnegative);
            Ok(SoulPoint {
                param,
                relations,
                determinant_sampled,
                witness,
                tangent_curvature,
                three_nonnegative,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let rel = |f: fn(&RelationReport) -> f64| max_of(points.iter().map(|p| f(&p.relations)));
    let mut checks = vec![
        Check::below(
            "mixed_plane_max_k",
            rel(|r| r.mixed_plane_max_k),
            tol.mixed_plane,
        ),
        Check::below(
            "flat_plane_residual",
            rel(|r| r.flat_plane_residual),
            tol.flat_plane,
        ),
        Check::below(
            "doubling_residual",
            rel(|r| r.doubling_residual),
            tol.doubling,
        ),
        Check::at_least(
            "trace_inequality_slack",
            min_of(points.iter().map(|p| p.relations.trace_ineq_slack)),
            -tol.trace_slack,
        ),
    ];
    let frame_det: Vec<f64> = points
        .iter()
        .filter_map(|p| p.relations.determinant_min_slack)
        .collect();
    if !frame_det.is_empty() {
        checks.push(Check::at_least(
            "determinant_frame_min_slack",
            min_of(frame_det),
            -tol.determinant,
        ));
    }
    let sampled_det: Vec<f64> = points
        .iter()
        .filter_map(|p| p.determinant_sampled.clone().value())
        .collect();
    if !sampled_det.is_empty() {
        checks.push(Check::at_least(
            "determinant_sampled_min_slack",
            min_of(sampled_det),
            -tol.determinant,
        ));
    }

    let witnesses: Vec<_> = points.iter().filter_map(|p| p.witness.witness()).collect();
    let applicable = points
        .iter()
        .filter(|p| p.witness.max_alpha().is_some())
        .count();
    match entry.expected.expected_split {
        Some(true) => {
            checks.push(Check::at_most(
                "witness_points",
                witnesses.len() as f64,
                0.0,
            ));
            checks.push(Check::below(
                "max_alpha",
                max_of(points.iter().filter_map(|p| p.witness.max_alpha())),
                tol.flat_normal_alpha,
            ));
        }
        Some(false) => {
            checks.push(Check::at_least(
                "witness_points",
                witnesses.len() as f64,
                applicable.max(1) as f64,
            ));
            checks.push(Check::at_least(
                "min_alpha",
                min_of(witnesses.iter().map(|w| w.alpha)),
                tol.witness_min_alpha,
            ));
            checks.push(Check::below(
                "witness_pattern_residual",
                max_of(witnesses.iter().map(|w| w.pattern_residual())),
                tol.witness_pattern_rel,
            ));
            checks.push(Check::below(
                "witness_orthonormality",
                max_of(witnesses.iter().map(|w| w.orthonormality_residual)),
                tol.witness_orthonormal,
            ));
            checks.push(Check::at_most(
                "witness_points_3_nonnegative",
                points
                    .iter()
                    .filter(|p| p.witness.witness().is_some() && p.three_nonnegative == Some(true))
                    .count() as f64,
                0.0,
            ));
        }
        None => {}
    }
    if let Some(k) = entry.expected.soul_tangent_curvature {
        checks.push(Check::below(
            "soul_tangent_curvature_error",
            max_of(
                points
                    .iter()
                    .filter_map(|p| p.tangent_curvature)
                    .map(|t| (t - k).abs()),
            ),
            tol.soul_tangent,
        ));
    }
    Ok(SuiteReport::finished(
        Suite::Soul,
        checks,
        SuiteDetail::Soul(SoulDetail { points }),
    ))
}

fn norms(config: &RunConfig, entry: &ZooEntry) -> Result<SuiteReport> {
    if entry.soul.is_none() {
        return Ok(SuiteReport::not_applicable(
            Suite::Norms,
            "entry has no soul",
        ));
    }
    let tol = &config.tolerances;
    let report = norm_inequality_report(entry, config.r, config.resolution)?;
    let checks = vec![
        Check::at_least("norm_slack", report.slack, -tol.norm_slack),
        Check::at_least(
            "pointwise_min_trace_slack",
            report.pointwise_min_trace_slack,
            -tol.trace_slack,
        ),
        Check::at_least(
            "pointwise_min_scalar_slack",
            report.pointwise_min_scalar_slack,
            -tol.trace_slack,
        ),
    ];
    Ok(SuiteReport::finished(
        Suite::Norms,
        checks,
        SuiteDetail::Norms(report),
    ))
}

fn euler(config: &RunConfig, entry: &ZooEntry) -> Result<SuiteReport> {
    let Some(soul) = &entry.soul else {
        return Ok(SuiteReport::not_applicable(
            Suite::Euler,
            "entry has no soul",
        ));
    };
    if soul.param_dim() != 2 || soul.normal_rank() != 2 {
        return Ok(SuiteReport::not_applicable(
            Suite::Euler,
            "soul is not a surface with rank-2 normal bundle",
        ));
    }
    let tol = &config.tolerances;
    let value = euler_number_oriented(entry, config.resolution, NormalOrientation::Frame)?;
    let reversed = euler_number_oriented(entry, config.resolution, NormalOrientation::Reversed)?;
    let mut checks = vec![Check::at_most(
        "orientation_defect",
        (value + reversed).abs(),
        0.0,
    )];
    match entry.expected.euler_abs {
        Some(0.0) => checks.push(Check::below("euler_abs", value.abs(), tol.euler_zero)),
        Some(e) => checks.push(Check::below(
            "euler_abs_error",
            (value.abs() - e).abs(),
            tol.euler_nonzero,
        )),
        None => {}
    }
    Ok(SuiteReport::finished(
        Suite::Euler,
        checks,
        SuiteDetail::Euler(EulerDetail {
            value,
            reversed,
            resolution: config.resolution,
        }),
    ))
}
