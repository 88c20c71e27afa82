//! Catalog of metrics with known curvature, including the non-splitting quotient
//! `S³ ×_{S¹} R²` built from the Hopf action and a capped rotationally symmetric plane.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{CoordBox, CurvatureFlag, MetricField, Point};
use crate::soul::SoulSpec;

/// Margin between a Hopf-coordinate pole and the sampling boxes.
pub const POLE_SAMPLING_MARGIN: f64 = 0.1;
/// Margin between a pole and the soul quadrature box; the strip in between is
/// accounted for by the quadrature's pole-cap correction.
pub const POLE_QUADRATURE_MARGIN: f64 = 0.05;
/// Margin between a pole and the chart's valid domain.
pub const POLE_DOMAIN_MARGIN: f64 = 0.02;
pub const DEFAULT_CAP_RADIUS: f64 = 1.0;

pub type VectorFieldFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
pub type SectionFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type SectionDiffFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Data for the quotient of a total space by a one-parameter isometry group.
#[derive(Clone)]
pub struct QuotientMetricSpec {
    pub name: String,
    pub chart: String,
    pub total: MetricField,
    /// Generator of the action, in total-space coordinates.
    pub killing: VectorFieldFn,
    /// Slice of the action, from quotient coordinates into the total space.
    pub section: SectionFn,
    /// Differential of `section`, `total_dim × quotient_dim`.
    pub section_differential: SectionDiffFn,
    pub quotient_domain: CoordBox,
}

impl fmt::Debug for QuotientMetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuotientMetricSpec")
            .field("name", &self.name)
            .field("total", &self.total)
            .field("quotient_domain", &self.quotient_domain)
            .finish_non_exhaustive()
    }
}

impl QuotientMetricSpec {
    pub fn quotient_dim(&self) -> usize {
        self.quotient_domain.dim()
    }
}

enum QuotientDefect {
    Killing,
    Transverse,
}

/// `⟨P dσ(v), P dσ(w)⟩` with `P` the orthogonal projection off the Killing direction.
fn quotient_eval(
    spec: &QuotientMetricSpec,
    q: &[f64],
) -> std::result::Result<DMatrix<f64>, QuotientDefect> {
    let x = (spec.section)(q);
    let g = spec
        .total
        .eval_coords(&x)
        .map_err(|_| QuotientDefect::Killing)?;
    let k = (spec.killing)(&x);
    let ds = (spec.section_differential)(q);
    let kk = k.dot(&(&g * &k));
    let scale = g.diagonal().amax();
    if !(kk > 1e-24 * scale) {
        return Err(QuotientDefect::Killing);
    }
    let gs = ds.transpose() * &g * &ds;
    let c = ds.transpose() * (&g * &k);
    let out = &gs - (&c * c.transpose()) / kk;
    let out = (&out + out.transpose()) * 0.5;
    // transversality: the projected differential keeps full rank
    let diag =
        DMatrix::from_diagonal(&gs.diagonal().map(|v| 1.0 / v.max(f64::MIN_POSITIVE).sqrt()));
    let normalized = &diag * &out * &diag;
    if !(normalized.determinant() > 1e-12) {
        return Err(QuotientDefect::Transverse);
    }
    Ok(out)
}

/// Metric on the quotient making the projection from the total space a Riemannian submersion.
pub fn quotient_metric(spec: QuotientMetricSpec) -> Result<MetricField> {
    let d = spec.quotient_dim();
    let dom = spec.quotient_domain.clone();
    // corners, edge midpoints and center of the domain
    let grid = 3_usize.pow(d as u32);
    for idx in 0..grid {
        let mut t = Vec::with_capacity(d);
        let mut rem = idx;
        for _ in 0..d {
            t.push((rem % 3) as f64 * 0.5);
            rem /= 3;
        }
        let q = dom.lerp(&t);
        match quotient_eval(&spec, &q) {
            Ok(_) => {}
            Err(QuotientDefect::Killing) => {
                return Err(Error::VanishingKilling {
                    coords: (spec.section)(&q),
                })
            }
            Err(QuotientDefect::Transverse) => {
                return Err(Error::NonTransverseSection {
                    coords: (spec.section)(&q),
                })
            }
        }
    }
    let name = spec.name.clone();
    let chart = spec.chart.clone();
    let spec = Arc::new(spec);
    Ok(MetricField::new(name, chart, dom, move |q| {
        quotient_eval(&spec, q)
            .unwrap_or_else(|_| DMatrix::from_element(q.len(), q.len(), f64::NAN))
    }))
}

fn smoothstep(t: f64) -> f64 {
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

fn smoothstep_prime(t: f64) -> f64 {
    30.0 * t * t * (1.0 - t) * (1.0 - t)
}

/// `∫_0^t smoothstep`.
fn smoothstep_integral(t: f64) -> f64 {
    t.powi(4) * (2.5 + t * (-3.0 + t))
}

/// Warping function of a rotationally symmetric plane metric `dr² + φ(r)² dθ²` that is
/// Euclidean for `r ≤ r0/2` and a cylinder of radius `3r0/4` for `r ≥ r0`.
///
/// `φ' = 1 − S(t)` with `S` the quintic smoothstep on `t = (r − r0/2)/(r0/2)`, so `φ''` is
/// nonpositive and `C¹`, and the plane has `K = −φ''/φ ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CapProfile {
    pub r0: f64,
}

impl CapProfile {
    fn t(&self, r: f64) -> f64 {
        ((r - 0.5 * self.r0) / (0.5 * self.r0)).clamp(0.0, 1.0)
    }

    pub fn phi(&self, r: f64) -> f64 {
        if r <= 0.5 * self.r0 {
            r
        } else if r >= self.r0 {
            0.75 * self.r0
        } else {
            r - 0.5 * self.r0 * smoothstep_integral(self.t(r))
        }
    }

    pub fn dphi(&self, r: f64) -> f64 {
        1.0 - smoothstep(self.t(r))
    }

    pub fn d2phi(&self, r: f64) -> f64 {
        if r <= 0.5 * self.r0 || r >= self.r0 {
            return 0.0;
        }
        -smoothstep_prime(self.t(r)) * 2.0 / self.r0
    }

    /// Radius of the asymptotic cylinder.
    pub fn cylinder_radius(&self) -> f64 {
        0.75 * self.r0
    }

    /// `φ(r)/r`, equal to 1 on the Euclidean core.
    fn ratio(&self, r: f64) -> f64 {
        if r <= 0.5 * self.r0 {
            1.0
        } else {
            self.phi(r) / r
        }
    }

    /// The plane metric in Cartesian coordinates, smooth through the origin.
    pub fn cartesian_metric(&self, a: f64, b: f64) -> DMatrix<f64> {
        let r = a.hypot(b);
        let q = self.ratio(r).powi(2);
        if q == 1.0 {
            return DMatrix::identity(2, 2);
        }
        let (na, nb) = (a / r, b / r);
        DMatrix::from_row_slice(
            2,
            2,
            &[
                na * na + q * nb * nb,
                (1.0 - q) * na * nb,
                (1.0 - q) * na * nb,
                nb * nb + q * na * na,
            ],
        )
    }
}

pub fn cap_profile(r0: f64) -> Result<CapProfile> {
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::InvalidCapRadius(r0));
    }
    Ok(CapProfile { r0 })
}

/// `dr² + φ(r)² dθ²` on a polar chart `(r, θ)`.
pub fn polar_plane(
    name: &str,
    domain: CoordBox,
    profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> MetricField {
    MetricField::new(name, format!("{name}_polar"), domain, move |x| {
        DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, profile(x[0]).powi(2)]))
    })
}

/// Claims about an entry that the verification suites check.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Expectations {
    pub constant_curvature: Option<f64>,
    pub expected_split: Option<bool>,
    pub euler_abs: Option<f64>,
    pub curvature_flags: Vec<CurvatureFlag>,
    /// Curvature of planes containing the radial fiber direction outside the cap.
    pub far_field_radial_curvature: Option<f64>,
    /// Sectional curvature of the soul's tangent plane.
    pub soul_tangent_curvature: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingHints {
    /// Box for generic ambient sample points.
    pub sample_box: CoordBox,
    pub fd_step: f64,
    /// Box for soul parameters used by the pointwise suites.
    pub soul_sample_box: Option<CoordBox>,
    /// Points outside the cap, where the metric is a product with a line.
    #[serde(skip)]
    pub far_field_points: Vec<Point>,
    /// Radial unit direction at each far-field point in chart coordinates (unnormalized).
    #[serde(skip)]
    pub far_field_radial: Vec<DVector<f64>>,
}

#[derive(Clone, Debug)]
pub struct ZooEntry {
    pub name: String,
    pub description: String,
    pub metric: MetricField,
    pub soul: Option<SoulSpec>,
    pub expected: Expectations,
    pub hints: SamplingHints,
}

fn diag(v: Vec<f64>) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(v))
}

fn hints(sample_box: CoordBox, metric: &MetricField) -> SamplingHints {
    SamplingHints {
        sample_box,
        fd_step: metric.default_step(),
        soul_sample_box: None,
        far_field_points: Vec::new(),
        far_field_radial: Vec::new(),
    }
}

pub fn flat(n: usize) -> ZooEntry {
    let metric = MetricField::new(
        format!("flat_r{n}"),
        format!("cartesian_{n}"),
        CoordBox::cube(n, -2.0, 2.0),
        move |_| DMatrix::identity(n, n),
    )
    .with_flags(&[
        CurvatureFlag::Flat,
        CurvatureFlag::NonnegativeSectional,
        CurvatureFlag::NonnegativeCurvatureOperator,
    ]);
    ZooEntry {
        name: format!("flat_r{n}"),
        description: format!("Euclidean R^{n}"),
        hints: hints(CoordBox::cube(n, -1.5, 1.5), &metric),
        expected: Expectations {
            constant_curvature: Some(0.0),
            curvature_flags: metric.flags().to_vec(),
            ..Expectations::default()
        },
        metric,
        soul: None,
    }
}

/// Unit 2-sphere `dθ² + sin²θ dφ²` with analytic derivatives.
pub fn unit_s2_metric() -> MetricField {
    let m = POLE_DOMAIN_MARGIN;
    MetricField::new(
        "unit_s2",
        "s2_spherical",
        CoordBox::new(vec![m, -4.0], vec![PI - m, 4.0]),
        |x| diag(vec![1.0, x[0].sin().powi(2)]),
    )
    .with_analytic(
        Arc::new(|x| vec![diag(vec![0.0, (2.0 * x[0]).sin()]), DMatrix::zeros(2, 2)]),
        Arc::new(|x| {
            let z = DMatrix::zeros(2, 2);
            vec![
                vec![diag(vec![0.0, 2.0 * (2.0 * x[0]).cos()]), z.clone()],
                vec![z.clone(), z],
            ]
        }),
    )
    .with_flags(&[
        CurvatureFlag::NonnegativeSectional,
        CurvatureFlag::NonnegativeCurvatureOperator,
    ])
}

pub fn unit_s2() -> ZooEntry {
    let metric = unit_s2_metric();
    let p = POLE_SAMPLING_MARGIN;
    ZooEntry {
        name: "unit_s2".into(),
        description: "round unit 2-sphere, spherical coordinates".into(),
        hints: hints(CoordBox::new(vec![p, -3.0], vec![PI - p, 3.0]), &metric),
        expected: Expectations {
            constant_curvature: Some(1.0),
            curvature_flags: metric.flags().to_vec(),
            ..Expectations::default()
        },
        metric,
        soul: None,
    }
}

/// Unit 3-sphere in Hopf coordinates, `dη² + cos²η dξ₁² + sin²η dξ₂²`.
pub fn unit_s3_metric() -> MetricField {
    let m = POLE_DOMAIN_MARGIN;
    MetricField::new(
        "unit_s3",
        "s3_hopf",
        CoordBox::new(vec![m, -8.0, -8.0], vec![FRAC_PI_2 - m, 8.0, 8.0]),
        |x| diag(vec![1.0, x[0].cos().powi(2), x[0].sin().powi(2)]),
    )
    .with_analytic(
        Arc::new(|x| {
            let s = (2.0 * x[0]).sin();
            vec![
                diag(vec![0.0, -s, s]),
                DMatrix::zeros(3, 3),
                DMatrix::zeros(3, 3),
            ]
        }),
        Arc::new(|x| {
            let c = 2.0 * (2.0 * x[0]).cos();
            let z = DMatrix::zeros(3, 3);
            let mut out = vec![vec![z.clone(); 3]; 3];
            out[0][0] = diag(vec![0.0, -c, c]);
            out
        }),
    )
    .with_flags(&[
        CurvatureFlag::NonnegativeSectional,
        CurvatureFlag::NonnegativeCurvatureOperator,
    ])
}

pub fn unit_s3() -> ZooEntry {
    let metric = unit_s3_metric();
    let p = POLE_SAMPLING_MARGIN;
    ZooEntry {
        name: "unit_s3".into(),
        description: "round unit 3-sphere, Hopf coordinates".into(),
        hints: hints(
            CoordBox::new(vec![p, -3.0, -3.0], vec![FRAC_PI_2 - p, 3.0, 3.0]),
            &metric,
        ),
        expected: Expectations {
            constant_curvature: Some(1.0),
            curvature_flags: metric.flags().to_vec(),
            ..Expectations::default()
        },
        metric,
        soul: None,
    }
}

/// Unit 4-sphere in stereographic coordinates, `4|dx|²/(1+|x|²)²`.
pub fn unit_s4() -> ZooEntry {
    let metric = MetricField::new(
        "unit_s4",
        "s4_stereographic",
        CoordBox::cube(4, -2.0, 2.0),
        |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            DMatrix::identity(4, 4) * (4.0 / (1.0 + r2).powi(2))
        },
    )
    .with_flags(&[
        CurvatureFlag::NonnegativeSectional,
        CurvatureFlag::NonnegativeCurvatureOperator,
    ]);
    ZooEntry {
        name: "unit_s4".into(),
        description: "round unit 4-sphere, stereographic chart".into(),
        hints: hints(CoordBox::cube(4, -1.5, 1.5), &metric),
        expected: Expectations {
            constant_curvature: Some(1.0),
            curvature_flags: metric.flags().to_vec(),
            ..Expectations::default()
        },
        metric,
        soul: None,
    }
}

pub fn product_s2_r2() -> ZooEntry {
    let m = POLE_DOMAIN_MARGIN;
    let metric = MetricField::new(
        "product_s2_r2",
        "s2_x_r2",
        CoordBox::new(
            vec![m, -1.0, -3.0, -3.0],
            vec![PI - m, 2.0 * PI + 1.0, 3.0, 3.0],
        ),
        |x| diag(vec![1.0, x[0].sin().powi(2), 1.0, 1.0]),
    )
    .with_flags(&[
        CurvatureFlag::NonnegativeSectional,
        CurvatureFlag::NonnegativeCurvatureOperator,
    ]);
    let q = POLE_QUADRATURE_MARGIN;
    let soul = SoulSpec::coordinate_slice(
        "s2_x_0",
        metric.clone(),
        CoordBox::new(vec![q, 0.0], vec![PI - q, 2.0 * PI]),
        vec![0, 1],
        vec![0.0; 4],
    )
    .with_pole_edge(0, false, 0.0)
    .with_pole_edge(0, true, PI);
    let p = POLE_SAMPLING_MARGIN;
    let mut h = hints(
        CoordBox::new(vec![p, 0.0, -2.0, -2.0], vec![PI - p, 2.0 * PI, 2.0, 2.0]),
        &metric,
    );
    h.soul_sample_box = Some(CoordBox::new(vec![p, 0.0], vec![PI - p, 2.0 * PI]));
    ZooEntry {
        name: "product_s2_r2".into(),
        description: "metric product of the unit 2-sphere with the Euclidean plane".into(),
        hints: h,
        expected: Expectations {
            expected_split: Some(true),
            euler_abs: Some(0.0),
            curvature_flags: metric.flags().to_vec(),
            soul_tangent_curvature: Some(1.0),
            ..Expectations::default()
        },
        metric,
        soul: Some(soul),
    }
}

pub fn product_t2_r2() -> ZooEntry {
    let metric = MetricField::new(
        "product_t2_r2",
        "t2_x_r2",
        CoordBox::new(
            vec![-1.0, -1.0, -3.0, -3.0],
            vec![2.0 * PI + 1.0, 2.0 * PI + 1.0, 3.0, 3.0],
        ),
        |_| DMatrix::identity(4, 4),
    )
    .with_flags(&[
        CurvatureFlag::Flat,
        CurvatureFlag::NonnegativeSectional,
        CurvatureFlag::NonnegativeCurvatureOperator,
    ]);
    let soul = SoulSpec::coordinate_slice(
        "t2_x_0",
        metric.clone(),
        CoordBox::new(vec![0.0, 0.0], vec![2.0 * PI, 2.0 * PI]),
        vec![0, 1],
        vec![0.0; 4],
    );
    let mut h = hints(
        CoordBox::new(
            vec![0.0, 0.0, -2.0, -2.0],
            vec![2.0 * PI, 2.0 * PI, 2.0, 2.0],
        ),
        &metric,
    );
    h.soul_sample_box = Some(CoordBox::new(vec![0.0, 0.0], vec![2.0 * PI, 2.0 * PI]));
    ZooEntry {
        name: "product_t2_r2".into(),
        description: "flat torus times the Euclidean plane (chartwise flat)".into(),
        hints: h,
        expected: Expectations {
            constant_curvature: Some(0.0),
            expected_split: Some(true),
            euler_abs: Some(0.0),
            curvature_flags: metric.flags().to_vec(),
            soul_tangent_curvature: Some(0.0),
            ..Expectations::default()
        },
        metric,
        soul: Some(soul),
    }
}

/// Quotient of the unit `S³` by the Hopf action, on the slice `ξ₁ = 0`; a round sphere of radius ½.
pub fn hopf_quotient_spec() -> QuotientMetricSpec {
    let m = POLE_DOMAIN_MARGIN;
    QuotientMetricSpec {
        name: "hopf_s2".into(),
        chart: "hopf_s2".into(),
        total: unit_s3_metric(),
        killing: Arc::new(|_| DVector::from_vec(vec![0.0, 1.0, 1.0])),
        section: Arc::new(|q| vec![q[0], 0.0, q[1]]),
        section_differential: Arc::new(|_| {
            DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0])
        }),
        quotient_domain: CoordBox::new(vec![m, -4.0], vec![FRAC_PI_2 - m, 4.0]),
    }
}

fn s3_times_plane(fiber: impl Fn(f64, f64) -> DMatrix<f64> + Send + Sync + 'static) -> MetricField {
    let m = POLE_DOMAIN_MARGIN;
    MetricField::new(
        "s3_x_r2",
        "s3_hopf_x_r2",
        CoordBox::new(
            vec![m, -8.0, -8.0, -5.0, -5.0],
            vec![FRAC_PI_2 - m, 8.0, 8.0, 5.0, 5.0],
        ),
        move |x| {
            let mut g = DMatrix::zeros(5, 5);
            g[(0, 0)] = 1.0;
            g[(1, 1)] = x[0].cos().powi(2);
            g[(2, 2)] = x[0].sin().powi(2);
            let f = fiber(x[3], x[4]);
            g.view_mut((3, 3), (2, 2)).copy_from(&f);
            g
        },
    )
}

/// Diagonal circle action on `S³ × (R², fiber)`: Hopf on the sphere, rotation on the plane.
pub fn diagonal_quotient_spec(
    fiber: impl Fn(f64, f64) -> DMatrix<f64> + Send + Sync + 'static,
) -> QuotientMetricSpec {
    let m = POLE_DOMAIN_MARGIN;
    QuotientMetricSpec {
        name: "hopf_example".into(),
        chart: "hopf_quotient".into(),
        total: s3_times_plane(fiber),
        killing: Arc::new(|x| DVector::from_vec(vec![0.0, 1.0, 1.0, -x[4], x[3]])),
        section: Arc::new(|q| vec![q[0], 0.0, q[1], q[2], q[3]]),
        section_differential: Arc::new(|_| {
            let mut d = DMatrix::zeros(5, 4);
            d[(0, 0)] = 1.0;
            d[(2, 1)] = 1.0;
            d[(3, 2)] = 1.0;
            d[(4, 3)] = 1.0;
            d
        }),
        quotient_domain: CoordBox::new(
            vec![m, -1.0, -4.0, -4.0],
            vec![FRAC_PI_2 - m, 2.0 * PI + 1.0, 4.0, 4.0],
        ),
    }
}

/// `M = S³ ×_{S¹} R²` with the capped plane of radius parameter `r0`, in the chart
/// `(η, β, a, b)`: `η, β` parametrize the slice `ξ₁ = 0`, `(a, b)` are Cartesian fiber
/// coordinates. The soul is `a = b = 0`, a round sphere of radius ½.
pub fn hopf_example(r0: f64) -> Result<ZooEntry> {
    let cap = cap_profile(r0)?;
    let metric = quotient_metric(diagonal_quotient_spec(move |a, b| {
        cap.cartesian_metric(a, b)
    }))?
    .with_flags(&[CurvatureFlag::NonnegativeSectional]);
    let q = POLE_QUADRATURE_MARGIN;
    let soul = SoulSpec::coordinate_slice(
        "hopf_soul",
        metric.clone(),
        CoordBox::new(vec![q, 0.0], vec![FRAC_PI_2 - q, 2.0 * PI]),
        vec![0, 1],
        vec![0.0; 4],
    )
    .with_pole_edge(0, false, 0.0)
    .with_pole_edge(0, true, FRAC_PI_2);

    let p = POLE_SAMPLING_MARGIN;
    let mut h = hints(
        CoordBox::new(
            vec![p, 0.0, -2.0 * r0, -2.0 * r0],
            vec![FRAC_PI_2 - p, 2.0 * PI, 2.0 * r0, 2.0 * r0],
        ),
        &metric,
    );
    h.soul_sample_box = Some(CoordBox::new(vec![p, 0.0], vec![FRAC_PI_2 - p, 2.0 * PI]));
    for i in 0..8 {
        let s = f64::from(i);
        let eta = p + (FRAC_PI_2 - 2.0 * p) * (0.1 + 0.1 * s);
        let beta = 0.7 * s;
        let r = r0 * (1.2 + 0.2 * s);
        let theta = 0.9 * s + 0.3;
        let (a, b) = (r * theta.cos(), r * theta.sin());
        h.far_field_points
            .push(metric.point(vec![eta, beta, a, b])?);
        h.far_field_radial
            .push(DVector::from_vec(vec![0.0, 0.0, a / r, b / r]));
    }
    Ok(ZooEntry {
        name: "hopf_example".into(),
        description: format!(
            "S3 x_S1 R2 over a capped plane (r0 = {r0}); non-split, nonnegatively curved"
        ),
        hints: h,
        expected: Expectations {
            expected_split: Some(false),
            euler_abs: Some(1.0),
            curvature_flags: metric.flags().to_vec(),
            far_field_radial_curvature: Some(0.0),
            soul_tangent_curvature: Some(4.0),
            ..Expectations::default()
        },
        metric,
        soul: Some(soul),
    })
}

pub fn zoo_catalog() -> Vec<ZooEntry> {
    vec![
        flat(2),
        flat(3),
        flat(4),
        unit_s2(),
        unit_s3(),
        unit_s4(),
        product_s2_r2(),
        product_t2_r2(),
        hopf_example(DEFAULT_CAP_RADIUS).expect("default hopf example is valid"),
    ]
}

pub fn lookup(name: &str) -> Result<ZooEntry> {
    zoo_catalog()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{frame_sectional, riemann};

    #[test]
    fn cap_profile_invariants() {
        let cap = cap_profile(1.0).unwrap();
        assert_eq!(cap.phi(0.0), 0.0);
        assert_eq!(cap.dphi(0.0), 1.0);
        assert_eq!(cap.phi(1.0), 0.75);
        assert_eq!(cap.phi(3.0), 0.75);
        assert_eq!(cap.dphi(1.5), 0.0);
        for i in 0..1000 {
            let r = 2.0 * f64::from(i) / 999.0;
            assert!(cap.d2phi(r) <= 1e-12);
        }
        // derivatives match differences of phi
        for &r in &[0.55, 0.7, 0.8, 0.95] {
            let h = 1e-5;
            assert!(((cap.phi(r + h) - cap.phi(r - h)) / (2.0 * h) - cap.dphi(r)).abs() < 1e-8);
            assert!(((cap.dphi(r + h) - cap.dphi(r - h)) / (2.0 * h) - cap.d2phi(r)).abs() < 1e-7);
        }
        // continuity of the second derivative at the joins
        assert!(cap.d2phi(0.5 + 1e-9).abs() < 1e-12);
        assert!(cap.d2phi(1.0 - 1e-9).abs() < 1e-12);
    }

    #[test]
    fn cap_profile_rejects_nonpositive_radius() {
        assert!(matches!(cap_profile(0.0), Err(Error::InvalidCapRadius(_))));
        assert!(matches!(cap_profile(-1.0), Err(Error::InvalidCapRadius(_))));
    }

    #[test]
    fn capped_plane_is_nonnegatively_curved() {
        let cap = cap_profile(1.0).unwrap();
        let plane = polar_plane(
            "cap",
            CoordBox::new(vec![0.05, -4.0], vec![3.0, 4.0]),
            move |r| cap.phi(r),
        );
        for i in 0..40 {
            let r = 0.1 + 2.5 * f64::from(i) / 39.0;
            let rie = riemann(&plane, &plane.point(vec![r, 0.2]).unwrap(), 1e-3).unwrap();
            let k = frame_sectional(&rie, 0, 1);
            let oracle = -cap.d2phi(r) / cap.phi(r);
            assert!(k >= -1e-6, "K({r}) = {k}");
            assert!((k - oracle).abs() < 1e-4, "K({r}) = {k}, oracle {oracle}");
        }
    }

    #[test]
    fn cartesian_fiber_metric_matches_polar_form() {
        let cap = cap_profile(1.0).unwrap();
        let (r, th) = (0.8_f64, 0.6_f64);
        let g = cap.cartesian_metric(r * th.cos(), r * th.sin());
        let radial = DVector::from_vec(vec![th.cos(), th.sin()]);
        let angular = DVector::from_vec(vec![-r * th.sin(), r * th.cos()]);
        assert!((radial.dot(&(&g * &radial)) - 1.0).abs() < 1e-14);
        assert!((angular.dot(&(&g * &angular)) - cap.phi(r).powi(2)).abs() < 1e-14);
        assert!(radial.dot(&(&g * &angular)).abs() < 1e-14);
    }

    #[test]
    fn rotation_quotient_of_the_plane_is_a_line() {
        let spec = QuotientMetricSpec {
            name: "ray".into(),
            chart: "ray".into(),
            total: MetricField::new("plane", "xy", CoordBox::cube(2, -5.0, 5.0), |_| {
                DMatrix::identity(2, 2)
            }),
            killing: Arc::new(|x| DVector::from_vec(vec![-x[1], x[0]])),
            section: Arc::new(|q| vec![q[0], 0.0]),
            section_differential: Arc::new(|_| DMatrix::from_row_slice(2, 1, &[1.0, 0.0])),
            quotient_domain: CoordBox::new(vec![0.5], vec![4.0]),
        };
        let g = quotient_metric(spec).unwrap();
        for &r in &[0.6, 1.0, 3.5] {
            assert_eq!(g.eval(&g.point(vec![r]).unwrap()).unwrap()[(0, 0)], 1.0);
        }
    }

    #[test]
    fn vanishing_killing_field_is_rejected() {
        let spec = QuotientMetricSpec {
            name: "ray".into(),
            chart: "ray".into(),
            total: MetricField::new("plane", "xy", CoordBox::cube(2, -5.0, 5.0), |_| {
                DMatrix::identity(2, 2)
            }),
            killing: Arc::new(|x| DVector::from_vec(vec![-x[1], x[0]])),
            section: Arc::new(|q| vec![q[0], 0.0]),
            section_differential: Arc::new(|_| DMatrix::from_row_slice(2, 1, &[1.0, 0.0])),
            quotient_domain: CoordBox::new(vec![-1.0], vec![1.0]),
        };
        assert!(matches!(
            quotient_metric(spec),
            Err(Error::VanishingKilling { .. })
        ));
    }

    #[test]
    fn non_transverse_section_is_rejected() {
        let spec = QuotientMetricSpec {
            name: "orbit".into(),
            chart: "orbit".into(),
            total: MetricField::new("plane", "xy", CoordBox::cube(2, -5.0, 5.0), |_| {
                DMatrix::identity(2, 2)
            }),
            killing: Arc::new(|_| DVector::from_vec(vec![1.0, 0.0])),
            section: Arc::new(|q| vec![q[0], 1.0]),
            section_differential: Arc::new(|_| DMatrix::from_row_slice(2, 1, &[1.0, 0.0])),
            quotient_domain: CoordBox::new(vec![-1.0], vec![1.0]),
        };
        assert!(matches!(
            quotient_metric(spec),
            Err(Error::NonTransverseSection { .. })
        ));
    }

    #[test]
    fn hopf_quotient_is_a_half_radius_sphere() {
        let g = quotient_metric(hopf_quotient_spec()).unwrap();
        for &eta in &[0.2, 0.7, 1.2] {
            let p = g.point(vec![eta, 0.4]).unwrap();
            let m = g.eval(&p).unwrap();
            assert!((m[(1, 1)] - 0.25 * (2.0 * eta).sin().powi(2)).abs() < 1e-14);
            let k = frame_sectional(&riemann(&g, &p, 1e-3).unwrap(), 0, 1);
            assert!((k - 4.0).abs() < 1e-3, "K = {k}");
            // O'Neill: quotient curvature dominates the horizontal curvature 1 of S³
            assert!(k >= 1.0 - 1e-4);
        }
    }

    #[test]
    fn diagonal_quotient_is_positive_definite() {
        let g = quotient_metric(diagonal_quotient_spec(|_, _| DMatrix::identity(2, 2))).unwrap();
        for &(e, b, x, y) in &[
            (0.3, 0.1, 0.0, 0.0),
            (1.0, 2.0, 1.5, -0.5),
            (0.6, 5.0, -2.0, 3.0),
        ] {
            let m = g.eval(&g.point(vec![e, b, x, y]).unwrap()).unwrap();
            assert_eq!(m.shape(), (4, 4));
            assert!((&m - m.transpose()).amax() == 0.0);
            assert!(m.symmetric_eigenvalues().min() > 0.0);
        }
    }

    #[test]
    fn catalog_names_are_unique_and_metadata_consistent() {
        let cat = zoo_catalog();
        assert!(cat.len() >= 6);
        let mut names: Vec<_> = cat.iter().map(|e| e.name.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), cat.len());
        for e in &cat {
            if e.name.starts_with("product") {
                assert_eq!(e.expected.expected_split, Some(true));
            }
        }
        let hopf = lookup("hopf_example").unwrap();
        assert_eq!(hopf.expected.expected_split, Some(false));
        assert_eq!(hopf.expected.euler_abs, Some(1.0));
        assert!(matches!(lookup("nope"), Err(Error::UnknownEntry(_))));
    }
}
