use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use super::point::{CoordBox, Point};
use super::tensor::{Tensor3, Tensor4};
use crate::error::{Error, Result};

pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
/// `dg[k]` is the matrix `∂_k g_ij`.
pub type FirstDerivFn = Arc<dyn Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync>;
/// `d2g[l][k]` is the matrix `∂_l ∂_k g_ij`.
pub type SecondDerivFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<DMatrix<f64>>> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    FiniteDifference,
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureFlag {
    Flat,
    NonnegativeSectional,
    NonnegativeCurvatureOperator,
}

#[derive(Clone)]
pub struct AnalyticDerivatives {
    pub first: FirstDerivFn,
    pub second: SecondDerivFn,
}

/// A chart together with a metric tensor on it.
#[derive(Clone)]
pub struct MetricField {
    name: String,
    chart: String,
    dim: usize,
    eval: MetricFn,
    analytic: Option<AnalyticDerivatives>,
    mode: DerivativeMode,
    domain: CoordBox,
    step: f64,
    flags: Vec<CurvatureFlag>,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("name", &self.name)
            .field("chart", &self.chart)
            .field("dim", &self.dim)
            .field("mode", &self.mode)
            .field("domain", &self.domain)
            .field("step", &self.step)
            .field("flags", &self.flags)
            .finish()
    }
}

impl MetricField {
    /// Finite-difference metric; the default step is `1e-3` times the smallest box extent.
    pub fn new(
        name: impl Into<String>,
        chart: impl Into<String>,
        domain: CoordBox,
        eval: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        let step = 1e-3 * domain.min_extent();
        Self {
            name: name.into(),
            chart: chart.into(),
            dim: domain.dim(),
            eval: Arc::new(eval),
            analytic: None,
            mode: DerivativeMode::FiniteDifference,
            domain,
            step,
            flags: Vec::new(),
        }
    }

    /// Attaches analytic derivatives and switches to analytic mode.
    pub fn with_analytic(mut self, first: FirstDerivFn, second: SecondDerivFn) -> Self {
        self.analytic = Some(AnalyticDerivatives { first, second });
        self.mode = DerivativeMode::Analytic;
        self
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        if mode == DerivativeMode::Analytic {
            assert!(
                self.analytic.is_some(),
                "analytic mode needs analytic derivatives"
            );
        }
        self.mode = mode;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        assert!(step > 0.0, "finite-difference step must be positive");
        self.step = step;
        self
    }

    pub fn with_flags(mut self, flags: &[CurvatureFlag]) -> Self {
        self.flags = flags.to_vec();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &str {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &CoordBox {
        &self.domain
    }

    pub fn default_step(&self) -> f64 {
        self.step
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn has_analytic(&self) -> bool {
        self.analytic.is_some()
    }

    pub fn flags(&self) -> &[CurvatureFlag] {
        &self.flags
    }

    pub fn has_flag(&self, flag: CurvatureFlag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        Point::new(self.chart.clone(), coords)
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.chart != self.chart {
            return Err(Error::ChartMismatch {
                expected: self.chart.clone(),
                got: p.chart.clone(),
            });
        }
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        Ok(())
    }

    /// Raw metric evaluation at chart coordinates, symmetrized.
    pub fn eval_coords(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let g = (self.eval)(x);
        if g.nrows() != self.dim || g.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: g.nrows(),
            });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "metric" });
        }
        Ok((&g + g.transpose()) * 0.5)
    }

    /// Metric at a point, checked positive definite.
    pub fn eval(&self, p: &Point) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let g = self.eval_coords(&p.coords)?;
        if g.clone().cholesky().is_none() {
            return Err(Error::SingularMetric {
                condition: f64::INFINITY,
            });
        }
        Ok(g)
    }
}

/// Metric with its first and second coordinate derivatives at a point.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    /// `dg[k][i][j] = ∂_k g_ij`
    pub dg: Tensor3,
    /// `d2g[l][k][i][j] = ∂_l ∂_k g_ij`
    pub d2g: Tensor4,
    pub point: Point,
    pub step: f64,
    pub mode: DerivativeMode,
}

// five-point stencil weights for the first derivative at offsets -2h, -h, h, 2h
const D1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

/// Fourth-order central differences of the metric (stencil reach `2·step`),
/// or the analytic derivatives when the metric carries them in analytic mode.
pub fn metric_jet(metric: &MetricField, p: &Point, step: f64) -> Result<MetricJet> {
    metric.check_point(p)?;
    let n = metric.dim;
    if let Some(axis) = metric.domain.margin_violation(&p.coords, 2.0 * step) {
        return Err(Error::DomainMargin {
            coords: p.coords.clone(),
            axis,
            margin: 2.0 * step,
        });
    }
    let g = metric.eval(p)?;

    if let (DerivativeMode::Analytic, Some(an)) = (metric.mode, &metric.analytic) {
        let first = (an.first)(&p.coords);
        let second = (an.second)(&p.coords);
        let dg = Tensor3::from_fn(n, |k, i, j| 0.5 * (first[k][(i, j)] + first[k][(j, i)]));
        let d2g = Tensor4::from_fn(n, |l, k, i, j| {
            0.25 * (second[l][k][(i, j)]
                + second[l][k][(j, i)]
                + second[k][l][(i, j)]
                + second[k][l][(j, i)])
        });
        if dg
            .as_slice()
            .iter()
            .chain(d2g.as_slice())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite {
                what: "analytic metric derivatives",
            });
        }
        return Ok(MetricJet {
            g,
            dg,
            d2g,
            point: p.clone(),
            step,
            mode: DerivativeMode::Analytic,
        });
    }

    let shifted = |offsets: &[(usize, f64)]| -> Result<DMatrix<f64>> {
        let mut x = p.coords.clone();
        for &(axis, off) in offsets {
            x[axis] += off * step;
        }
        metric.eval_coords(&x)
    };

    let mut dg = Tensor3::zeros(n);
    let mut d2g = Tensor4::zeros(n);
    for k in 0..n {
        let gm2 = shifted(&[(k, -2.0)])?;
        let gm1 = shifted(&[(k, -1.0)])?;
        let gp1 = shifted(&[(k, 1.0)])?;
        let gp2 = shifted(&[(k, 2.0)])?;
        let first = (&gm2 - &gp2 + (&gp1 - &gm1) * 8.0) / (12.0 * step);
        let second = ((&gp1 + &gm1) * 16.0 - (&gp2 + &gm2) - &g * 30.0) / (12.0 * step * step);
        for i in 0..n {
            for j in 0..n {
                dg.set(k, i, j, first[(i, j)]);
                d2g.set(k, k, i, j, second[(i, j)]);
            }
        }
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let mut acc = DMatrix::<f64>::zeros(n, n);
            for &(a, ca) in &D1 {
                for &(b, cb) in &D1 {
                    acc += shifted(&[(k, a), (l, b)])? * (ca * cb);
                }
            }
            acc /= 144.0 * step * step;
            for i in 0..n {
                for j in 0..n {
                    d2g.set(k, l, i, j, acc[(i, j)]);
                    d2g.set(l, k, i, j, acc[(i, j)]);
                }
            }
        }
    }
    if dg
        .as_slice()
        .iter()
        .chain(d2g.as_slice())
        .any(|v| !v.is_finite())
    {
        return Err(Error::NonFinite {
            what: "metric derivatives",
        });
    }
    Ok(MetricJet {
        g,
        dg,
        d2g,
        point: p.clone(),
        step,
        mode: DerivativeMode::FiniteDifference,
    })
}
