//! Integrals over compact souls: `L^r` norms of scalar and normal curvature, and the
//! Euler number of a rank-2 normal bundle over a surface soul.
//!
//! Quadrature is a tensor-product Gauss–Legendre rule on the soul's parameter box,
//! weighted by the induced volume factor. Where the box stops short of a coordinate pole
//! the strip between edge and pole is added back through extra nodes on the edge, using
//! that the volume factor vanishes linearly at the pole.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{riemann_in_frame, CoordBox, RiemannAtPoint};
use crate::sampling::pairwise_sum;
use crate::soul::{
    adapted_frame, trace_inequality, AdaptedFrame, SoulSpec, TraceInequality,
    NORMAL_CURVATURE_CONSTANT,
};
use crate::zoo::ZooEntry;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Nodes and weights on `[lo, hi]`.
fn gauss_legendre_interval(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

/// Tensor-product rule over a box, `resolution` points per axis.
fn product_rule(
    bx: &CoordBox,
    resolution: usize,
    skip_axis: Option<usize>,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..bx.dim())
        .map(|a| {
            if Some(a) == skip_axis {
                (vec![f64::NAN], vec![1.0])
            } else {
                gauss_legendre_interval(resolution, bx.lo[a], bx.hi[a])
            }
        })
        .collect();
    let mut nodes = vec![Vec::new()];
    let mut weights = vec![1.0];
    for (xs, ws) in &axes {
        let mut next_nodes = Vec::with_capacity(nodes.len() * xs.len());
        let mut next_weights = Vec::with_capacity(nodes.len() * xs.len());
        for (node, w) in nodes.iter().zip(&weights) {
            for (x, wx) in xs.iter().zip(ws) {
                let mut p = node.clone();
                p.push(*x);
                next_nodes.push(p);
                next_weights.push(w * wx);
            }
        }
        nodes = next_nodes;
        weights = next_weights;
    }
    (nodes, weights)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureRule {
    /// Soul parameter points.
    pub nodes: Vec<Vec<f64>>,
    /// Positive weights including the induced volume factor.
    pub weights: Vec<f64>,
    pub resolution: usize,
    /// Trailing nodes that stand in for pole strips outside the parameter box.
    pub pole_cap_nodes: usize,
    /// Measure carried by the pole-cap nodes.
    pub pole_cap_measure: f64,
}

impl QuadratureRule {
    /// Plain Gauss–Legendre rule on a box (unit volume factor).
    pub fn on_box(bx: &CoordBox, resolution: usize) -> Self {
        let (nodes, weights) = product_rule(bx, resolution, None);
        Self {
            nodes,
            weights,
            resolution,
            pole_cap_nodes: 0,
            pole_cap_measure: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn measure(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// `Σ w_i f_i` in fixed pairwise order.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len(), "one value per node");
        let terms: Vec<f64> = self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .collect();
        pairwise_sum(&terms)
    }
}

fn induced_volume(soul: &SoulSpec, param: &[f64]) -> Result<f64> {
    let p = soul.point(param)?;
    let g = soul.ambient.eval(&p)?;
    let t = soul.tangent_basis.as_ref()(param);
    let d = t.len();
    let tm = DMatrix::from_columns(&t);
    let gs = tm.transpose() * g * tm;
    let det = gs.determinant();
    if !(det > 0.0) || d == 0 {
        return Err(Error::DegenerateTangent {
            param: param.to_vec(),
        });
    }
    Ok(det.sqrt())
}

pub fn soul_quadrature(soul: &SoulSpec, resolution: usize) -> Result<QuadratureRule> {
    assert!(resolution > 0, "resolution must be positive");
    let bx = &soul.param_box;
    let (mut nodes, base) = product_rule(bx, resolution, None);
    let mut weights = Vec::with_capacity(nodes.len());
    for (node, w) in nodes.iter().zip(&base) {
        weights.push(w * induced_volume(soul, node)?);
    }
    let mut cap_nodes = 0;
    let mut cap_measure = Vec::new();
    for edge in &soul.pole_edges {
        let at = if edge.upper {
            bx.hi[edge.axis]
        } else {
            bx.lo[edge.axis]
        };
        let width = (at - edge.pole).abs();
        let (edge_nodes, edge_weights) = product_rule(bx, resolution, Some(edge.axis));
        for (mut node, w) in edge_nodes.into_iter().zip(edge_weights) {
            node[edge.axis] = at;
            // ∫ over the strip of a density vanishing linearly at the pole
            let weight = w * induced_volume(soul, &node)? * 0.5 * width;
            nodes.push(node);
            weights.push(weight);
            cap_measure.push(weight);
            cap_nodes += 1;
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        resolution,
        pole_cap_nodes: cap_nodes,
        pole_cap_measure: pairwise_sum(&cap_measure),
    })
}

/// `(Σ w |f|^r)^{1/r}` over precomputed node values.
pub fn lr_norm_values(rule: &QuadratureRule, values: &[f64], r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::InvalidExponent(r));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "field values at quadrature nodes",
        });
    }
    let powered: Vec<f64> = values.iter().map(|v| v.abs().powf(r)).collect();
    Ok(rule.integrate_values(&powered).powf(1.0 / r))
}

pub fn lr_norm(rule: &QuadratureRule, r: f64, field: impl Fn(&[f64]) -> f64) -> Result<f64> {
    let values: Vec<f64> = rule.nodes.iter().map(|n| field(n)).collect();
    lr_norm_values(rule, &values, r)
}

/// Curvature at a soul node in its adapted frame.
pub fn soul_node_curvature(
    soul: &SoulSpec,
    param: &[f64],
    step: f64,
) -> Result<(AdaptedFrame, RiemannAtPoint)> {
    let frame = adapted_frame(soul, param)?;
    let r = riemann_in_frame(&soul.ambient, &frame.point, step, &frame.frame)?;
    Ok((frame, r))
}

fn soul_of(entry: &ZooEntry) -> Result<&SoulSpec> {
    entry
        .soul
        .as_ref()
        .ok_or_else(|| Error::NoSoul(entry.name.clone()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub r: f64,
    /// `‖s_M‖_r`
    pub s_norm: f64,
    /// `‖R^∇‖_r`
    pub rnabla_norm: f64,
    pub c_used: f64,
    /// `c^{1/2}·‖s_M‖_r − ‖R^∇‖_r`
    pub slack: f64,
    pub pointwise_min_trace_slack: f64,
    pub pointwise_min_scalar_slack: f64,
    pub resolution: usize,
    pub node_count: usize,
    pub soul_measure: f64,
    /// Measure of the pole strips outside the parameter box, carried by edge nodes.
    pub pole_cap_measure: f64,
    #[serde(skip)]
    pub runtime: Duration,
}

fn node_traces(entry: &ZooEntry, rule: &QuadratureRule) -> Result<Vec<TraceInequality>> {
    let soul = soul_of(entry)?;
    let step = entry.hints.fd_step;
    rule.nodes
        .par_iter()
        .map(|node| {
            let (frame, r) = soul_node_curvature(soul, node, step)?;
            Ok(trace_inequality(&r, &frame))
        })
        .collect()
}

pub fn norm_inequality_report(entry: &ZooEntry, r: f64, resolution: usize) -> Result<NormReport> {
    let started = Instant::now();
    let soul = soul_of(entry)?;
    let half_dim = 0.5 * soul.param_dim() as f64;
    if !(r > half_dim) {
        return Err(Error::HypothesisViolated { r, half_dim });
    }
    let rule = soul_quadrature(soul, resolution)?;
    let traces = node_traces(entry, &rule)?;
    let s: Vec<f64> = traces.iter().map(|t| t.s_m).collect();
    let rn: Vec<f64> = traces.iter().map(|t| t.lhs.max(0.0).sqrt()).collect();
    let s_norm = lr_norm_values(&rule, &s, r)?;
    let rnabla_norm = lr_norm_values(&rule, &rn, r)?;
    let c_used = NORMAL_CURVATURE_CONSTANT;
    let min_trace = traces
        .iter()
        .map(|t| t.trace_slack)
        .fold(f64::INFINITY, f64::min);
    let min_scalar = traces
        .iter()
        .map(|t| t.scalar_slack)
        .fold(f64::INFINITY, f64::min);
    Ok(NormReport {
        r,
        s_norm,
        rnabla_norm,
        c_used,
        slack: c_used.sqrt() * s_norm - rnabla_norm,
        pointwise_min_trace_slack: min_trace,
        pointwise_min_scalar_slack: min_scalar,
        resolution,
        node_count: rule.len(),
        soul_measure: rule.measure(),
        pole_cap_measure: rule.pole_cap_measure,
        runtime: started.elapsed(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalOrientation {
    /// Order of the adapted frame.
    Frame,
    /// Normal vectors swapped.
    Reversed,
}

/// `(1/2π) ∫_Σ ⟨R(x₁,x₂)u₂, u₁⟩ dv` in the adapted frame.
pub fn euler_number(entry: &ZooEntry, resolution: usize) -> Result<f64> {
    euler_number_oriented(entry, resolution, NormalOrientation::Frame)
}

pub fn euler_number_oriented(
    entry: &ZooEntry,
    resolution: usize,
    orientation: NormalOrientation,
) -> Result<f64> {
    let soul = soul_of(entry)?;
    let (dim, rank) = (soul.param_dim(), soul.normal_rank());
    if dim != 2 || rank != 2 {
        return Err(Error::WrongSoulTopology { dim, rank });
    }
    let rule = soul_quadrature(soul, resolution)?;
    let step = entry.hints.fd_step;
    let density: Vec<f64> = rule
        .nodes
        .par_iter()
        .map(|node| {
            let (_, r) = soul_node_curvature(soul, node, step)?;
            // antisymmetrized so that swapping u₁, u₂ negates the value exactly
            let (a, b) = match orientation {
                NormalOrientation::Frame => (r.get(0, 1, 3, 2), r.get(0, 1, 2, 3)),
                NormalOrientation::Reversed => (r.get(0, 1, 2, 3), r.get(0, 1, 3, 2)),
            };
            Ok(0.5 * (a - b))
        })
        .collect::<Result<_>>()?;
    Ok(rule.integrate_values(&density) / (2.0 * std::f64::consts::PI))
}
