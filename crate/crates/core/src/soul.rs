//! Curvature relations along a declared soul and the splitting-obstruction detector.
//!
//! All operations work in an [`AdaptedFrame`]: the first `d` vectors are tangent to the
//! soul, the remaining `k = n − d` are normal. Vectors passed around here are frame
//! components, so tangent vectors live in the first `d` slots.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::bivector::{curvature_operator, quadratic_form, Bivector, BivectorBasis};
use crate::error::{Error, Result};
use crate::geometry::{
    orthonormalize, scalar_curvature, CoordBox, MetricField, OrthonormalFrame, Point,
    RiemannAtPoint,
};
use crate::sampling::{random_orthonormal, stream_rng};
use crate::tolerances;

pub type EmbeddingFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type TangentFn = Arc<dyn Fn(&[f64]) -> Vec<DVector<f64>> + Send + Sync>;

/// Edge of the parameter box that stops short of a coordinate pole, where the induced
/// volume factor vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PoleEdge {
    pub axis: usize,
    /// `true` for the upper bound of the box on `axis`.
    pub upper: bool,
    /// Coordinate of the pole on `axis`.
    pub pole: f64,
}

/// An analytically embedded soul.
#[derive(Clone)]
pub struct SoulSpec {
    pub name: String,
    pub param_box: CoordBox,
    pub pole_edges: Vec<PoleEdge>,
    pub embedding: EmbeddingFn,
    pub tangent_basis: TangentFn,
    pub ambient: MetricField,
}

impl fmt::Debug for SoulSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SoulSpec")
            .field("name", &self.name)
            .field("param_box", &self.param_box)
            .field("pole_edges", &self.pole_edges)
            .field("ambient", &self.ambient.name())
            .finish_non_exhaustive()
    }
}

impl SoulSpec {
    pub fn new(
        name: impl Into<String>,
        ambient: MetricField,
        param_box: CoordBox,
        embedding: EmbeddingFn,
        tangent_basis: TangentFn,
    ) -> Self {
        Self {
            name: name.into(),
            param_box,
            pole_edges: Vec::new(),
            embedding,
            tangent_basis,
            ambient,
        }
    }

    /// Soul given by letting the coordinates `axes` vary and fixing the others at `base`.
    pub fn coordinate_slice(
        name: impl Into<String>,
        ambient: MetricField,
        param_box: CoordBox,
        axes: Vec<usize>,
        base: Vec<f64>,
    ) -> Self {
        let n = ambient.dim();
        assert_eq!(axes.len(), param_box.dim(), "one axis per soul parameter");
        assert_eq!(base.len(), n, "base point must live in the ambient chart");
        let emb_axes = axes.clone();
        let embedding: EmbeddingFn = Arc::new(move |t| {
            let mut x = base.clone();
            for (&a, &v) in emb_axes.iter().zip(t) {
                x[a] = v;
            }
            x
        });
        let tangent: TangentFn = Arc::new(move |_| {
            axes.iter()
                .map(|&a| DVector::from_fn(n, |i, _| f64::from(u8::from(i == a))))
                .collect()
        });
        Self::new(name, ambient, param_box, embedding, tangent)
    }

    pub fn with_pole_edge(mut self, axis: usize, upper: bool, pole: f64) -> Self {
        self.pole_edges.push(PoleEdge { axis, upper, pole });
        self
    }

    pub fn param_dim(&self) -> usize {
        self.param_box.dim()
    }

    pub fn normal_rank(&self) -> usize {
        self.ambient.dim() - self.param_dim()
    }

    pub fn point(&self, param: &[f64]) -> Result<Point> {
        self.ambient.point((self.embedding)(param))
    }
}

/// Orthonormal frame at a soul point, tangent vectors first.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    pub frame: OrthonormalFrame,
    pub tangent_dim: usize,
    pub point: Point,
}

impl AdaptedFrame {
    /// Builds an adapted frame from any orthonormal frame whose first `tangent_dim`
    /// vectors are declared tangent.
    pub fn from_frame(frame: OrthonormalFrame, tangent_dim: usize, point: Point) -> Self {
        assert!(
            tangent_dim <= frame.len(),
            "tangent dimension exceeds frame size"
        );
        Self {
            frame,
            tangent_dim,
            point,
        }
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    pub fn normal_dim(&self) -> usize {
        self.dim() - self.tangent_dim
    }

    pub fn tangent_indices(&self) -> std::ops::Range<usize> {
        0..self.tangent_dim
    }

    pub fn normal_indices(&self) -> std::ops::Range<usize> {
        self.tangent_dim..self.dim()
    }

    /// Same frame with the normal vectors in reverse order (opposite normal orientation
    /// when the rank is 2).
    pub fn with_normals_reversed(&self) -> Self {
        let n = self.dim();
        let d = self.tangent_dim;
        let cols = self.frame.columns();
        let mut out = cols.clone();
        for (slot, src) in (d..n).zip((d..n).rev()) {
            out.set_column(slot, &cols.column(src));
        }
        Self {
            frame: OrthonormalFrame::from_parts_unchecked(out, self.frame.metric().clone()),
            tangent_dim: d,
            point: self.point.clone(),
        }
    }

    /// Largest component of a tangent-frame vector outside the tangent span of the soul,
    /// measured against the embedding's tangent basis.
    fn tangent_projection_residual(&self, tangent: &[DVector<f64>]) -> f64 {
        let g = self.frame.metric();
        let mut worst: f64 = 0.0;
        for t in tangent {
            let comps = self.frame.components(t);
            let norm = t.dot(&(g * t)).sqrt();
            let normal_part = comps.rows(self.tangent_dim, self.normal_dim()).norm();
            worst = worst.max(normal_part / norm);
        }
        worst
    }
}

pub fn adapted_frame(soul: &SoulSpec, param: &[f64]) -> Result<AdaptedFrame> {
    if !soul.param_box.contains(param) {
        return Err(Error::ParamOutOfBox {
            soul: soul.name.clone(),
            param: param.to_vec(),
        });
    }
    let point = soul.point(param)?;
    let g = soul.ambient.eval(&point)?;
    let n = soul.ambient.dim();
    let tangent = (soul.tangent_basis)(param);
    let d = tangent.len();
    let tangent_frame = orthonormalize(&g, &tangent).map_err(|_| Error::DegenerateTangent {
        param: param.to_vec(),
    })?;

    // complete greedily with the coordinate direction least aligned with the current span
    let mut chosen: Vec<DVector<f64>> = (0..d).map(|i| tangent_frame.vector(i)).collect();
    let mut completion = tangent.clone();
    let ip = |a: &DVector<f64>, b: &DVector<f64>| a.dot(&(&g * b));
    for _ in d..n {
        let mut best: Option<(f64, usize, DVector<f64>)> = None;
        for axis in 0..n {
            let e = DVector::from_fn(n, |i, _| f64::from(u8::from(i == axis)));
            let mut w = e.clone();
            for c in &chosen {
                w -= c * ip(c, &w);
            }
            let rel = ip(&w, &w).sqrt() / ip(&e, &e).sqrt();
            if best.as_ref().is_none_or(|(b, _, _)| rel > *b + 1e-12) {
                best = Some((rel, axis, e));
            }
        }
        let (rel, _, e) = best.ok_or(Error::ComplementFailure)?;
        if rel < 1e-6 {
            return Err(Error::ComplementFailure);
        }
        let mut w = e.clone();
        for c in &chosen {
            w -= c * ip(c, &w);
        }
        let norm = ip(&w, &w).sqrt();
        chosen.push(w / norm);
        completion.push(e);
    }
    let frame = orthonormalize(&g, &completion).map_err(|_| Error::ComplementFailure)?;
    // chart orientation fixes the normal orientation once the tangent one is fixed
    let frame = if n > d && frame.columns().determinant() < 0.0 {
        let mut cols = frame.columns().clone();
        cols.column_mut(n - 1).neg_mut();
        OrthonormalFrame::from_parts_unchecked(cols, g.clone())
    } else {
        frame
    };
    let out = AdaptedFrame {
        frame,
        tangent_dim: d,
        point,
    };
    let residual = out.tangent_projection_residual(&tangent);
    if residual > 1e-8 {
        return Err(Error::DegenerateTangent {
            param: param.to_vec(),
        });
    }
    Ok(out)
}

/// Curvature expressed in the adapted frame.
pub fn aligned(r: &RiemannAtPoint, frame: &AdaptedFrame) -> RiemannAtPoint {
    if r.frame().columns() == frame.frame.columns() {
        r.clone()
    } else {
        r.reframe(&frame.frame)
    }
}

fn basis_vec(n: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(n, |j, _| f64::from(u8::from(i == j)))
}

/// Frame components of `R(e_i, e_j) e_k`.
fn apply_idx(r: &RiemannAtPoint, i: usize, j: usize, k: usize) -> DVector<f64> {
    DVector::from_fn(r.dim(), |l, _| r.get(i, j, k, l))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelationTolerances {
    pub mixed_plane: f64,
    pub flat_plane: f64,
    pub doubling: f64,
    pub determinant: f64,
    pub trace_slack: f64,
}

impl Default for RelationTolerances {
    fn default() -> Self {
        Self {
            mixed_plane: tolerances::MIXED_PLANE,
            flat_plane: tolerances::FLAT_PLANE,
            doubling: tolerances::DOUBLING,
            determinant: tolerances::DETERMINANT,
            trace_slack: tolerances::TRACE_SLACK,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationReport {
    pub point: Vec<f64>,
    pub tangent_dim: usize,
    pub normal_dim: usize,
    /// `max |K(x_i, u_a)|`
    pub mixed_plane_max_k: f64,
    /// `max |R(x_i,u_a)u_a|, |R(u_a,x_i)x_i|`
    pub flat_plane_residual: f64,
    /// `max |R(x,y)u − 2R(x,u)y|, |R(u,v)x − 2R(u,x)v|` over frame vectors.
    pub doubling_residual: f64,
    /// `min K(x,y)K(u,v) − (9/4)⟨R(x,y)u,v⟩²` over frame vectors; `None` if `d < 2` or `k < 2`.
    pub determinant_min_slack: Option<f64>,
    /// Slack of the traced determinant inequality.
    pub trace_ineq_slack: f64,
    pub tolerances: RelationTolerances,
}

impl RelationReport {
    pub fn holds(&self) -> bool {
        let t = &self.tolerances;
        self.mixed_plane_max_k < t.mixed_plane
            && self.flat_plane_residual < t.flat_plane
            && self.doubling_residual < t.doubling
            && self
                .determinant_min_slack
                .is_none_or(|s| s >= -t.determinant)
            && self.trace_ineq_slack >= -t.trace_slack
    }
}

pub fn pointwise_relations(r: &RiemannAtPoint, frame: &AdaptedFrame) -> RelationReport {
    pointwise_relations_with(r, frame, RelationTolerances::default())
}

pub fn pointwise_relations_with(
    r: &RiemannAtPoint,
    frame: &AdaptedFrame,
    tolerances: RelationTolerances,
) -> RelationReport {
    let r = aligned(r, frame);
    let tan = frame.tangent_indices();
    let nor = frame.normal_indices();

    let mut mixed: f64 = 0.0;
    let mut flat: f64 = 0.0;
    for i in tan.clone() {
        for a in nor.clone() {
            mixed = mixed.max(r.get(i, a, a, i).abs());
            flat = flat
                .max(apply_idx(&r, i, a, a).norm())
                .max(apply_idx(&r, a, i, i).norm());
        }
    }

    let mut doubling: f64 = 0.0;
    for i in tan.clone() {
        for j in tan.clone() {
            for a in nor.clone() {
                let lhs = apply_idx(&r, i, j, a);
                let rhs = apply_idx(&r, i, a, j) * 2.0;
                doubling = doubling.max((lhs - rhs).norm());
            }
        }
    }
    for a in nor.clone() {
        for b in nor.clone() {
            for i in tan.clone() {
                let lhs = apply_idx(&r, a, b, i);
                let rhs = apply_idx(&r, a, i, b) * 2.0;
                doubling = doubling.max((lhs - rhs).norm());
            }
        }
    }

    let determinant = if frame.tangent_dim >= 2 && frame.normal_dim() >= 2 {
        let mut min = f64::INFINITY;
        for i in tan.clone() {
            for j in tan.clone().filter(|&j| j != i) {
                for a in nor.clone() {
                    for b in nor.clone().filter(|&b| b != a) {
                        let s = r.get(i, j, j, i) * r.get(a, b, b, a)
                            - 2.25 * r.get(i, j, a, b).powi(2);
                        min = min.min(s);
                    }
                }
            }
        }
        Some(min)
    } else {
        None
    };

    let trace = trace_inequality(&r, frame);
    RelationReport {
        point: frame.point.coords.clone(),
        tangent_dim: frame.tangent_dim,
        normal_dim: frame.normal_dim(),
        mixed_plane_max_k: mixed,
        flat_plane_residual: flat,
        doubling_residual: doubling,
        determinant_min_slack: determinant,
        trace_ineq_slack: trace.trace_slack,
        tolerances,
    }
}

/// Result of a check that needs two tangent and two normal directions.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Applicable<T> {
    Value(T),
    NotApplicable {
        tangent_dim: usize,
        normal_dim: usize,
    },
}

impl<T> Applicable<T> {
    pub fn value(self) -> Option<T> {
        match self {
            Self::Value(v) => Some(v),
            Self::NotApplicable { .. } => None,
        }
    }
}

/// Embeds an orthonormal `m`-frame of a coordinate block into the full frame.
fn embed_block(block: &DMatrix<f64>, offset: usize, n: usize) -> Vec<DVector<f64>> {
    block
        .column_iter()
        .map(|c| {
            let mut v = DVector::zeros(n);
            v.rows_mut(offset, c.len()).copy_from(&c);
            v
        })
        .collect()
}

/// Minimum over `samples` random orthonormal tangent pairs `(x,y)` and normal pairs `(u,v)`
/// of `K(x,y)K(u,v) − (9/4)⟨R(x,y)u,v⟩²`.
pub fn determinant_inequality(
    r: &RiemannAtPoint,
    frame: &AdaptedFrame,
    samples: usize,
    seed: u64,
) -> Applicable<f64> {
    let d = frame.tangent_dim;
    let k = frame.normal_dim();
    if d < 2 || k < 2 {
        return Applicable::NotApplicable {
            tangent_dim: d,
            normal_dim: k,
        };
    }
    let r = aligned(r, frame);
    let n = r.dim();
    let min = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, s as u64);
            let t = embed_block(&random_orthonormal(&mut rng, d, 2), 0, n);
            let nv = embed_block(&random_orthonormal(&mut rng, k, 2), d, n);
            let (x, y, u, v) = (&t[0], &t[1], &nv[0], &nv[1]);
            r.form(x, y, y, x) * r.form(u, v, v, u) - 2.25 * r.form(x, y, u, v).powi(2)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Applicable::Value(min)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionWitness {
    pub point: Vec<f64>,
    /// Frame components of the unit vectors `x, y` (tangent) and `u, v` (normal).
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `|R(x,y)u|`
    pub alpha: f64,
    pub xi: [Bivector; 3],
    /// `⟨ρ ξ_i, ξ_i⟩`, expected `(−α/2, −α/2, α/2)`.
    pub quadratic_forms: [f64; 3],
    pub sum_value: f64,
    /// Max entry of `Gram(ξ) − Id`.
    pub orthonormality_residual: f64,
    /// `|⟨u, v⟩|`
    pub uv_inner: f64,
    pub bivector_pairs: Vec<(usize, usize)>,
}

impl ObstructionWitness {
    /// Largest deviation of the quadratic forms from `(−α/2, −α/2, α/2)`, relative to `α/2`.
    pub fn pattern_residual(&self) -> f64 {
        let h = 0.5 * self.alpha;
        let expected = [-h, -h, h];
        self.quadratic_forms
            .iter()
            .zip(expected)
            .map(|(q, e)| (q - e).abs() / h)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WitnessOutcome {
    Witness(Box<ObstructionWitness>),
    FlatNormalBundle {
        max_alpha: f64,
        threshold: f64,
    },
    NotApplicable {
        tangent_dim: usize,
        normal_dim: usize,
    },
}

impl WitnessOutcome {
    pub fn witness(&self) -> Option<&ObstructionWitness> {
        match self {
            Self::Witness(w) => Some(w),
            _ => None,
        }
    }

    pub fn max_alpha(&self) -> Option<f64> {
        match self {
            Self::Witness(w) => Some(w.alpha),
            Self::FlatNormalBundle { max_alpha, .. } => Some(*max_alpha),
            Self::NotApplicable { .. } => None,
        }
    }
}

/// `(x∧u + y∧v)/√2, (x∧v − y∧u)/√2, (x∧v + y∧u)/√2`
pub fn witness_bivectors(
    basis: &BivectorBasis,
    x: &DVector<f64>,
    y: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> [Bivector; 3] {
    let xu = Bivector::wedge(basis, x, u);
    let yv = Bivector::wedge(basis, y, v);
    let xv = Bivector::wedge(basis, x, v);
    let yu = Bivector::wedge(basis, y, u);
    [
        xu.add(&yv).scaled(FRAC_1_SQRT_2),
        xv.sub(&yu).scaled(FRAC_1_SQRT_2),
        xv.add(&yu).scaled(FRAC_1_SQRT_2),
    ]
}

/// Searches for `x, y` tangent and `u` normal with `R(x,y)u ≠ 0` and, if found, builds the
/// three orthonormal bivectors whose quadratic forms sum to `−α/2`.
pub fn obstruction_witness(
    r: &RiemannAtPoint,
    frame: &AdaptedFrame,
    search_samples: usize,
    seed: u64,
) -> Result<WitnessOutcome> {
    let d = frame.tangent_dim;
    let k = frame.normal_dim();
    if d < 2 || k < 2 {
        return Ok(WitnessOutcome::NotApplicable {
            tangent_dim: d,
            normal_dim: k,
        });
    }
    let r = aligned(r, frame);
    let n = r.dim();

    // frame triples first, then random rotations within the tangent and normal blocks
    let mut candidates: Vec<(DVector<f64>, DVector<f64>, DVector<f64>)> = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            for a in d..n {
                candidates.push((basis_vec(n, i), basis_vec(n, j), basis_vec(n, a)));
            }
        }
    }
    let exhaustive = candidates.len();
    let sampled: Vec<_> = (0..search_samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, s as u64);
            let t = embed_block(&random_orthonormal(&mut rng, d, 2), 0, n);
            let u = embed_block(&random_orthonormal(&mut rng, k, 1), d, n);
            (t[0].clone(), t[1].clone(), u[0].clone())
        })
        .collect();
    candidates.extend(sampled);

    let (best_idx, alpha) = candidates
        .par_iter()
        .enumerate()
        .map(|(idx, (x, y, u))| (idx, r.apply(x, y, u).norm()))
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    debug_assert!(best_idx < exhaustive + search_samples);

    let threshold = tolerances::WITNESS_THRESHOLD_REL * r.max_abs().max(1.0);
    if !(alpha > threshold) {
        return Ok(WitnessOutcome::FlatNormalBundle {
            max_alpha: alpha.max(0.0),
            threshold,
        });
    }

    let (x, y, u) = candidates[best_idx].clone();
    let ruv = r.apply(&x, &y, &u);
    let v_raw = &ruv / alpha;
    let tangential = v_raw.rows(0, d).norm();
    if tangential > tolerances::WITNESS_NORMALITY_REL {
        return Err(Error::WitnessDefect(format!(
            "R(x,y)u has tangential part {tangential:e}"
        )));
    }
    let mut v = v_raw;
    v.rows_mut(0, d).fill(0.0);
    let v = v.normalize();
    let uv_inner = u.dot(&v).abs();
    if uv_inner > tolerances::WITNESS_ORTHONORMAL {
        return Err(Error::WitnessDefect(format!("|<u, v>| = {uv_inner:e}")));
    }

    let op = curvature_operator(&r)?;
    let basis = op
        .basis
        .clone()
        .expect("operator built from a curvature tensor");
    let xi = witness_bivectors(&basis, &x, &y, &u, &v);
    let gram = DMatrix::from_fn(3, 3, |a, b| xi[a].dot(&xi[b]));
    let orthonormality_residual = (gram - DMatrix::<f64>::identity(3, 3)).amax();
    if orthonormality_residual > tolerances::WITNESS_ORTHONORMAL {
        return Err(Error::WitnessDefect(format!(
            "witness bivectors not orthonormal ({orthonormality_residual:e})"
        )));
    }
    let q = [
        quadratic_form(&op, &xi[0])?,
        quadratic_form(&op, &xi[1])?,
        quadratic_form(&op, &xi[2])?,
    ];
    let to_vec = |w: &DVector<f64>| w.iter().copied().collect::<Vec<_>>();
    Ok(WitnessOutcome::Witness(Box::new(ObstructionWitness {
        point: frame.point.coords.clone(),
        x: to_vec(&x),
        y: to_vec(&y),
        u: to_vec(&u),
        v: to_vec(&v),
        alpha,
        xi,
        quadratic_forms: q,
        sum_value: q[0] + q[1] + q[2],
        orthonormality_residual,
        uv_inner,
        bivector_pairs: basis.pairs().to_vec(),
    })))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceInequality {
    /// `Σ_{i,j,k,l} ⟨R(x_i,x_j)u_k,u_l⟩²`, the squared norm of the normal curvature.
    pub lhs: f64,
    /// `(4/9) Σ_{i,j} K(x_i,x_j) · Σ_{k,l} K(u_k,u_l)`
    pub trace_bound: f64,
    pub s_m: f64,
    pub trace_slack: f64,
    /// `s_M²/9 − lhs`
    pub scalar_slack: f64,
}

/// Constant relating the normal curvature to scalar curvature, `|R^∇|² ≤ c·s_M²`.
pub const NORMAL_CURVATURE_CONSTANT: f64 = 1.0 / 9.0;

pub fn trace_inequality(r: &RiemannAtPoint, frame: &AdaptedFrame) -> TraceInequality {
    let r = aligned(r, frame);
    let tan = frame.tangent_indices();
    let nor = frame.normal_indices();
    let mut lhs = 0.0;
    for i in tan.clone() {
        for j in tan.clone() {
            for k in nor.clone() {
                for l in nor.clone() {
                    lhs += r.get(i, j, k, l).powi(2);
                }
            }
        }
    }
    let ordered_sum = |idx: std::ops::Range<usize>| {
        let mut s = 0.0;
        for i in idx.clone() {
            for j in idx.clone() {
                if i != j {
                    s += r.get(i, j, j, i);
                }
            }
        }
        s
    };
    let trace_bound = 4.0 / 9.0 * ordered_sum(tan) * ordered_sum(nor);
    let s_m = scalar_curvature(&r);
    TraceInequality {
        lhs,
        trace_bound,
        s_m,
        trace_slack: trace_bound - lhs,
        scalar_slack: NORMAL_CURVATURE_CONSTANT * s_m * s_m - lhs,
    }
}

/// Normalized sum `Σ⟨ρ ξ_i, ξ_i⟩` over a family of bivectors.
pub fn witness_sum(op: &crate::bivector::CurvatureOperatorMatrix, xi: &[Bivector]) -> Result<f64> {
    xi.iter().map(|b| quadratic_form(op, b)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivector::CurvatureOperatorMatrix;
    use crate::geometry::coordinate_frame;

    fn euclidean_frame(n: usize, d: usize) -> AdaptedFrame {
        let frame = coordinate_frame(&DMatrix::identity(n, n)).unwrap();
        AdaptedFrame::from_frame(frame, d, Point::new("algebraic", vec![0.0; n]).unwrap())
    }

    #[test]
    fn constant_curvature_inequality_slack_is_one() {
        let r = RiemannAtPoint::constant_curvature(4, 1.0);
        let f = euclidean_frame(4, 2);
        let s = determinant_inequality(&r, &f, 500, 3).value().unwrap();
        assert!((s - 1.0).abs() < 1e-12, "{s}");
    }

    #[test]
    fn flat_inequality_slack_is_zero() {
        let r = RiemannAtPoint::constant_curvature(4, 0.0);
        let s = determinant_inequality(&r, &euclidean_frame(4, 2), 100, 1)
            .value()
            .unwrap();
        assert_eq!(s, 0.0);
        let t = trace_inequality(&r, &euclidean_frame(4, 2));
        assert_eq!(
            (t.lhs, t.trace_bound, t.s_m, t.trace_slack, t.scalar_slack),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn degenerate_dimensions_are_not_applicable() {
        let r = RiemannAtPoint::constant_curvature(3, 1.0);
        let f = euclidean_frame(3, 1);
        assert!(matches!(
            determinant_inequality(&r, &f, 10, 0),
            Applicable::NotApplicable {
                tangent_dim: 1,
                normal_dim: 2
            }
        ));
        assert!(matches!(
            obstruction_witness(&r, &f, 10, 0).unwrap(),
            WitnessOutcome::NotApplicable { .. }
        ));
        assert!(pointwise_relations(&r, &f).determinant_min_slack.is_none());
    }

    #[test]
    fn synthetic_quadratic_form_pattern() {
        // three orthonormal bivectors carrying (−α, −α, α) on their √2-length versions
        let basis = BivectorBasis::new(4);
        let e = |i| basis_vec(4, i);
        let xi = witness_bivectors(&basis, &e(0), &e(1), &e(2), &e(3));
        let alpha = 1.0;
        let mut m = DMatrix::zeros(6, 6);
        for (b, q) in xi.iter().zip([-alpha, -alpha, alpha]) {
            m += &b.coeffs * b.coeffs.transpose() * (q / 2.0);
        }
        let op = CurvatureOperatorMatrix::from_matrix(m).unwrap();
        for (b, q) in xi.iter().zip([-alpha, -alpha, alpha]) {
            let long = b.scaled(std::f64::consts::SQRT_2);
            assert!((quadratic_form(&op, &long).unwrap() - q).abs() < 1e-15);
        }
        assert!((witness_sum(&op, &xi).unwrap() + 0.5).abs() < 1e-15);
    }
}
