//! Metric charts, Levi-Civita connection and curvature in orthonormal frames.
//!
//! Curvature follows the convention `⟨R(x,y)y,x⟩ = K(x,y)`, so the unit sphere has
//! `K = +1`. Every tensor is stored fully lowered in a g-orthonormal frame, with
//! `R[i][j][k][l] = ⟨R(e_i,e_j)e_k, e_l⟩`. Scalar curvature is the ordered-pair sum
//! `Σ_{i≠j} K(e_i,e_j)`, twice the unordered sum.
//!
//! Derivatives of the metric come from fourth-order central differences whose
//! stencil reaches two steps along each axis, so every evaluation point needs a
//! margin of `2·step` inside the chart's valid domain.

mod curvature;
mod frame;
mod metric;
mod point;
mod tensor;

pub use curvature::{
    christoffel, frame_sectional, riemann, riemann_in_frame, scalar_curvature, sectional_curvature,
    verify_sign_convention, ConnectionCoefficients, RiemannAtPoint, SymmetryResiduals,
    RESIDUAL_SCALE_FLOOR, SYMMETRY_ABORT,
};
pub use frame::{coordinate_frame, orthonormalize, OrthonormalFrame, GRAM_DET_FLOOR};
pub use metric::{
    metric_jet, AnalyticDerivatives, CurvatureFlag, DerivativeMode, FirstDerivFn, MetricField,
    MetricFn, MetricJet, SecondDerivFn,
};
pub use point::{CoordBox, Point};
pub use tensor::{Tensor3, Tensor4};
