//! Default tolerances, in one place. Relative tolerances are scaled by the quantity
//! named in their doc line; everything else is absolute.
//!
//! | constant | value | checks |
//! |---|---|---|
//! | `SYMMETRY_REL` | 1e-6 | Riemann antisymmetries, pair symmetry, Bianchi, × max\|R\| |
//! | `FLAT_MAX_R` | 1e-8 | max\|R\| on flat entries |
//! | `CONSTANT_CURVATURE` | 1e-5 | frame sectional curvatures of constant-curvature entries |
//! | `SCALAR_CURVATURE` | 1e-4 | scalar curvature of constant-curvature entries |
//! | `NONNEG_SECTIONAL` | 1e-5 | lower bound on sampled K for nonnegatively curved entries |
//! | `MIXED_PLANE` | 1e-5 | \|K(x,u)\| at the soul |
//! | `FLAT_PLANE` | 1e-5 | \|R(x,u)u\|, \|R(u,x)x\| at the soul |
//! | `DOUBLING` | 1e-4 | \|R(x,y)u − 2R(x,u)y\|, \|R(u,v)x − 2R(u,x)v\| at the soul |
//! | `DETERMINANT` | 1e-8 | lower bound on the 9/4 determinant-inequality slack |
//! | `WITNESS_PATTERN_REL` | 1e-4 | quadratic forms (−α/2, −α/2, α/2), × α/2 |
//! | `WITNESS_MIN_ALPHA` | 1e-2 | α required of a witness on non-split entries |
//! | `WITNESS_ORTHONORMAL` | 1e-8 | Gram matrix of the three witness bivectors |
//! | `WITNESS_NORMALITY_REL` | 1e-4 | tangential part of R(x,y)u, × α |
//! | `WITNESS_THRESHOLD_REL` | 1e-5 | α above which the normal bundle is non-flat, × max(1, max\|R\|) |
//! | `FLAT_NORMAL_ALPHA` | 1e-7 | max α on split entries |
//! | `TRACE_SLACK` | 1e-8 | lower bound on pointwise trace-inequality slacks |
//! | `NORM_SLACK` | 1e-6 | lower bound on the integrated norm-inequality slack |
//! | `EULER_NONZERO` | 1e-2 | \|Euler number\| of non-split entries |
//! | `EULER_ZERO` | 1e-6 | Euler number of split entries |
//! | `FRAME_SUM` | 1e-6 | frame minimum versus eigenvalue partial sum |
//! | `FAR_FIELD` | 1e-4 | curvature of radial planes outside the cap |
//! | `SOUL_TANGENT` | 1e-2 | sectional curvature of the soul tangent plane |

use serde::{Deserialize, Serialize};

pub const SYMMETRY_REL: f64 = 1e-6;
pub const FLAT_MAX_R: f64 = 1e-8;
pub const CONSTANT_CURVATURE: f64 = 1e-5;
pub const SCALAR_CURVATURE: f64 = 1e-4;
pub const NONNEG_SECTIONAL: f64 = 1e-5;
pub const MIXED_PLANE: f64 = 1e-5;
pub const FLAT_PLANE: f64 = 1e-5;
pub const DOUBLING: f64 = 1e-4;
pub const DETERMINANT: f64 = 1e-8;
pub const WITNESS_PATTERN_REL: f64 = 1e-4;
pub const WITNESS_MIN_ALPHA: f64 = 1e-2;
pub const WITNESS_ORTHONORMAL: f64 = 1e-8;
pub const WITNESS_NORMALITY_REL: f64 = 1e-4;
pub const WITNESS_THRESHOLD_REL: f64 = 1e-5;
pub const FLAT_NORMAL_ALPHA: f64 = 1e-7;
pub const TRACE_SLACK: f64 = 1e-8;
pub const NORM_SLACK: f64 = 1e-6;
pub const EULER_NONZERO: f64 = 1e-2;
pub const EULER_ZERO: f64 = 1e-6;
pub const FRAME_SUM: f64 = 1e-6;
pub const FAR_FIELD: f64 = 1e-4;
pub const SOUL_TANGENT: f64 = 1e-2;

/// Overridable tolerance table, echoed into every report. The witness threshold is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub symmetry_rel: f64,
    pub flat_max_r: f64,
    pub constant_curvature: f64,
    pub scalar_curvature: f64,
    pub nonneg_sectional: f64,
    pub mixed_plane: f64,
    pub flat_plane: f64,
    pub doubling: f64,
    pub determinant: f64,
    pub witness_pattern_rel: f64,
    pub witness_min_alpha: f64,
    pub witness_orthonormal: f64,
    pub flat_normal_alpha: f64,
    pub trace_slack: f64,
    pub norm_slack: f64,
    pub euler_nonzero: f64,
    pub euler_zero: f64,
    pub frame_sum: f64,
    pub far_field: f64,
    pub soul_tangent: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry_rel: SYMMETRY_REL,
            flat_max_r: FLAT_MAX_R,
            constant_curvature: CONSTANT_CURVATURE,
            scalar_curvature: SCALAR_CURVATURE,
            nonneg_sectional: NONNEG_SECTIONAL,
            mixed_plane: MIXED_PLANE,
            flat_plane: FLAT_PLANE,
            doubling: DOUBLING,
            determinant: DETERMINANT,
            witness_pattern_rel: WITNESS_PATTERN_REL,
            witness_min_alpha: WITNESS_MIN_ALPHA,
            witness_orthonormal: WITNESS_ORTHONORMAL,
            flat_normal_alpha: FLAT_NORMAL_ALPHA,
            trace_slack: TRACE_SLACK,
            norm_slack: NORM_SLACK,
            euler_nonzero: EULER_NONZERO,
            euler_zero: EULER_ZERO,
            frame_sum: FRAME_SUM,
            far_field: FAR_FIELD,
            soul_tangent: SOUL_TANGENT,
        }
    }
}

impl Tolerances {
    pub fn relations(&self) -> crate::soul::RelationTolerances {
        crate::soul::RelationTolerances {
            mixed_plane: self.mixed_plane,
            flat_plane: self.flat_plane,
            doubling: self.doubling,
            determinant: self.determinant,
            trace_slack: self.trace_slack,
        }
    }
}
