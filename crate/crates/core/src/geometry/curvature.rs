use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use super::frame::{coordinate_frame, OrthonormalFrame};
use super::metric::{metric_jet, MetricField, MetricJet};
use super::point::{CoordBox, Point};
use super::tensor::{Tensor3, Tensor4};
use crate::error::{Error, Result};

/// Symmetry residual (relative to `max(max|R|, RESIDUAL_SCALE_FLOOR)`) above which
/// [`riemann`] refuses the tensor.
pub const SYMMETRY_ABORT: f64 = 1e-4;
pub const RESIDUAL_SCALE_FLOOR: f64 = 1e-6;
const CONDITION_LIMIT: f64 = 1e12;

/// Levi-Civita connection coefficients, `gamma[k][i][j] = Γ^k_ij`.
#[derive(Clone, Debug)]
pub struct ConnectionCoefficients {
    pub gamma: Tensor3,
    /// 2-norm condition number of the metric matrix.
    pub condition: f64,
}

fn metric_inverse(g: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let eig = g.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition < CONDITION_LIMIT) {
        return Err(Error::SingularMetric { condition });
    }
    let inv = g
        .clone()
        .cholesky()
        .ok_or(Error::SingularMetric { condition })?
        .inverse();
    Ok(((&inv + inv.transpose()) * 0.5, condition))
}

pub fn christoffel(jet: &MetricJet) -> Result<ConnectionCoefficients> {
    let n = jet.g.nrows();
    let (ginv, condition) = metric_inverse(&jet.g)?;
    // lowered symbols Γ_{l,ij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let lowered = Tensor3::from_fn(n, |l, i, j| {
        0.5 * (jet.dg.get(i, j, l) + jet.dg.get(j, i, l) - jet.dg.get(l, i, j))
    });
    let gamma = Tensor3::from_fn(n, |k, i, j| {
        if i > j {
            return f64::NAN;
        }
        (0..n).map(|l| ginv[(k, l)] * lowered.get(l, i, j)).sum()
    });
    // mirror the upper triangle so Γ^k_ij = Γ^k_ji exactly
    let gamma = Tensor3::from_fn(n, |k, i, j| {
        if i <= j {
            gamma.get(k, i, j)
        } else {
            gamma.get(k, j, i)
        }
    });
    Ok(ConnectionCoefficients { gamma, condition })
}

/// Fully lowered coordinate curvature `T_abcd` with `T_abab > 0` on the round sphere.
fn coordinate_curvature(jet: &MetricJet, conn: &ConnectionCoefficients) -> Tensor4 {
    let n = jet.g.nrows();
    let d2 = &jet.d2g;
    let gam = &conn.gamma;
    Tensor4::from_fn(n, |a, b, c, d| {
        let second = 0.5
            * (d2.get(b, c, a, d) + d2.get(a, d, b, c) - d2.get(a, c, b, d) - d2.get(b, d, a, c));
        let mut quad = 0.0;
        for e in 0..n {
            for f in 0..n {
                quad += jet.g[(e, f)]
                    * (gam.get(e, b, c) * gam.get(f, a, d) - gam.get(e, b, d) * gam.get(f, a, c));
            }
        }
        second + quad
    })
}

/// Change a rank-4 tensor to new basis columns `q`: `out_ijkl = Σ t_abcd q_ai q_bj q_ck q_dl`.
pub(crate) fn transform4(t: &Tensor4, q: &DMatrix<f64>) -> Tensor4 {
    let n = t.dim();
    let m = q.ncols();
    assert_eq!(m, n, "frame must be complete");
    // contract one index at a time
    let step = |src: &Tensor4, slot: usize| {
        Tensor4::from_fn(n, |i, j, k, l| {
            let idx = [i, j, k, l];
            (0..n)
                .map(|a| {
                    let mut s = idx;
                    s[slot] = a;
                    src.get(s[0], s[1], s[2], s[3]) * q[(a, idx[slot])]
                })
                .sum()
        })
    };
    let t1 = step(t, 0);
    let t2 = step(&t1, 1);
    let t3 = step(&t2, 2);
    step(&t3, 3)
}

/// Symmetry defects of a curvature tensor.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct SymmetryResiduals {
    pub antisym_first: f64,
    pub antisym_second: f64,
    pub pair: f64,
    pub bianchi: f64,
    pub max_abs: f64,
}

impl SymmetryResiduals {
    pub fn of(t: &Tensor4) -> Self {
        let n = t.dim();
        let mut r = Self {
            max_abs: t.max_abs(),
            ..Self::default()
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = t.get(i, j, k, l);
                        r.antisym_first = r.antisym_first.max((v + t.get(j, i, k, l)).abs());
                        r.antisym_second = r.antisym_second.max((v + t.get(i, j, l, k)).abs());
                        r.pair = r.pair.max((v - t.get(k, l, i, j)).abs());
                        r.bianchi = r
                            .bianchi
                            .max((v + t.get(j, k, i, l) + t.get(k, i, j, l)).abs());
                    }
                }
            }
        }
        r
    }

    pub fn worst(&self) -> f64 {
        self.antisym_first
            .max(self.antisym_second)
            .max(self.pair)
            .max(self.bianchi)
    }
}

/// Curvature tensor at a point, `R[i][j][k][l] = ⟨R(e_i,e_j)e_k, e_l⟩` in an orthonormal frame,
/// normalized so that `⟨R(x,y)y,x⟩ = K(x,y)`.
#[derive(Clone, Debug)]
pub struct RiemannAtPoint {
    tensor: Tensor4,
    frame: OrthonormalFrame,
    point: Point,
}

impl RiemannAtPoint {
    /// Wraps frame components that are already an algebraic curvature tensor.
    pub fn from_components(tensor: Tensor4, frame: OrthonormalFrame, point: Point) -> Self {
        assert_eq!(
            tensor.dim(),
            frame.len(),
            "tensor and frame dimensions differ"
        );
        Self {
            tensor,
            frame,
            point,
        }
    }

    /// Algebraic curvature tensor in a Euclidean frame at the origin of `R^n`.
    pub fn algebraic(tensor: Tensor4) -> Self {
        let n = tensor.dim();
        let frame = coordinate_frame(&DMatrix::identity(n, n)).expect("identity frame");
        let point = Point::new("algebraic", vec![0.0; n]).expect("finite origin");
        Self {
            tensor,
            frame,
            point,
        }
    }

    /// Constant-curvature tensor `κ(⟨y,z⟩⟨x,w⟩ − ⟨x,z⟩⟨y,w⟩)` on `R^n`.
    pub fn constant_curvature(n: usize, kappa: f64) -> Self {
        let d = |a: usize, b: usize| f64::from(u8::from(a == b));
        Self::algebraic(Tensor4::from_fn(n, |i, j, k, l| {
            kappa * (d(j, k) * d(i, l) - d(i, k) * d(j, l))
        }))
    }

    /// Kulkarni–Nomizu product of two symmetric matrices, an algebraic curvature tensor.
    pub fn kulkarni_nomizu(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        Self::algebraic(Tensor4::from_fn(n, |i, j, k, l| {
            // sign chosen so a = b = Id gives positive curvature
            -(a[(i, k)] * b[(j, l)] + a[(j, l)] * b[(i, k)]
                - a[(i, l)] * b[(j, k)]
                - a[(j, k)] * b[(i, l)])
        }))
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn tensor(&self) -> &Tensor4 {
        &self.tensor
    }

    pub fn frame(&self) -> &OrthonormalFrame {
        &self.frame
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.tensor.get(i, j, k, l)
    }

    pub fn residuals(&self) -> SymmetryResiduals {
        SymmetryResiduals::of(&self.tensor)
    }

    pub fn max_abs(&self) -> f64 {
        self.tensor.max_abs()
    }

    /// Frame components of `R(x,y)z`.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let xyz = xy * z[k];
                    if xyz == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        out[l] += xyz * self.tensor.get(i, j, k, l);
                    }
                }
            }
        }
        out
    }

    /// `⟨R(x,y)z, w⟩` for frame-component vectors.
    pub fn form(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        w: &DVector<f64>,
    ) -> f64 {
        self.apply(x, y, z).dot(w)
    }

    /// Re-expresses the tensor in another orthonormal frame at the same point.
    pub fn reframe(&self, frame: &OrthonormalFrame) -> Self {
        let q = self.frame.columns().transpose() * self.frame.metric() * frame.columns();
        Self {
            tensor: transform4(&self.tensor, &q),
            frame: frame.clone(),
            point: self.point.clone(),
        }
    }
}

fn riemann_unchecked(
    metric: &MetricField,
    p: &Point,
    step: f64,
    frame: Option<&OrthonormalFrame>,
) -> Result<RiemannAtPoint> {
    let jet = metric_jet(metric, p, step)?;
    let conn = christoffel(&jet)?;
    let coord = coordinate_curvature(&jet, &conn);
    let frame = match frame {
        Some(f) => f.clone(),
        None => coordinate_frame(&jet.g)?,
    };
    let tensor = transform4(&coord, frame.columns()).map(|v| -v);
    let out = RiemannAtPoint {
        tensor,
        frame,
        point: p.clone(),
    };
    let res = out.residuals();
    let limit = SYMMETRY_ABORT * res.max_abs.max(RESIDUAL_SCALE_FLOOR);
    if res.worst() > limit {
        return Err(Error::SymmetryResidual {
            residual: res.worst(),
            limit,
        });
    }
    Ok(out)
}

/// Sectional curvature of the unit 2-sphere at a fixed validation point, computed through
/// the same pipeline as every metric.
fn sign_probe() -> Result<f64> {
    let sphere = MetricField::new(
        "sign_probe",
        "sphere_probe",
        CoordBox::new(vec![0.2, -3.0], vec![2.9, 3.0]),
        |x| DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, x[0].sin().powi(2)])),
    );
    let p = sphere.point(vec![1.0, 0.4])?;
    let r = riemann_unchecked(&sphere, &p, 1e-3, None)?;
    Ok(r.get(0, 1, 1, 0))
}

/// Asserts the curvature convention: the unit sphere must come out with `K = +1`.
pub fn verify_sign_convention() -> Result<()> {
    static CHECK: OnceLock<std::result::Result<(), f64>> = OnceLock::new();
    let outcome = CHECK.get_or_init(|| match sign_probe() {
        Ok(k) if (k - 1.0).abs() < 1e-6 => Ok(()),
        Ok(k) => Err(k),
        Err(_) => Err(f64::NAN),
    });
    outcome.map_err(|value| Error::SignConvention { value })
}

/// Curvature tensor at `p` in the Gram–Schmidt frame of the coordinate basis.
pub fn riemann(metric: &MetricField, p: &Point, step: f64) -> Result<RiemannAtPoint> {
    verify_sign_convention()?;
    riemann_unchecked(metric, p, step, None)
}

/// Curvature tensor at `p` expressed in a caller-supplied orthonormal frame.
pub fn riemann_in_frame(
    metric: &MetricField,
    p: &Point,
    step: f64,
    frame: &OrthonormalFrame,
) -> Result<RiemannAtPoint> {
    verify_sign_convention()?;
    riemann_unchecked(metric, p, step, Some(frame))
}

/// `K(x,y) = ⟨R(x,y)y,x⟩ / (|x|²|y|² − ⟨x,y⟩²)` for frame-component vectors.
pub fn sectional_curvature(r: &RiemannAtPoint, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    let n = r.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len().min(y.len()),
        });
    }
    let xx = x.norm_squared();
    let yy = y.norm_squared();
    let xy = x.dot(y);
    let area2 = xx * yy - xy * xy;
    // angle between the spanning vectors, 1e-6 rad lower bound
    let sin_angle = if xx > 0.0 && yy > 0.0 {
        (area2.max(0.0) / (xx * yy)).sqrt()
    } else {
        0.0
    };
    if !(sin_angle > 1e-6) {
        return Err(Error::DegeneratePlane);
    }
    Ok(r.form(x, y, y, x) / area2)
}

/// Sectional curvature of the plane spanned by the `i`-th and `j`-th frame vectors.
pub fn frame_sectional(r: &RiemannAtPoint, i: usize, j: usize) -> f64 {
    r.get(i, j, j, i)
}

/// Ordered-pair scalar curvature `Σ_{i≠j} K(e_i,e_j)`.
pub fn scalar_curvature(r: &RiemannAtPoint) -> f64 {
    let n = r.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += r.get(i, j, j, i);
            }
        }
    }
    s
}
