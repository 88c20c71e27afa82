//! The curvature operator on `Λ²` and its k-nonnegativity.
//!
//! Bivectors are expanded on the lexicographic basis `e_i∧e_j`, `i<j`, of an orthonormal
//! frame. With the induced inner product `⟨x∧y, z∧w⟩ = ⟨x,z⟩⟨y,w⟩ − ⟨x,w⟩⟨y,z⟩` this
//! basis is orthonormal, so the operator is an ordinary symmetric matrix.
//!
//! k-nonnegativity is decided twice: from partial sums of the ascending spectrum, and
//! by minimizing the quadratic-form sum over orthonormal k-frames. The two agree because
//! the minimum over k-frames of `Σ⟨ρ v_i, v_i⟩` is exactly `λ_1 + … + λ_k`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point, RiemannAtPoint};
use crate::sampling::{random_orthonormal, stream_rng};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BivectorBasis {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl BivectorBasis {
    pub fn new(n: usize) -> Self {
        let pairs = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        Self { n, pairs }
    }

    /// Dimension of the underlying vector space.
    pub fn vector_dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if a == b || b >= self.n {
            return None;
        }
        // offset of row a in the lexicographic order
        Some(a * (2 * self.n - a - 1) / 2 + (b - a - 1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bivector {
    pub coeffs: DVector<f64>,
}

impl Serialize for Bivector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter())
    }
}

impl Bivector {
    pub fn zeros(basis: &BivectorBasis) -> Self {
        Self {
            coeffs: DVector::zeros(basis.len()),
        }
    }

    pub fn basis_element(basis: &BivectorBasis, i: usize, j: usize) -> Self {
        let mut b = Self::zeros(basis);
        let idx = basis.index_of(i, j).expect("valid index pair");
        b.coeffs[idx] = if i < j { 1.0 } else { -1.0 };
        b
    }

    /// `x∧y` for frame-component vectors.
    pub fn wedge(basis: &BivectorBasis, x: &DVector<f64>, y: &DVector<f64>) -> Self {
        let coeffs = DVector::from_iterator(
            basis.len(),
            basis
                .pairs()
                .iter()
                .map(|&(i, j)| x[i] * y[j] - x[j] * y[i]),
        );
        Self { coeffs }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs.dot(&other.coeffs)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coeffs: &self.coeffs * s,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coeffs: &self.coeffs + &other.coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            coeffs: &self.coeffs - &other.coeffs,
        }
    }

    /// Coefficients keyed by their index pair.
    pub fn labelled(&self, basis: &BivectorBasis) -> Vec<((usize, usize), f64)> {
        basis
            .pairs()
            .iter()
            .copied()
            .zip(self.coeffs.iter().copied())
            .collect()
    }
}

/// Symmetric matrix of `ρ` on the lexicographic bivector basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureOperatorMatrix {
    pub m: DMatrix<f64>,
    /// `None` for operators on an abstract inner-product space.
    pub basis: Option<BivectorBasis>,
    pub point: Option<Point>,
}

impl CurvatureOperatorMatrix {
    /// Wraps a symmetric matrix acting on an abstract inner-product space.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        let residual = symmetry_residual(&m);
        if residual > 1e-8 * m.amax() {
            return Err(Error::AsymmetricOperator { residual });
        }
        Ok(Self {
            m,
            basis: None,
            point: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.m.clone().symmetric_eigenvalues().amax()
    }
}

fn symmetry_residual(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

/// `m[(i,j),(k,l)] = ⟨R(e_i,e_j)e_l, e_k⟩`.
pub fn curvature_operator(r: &RiemannAtPoint) -> Result<CurvatureOperatorMatrix> {
    let basis = BivectorBasis::new(r.dim());
    let pairs = basis.pairs().to_vec();
    let big_n = pairs.len();
    let m = DMatrix::from_fn(big_n, big_n, |a, b| {
        let (i, j) = pairs[a];
        let (k, l) = pairs[b];
        r.get(i, j, l, k)
    });
    let residual = symmetry_residual(&m);
    if residual > 1e-8 * m.amax() {
        return Err(Error::AsymmetricOperator { residual });
    }
    let m = (&m + m.transpose()) * 0.5;
    Ok(CurvatureOperatorMatrix {
        m,
        basis: Some(basis),
        point: Some(r.point().clone()),
    })
}

pub fn quadratic_form(op: &CurvatureOperatorMatrix, b: &Bivector) -> Result<f64> {
    if b.coeffs.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: b.coeffs.len(),
        });
    }
    Ok(b.coeffs.dot(&(&op.m * &b.coeffs)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KVerdict {
    pub k: usize,
    pub nonnegative: bool,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: DMatrix<f64>,
    pub partial_sums: Vec<f64>,
    pub verdicts: Vec<KVerdict>,
    pub tolerance: f64,
}

impl SpectralReport {
    pub fn verdict(&self, k: usize) -> Option<KVerdict> {
        self.verdicts.get(k.checked_sub(1)?).copied()
    }

    pub fn k_nonnegative(&self, k: usize) -> bool {
        self.verdict(k).is_some_and(|v| v.nonnegative)
    }

    /// Eigenvectors of the `k` smallest eigenvalues, as columns.
    pub fn bottom_frame(&self, k: usize) -> DMatrix<f64> {
        self.eigenvectors.columns(0, k).into_owned()
    }
}

/// `1e-8 · max(1, spectral radius)`.
pub fn default_tolerance(op: &CurvatureOperatorMatrix) -> f64 {
    1e-8 * op.spectral_radius().max(1.0)
}

/// Ascending eigen-decomposition with a deterministic sign for each eigenvector: the first
/// component of magnitude above `1e-12` is made positive.
pub fn sorted_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let eig = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(Error::EigenNonConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        if let Some(first) = v.iter().copied().find(|c| c.abs() > 1e-12) {
            if first < 0.0 {
                v.neg_mut();
            }
        }
        vectors.set_column(dst, &v);
    }
    Ok((values, vectors))
}

pub fn spectral_report(
    op: &CurvatureOperatorMatrix,
    tolerance: Option<f64>,
) -> Result<SpectralReport> {
    let (eigenvalues, eigenvectors) = sorted_eigen(&op.m)?;
    let radius = eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let tolerance = tolerance.unwrap_or(1e-8 * radius.max(1.0));
    let partial_sums: Vec<f64> = eigenvalues
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    let verdicts = partial_sums
        .iter()
        .enumerate()
        .map(|(i, &s)| KVerdict {
            k: i + 1,
            nonnegative: s >= -tolerance,
            positive: s > tolerance,
        })
        .collect();
    Ok(SpectralReport {
        eigenvalues,
        eigenvectors,
        partial_sums,
        verdicts,
        tolerance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameSumMin {
    pub min_value: f64,
    pub frame: Vec<Bivector>,
    /// Best value among the random frames alone.
    pub best_random: f64,
}

fn frame_value(m: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    (v.transpose() * m * v).trace()
}

/// Descent on the Stiefel manifold with QR retraction, accepting only improving steps.
fn refine(m: &DMatrix<f64>, start: DMatrix<f64>, scale: f64) -> (f64, DMatrix<f64>) {
    let mut v = start;
    let mut best = frame_value(m, &v);
    let mut t = 0.5 / scale.max(1e-12);
    for _ in 0..100 {
        let mv = m * &v;
        let grad = &mv - &v * (v.transpose() * &mv);
        if grad.norm() < 1e-14 * scale.max(1.0) {
            break;
        }
        let trial = (&v - grad * (2.0 * t)).qr().q();
        let value = frame_value(m, &trial);
        if value < best {
            best = value;
            v = trial;
        } else {
            t *= 0.5;
            if t < 1e-12 / scale.max(1e-12) {
                break;
            }
        }
    }
    (best, v)
}

/// Minimum of `Σ_{i≤k} ⟨ρ v_i, v_i⟩` over orthonormal k-frames, searched over seeded random
/// frames plus a descent pass started at the bottom-k eigenvector frame.
pub fn frame_sum_min(
    op: &CurvatureOperatorMatrix,
    k: usize,
    sample_count: usize,
    seed: u64,
) -> Result<FrameSumMin> {
    let big_n = op.dim();
    if k == 0 || k > big_n {
        return Err(Error::InvalidK { k, max: big_n });
    }
    let m = &op.m;
    let (best_random_value, best_random_frame) = (0..sample_count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let v = random_orthonormal(&mut rng, big_n, k);
            (frame_value(m, &v), i, v)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map_or((f64::INFINITY, None), |(value, _, v)| (value, Some(v)));

    let (_, eigvecs) = sorted_eigen(m)?;
    let scale = m.amax();
    let (refined_value, refined_frame) = refine(m, eigvecs.columns(0, k).into_owned(), scale);

    let (min_value, frame) = match best_random_frame {
        Some(v) if best_random_value < refined_value => (best_random_value, v),
        _ => (refined_value, refined_frame),
    };
    let frame = frame
        .column_iter()
        .map(|c| Bivector {
            coeffs: c.into_owned(),
        })
        .collect();
    Ok(FrameSumMin {
        min_value,
        frame,
        best_random: best_random_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> CurvatureOperatorMatrix {
        CurvatureOperatorMatrix::from_matrix(DMatrix::from_diagonal(&DVector::from_row_slice(v)))
            .unwrap()
    }

    #[test]
    fn lexicographic_basis() {
        let b = BivectorBasis::new(4);
        assert_eq!(b.pairs(), &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        for (idx, &(i, j)) in b.pairs().iter().enumerate() {
            assert_eq!(b.index_of(i, j), Some(idx));
            assert_eq!(b.index_of(j, i), Some(idx));
        }
        assert_eq!(b.index_of(2, 2), None);
    }

    #[test]
    fn verdicts_on_given_spectrum() {
        let r = spectral_report(&diag(&[-1.0, 0.5, 0.8, 1.0, 2.0, 3.0]), None).unwrap();
        assert!(!r.k_nonnegative(1));
        assert!(!r.k_nonnegative(2));
        assert!((r.partial_sums[1] + 0.5).abs() < 1e-15);
        assert!(r.k_nonnegative(3));
        assert!((r.partial_sums[2] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_is_nonnegative_not_positive() {
        let r = spectral_report(&diag(&[0.0; 6]), None).unwrap();
        assert!(r.verdicts.iter().all(|v| v.nonnegative && !v.positive));
    }

    #[test]
    fn diagonal_frame_minimum() {
        let out = frame_sum_min(&diag(&[-1.0, 0.0, 2.0]), 2, 64, 3).unwrap();
        assert!((out.min_value + 1.0).abs() < 1e-12);
        // the minimizing frame spans {e1, e2}
        for b in &out.frame {
            assert!(b.coeffs[2].abs() < 1e-8);
        }
    }

    #[test]
    fn identity_frame_sum_is_k() {
        let op = diag(&[1.0; 6]);
        for k in 1..=6 {
            let out = frame_sum_min(&op, k, 16, 9).unwrap();
            assert!((out.min_value - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_k_is_rejected() {
        let op = diag(&[1.0, 2.0]);
        assert!(matches!(
            frame_sum_min(&op, 0, 1, 0),
            Err(Error::InvalidK { .. })
        ));
        assert!(matches!(
            frame_sum_min(&op, 3, 1, 0),
            Err(Error::InvalidK { .. })
        ));
    }

    #[test]
    fn quadratic_form_cases() {
        let id = diag(&[1.0; 3]);
        let b = Bivector {
            coeffs: DVector::from_vec(vec![0.6, 0.8, 0.0]),
        };
        assert!((quadratic_form(&id, &b).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(quadratic_form(&diag(&[0.0; 3]), &b).unwrap(), 0.0);
        let short = Bivector {
            coeffs: DVector::from_vec(vec![1.0]),
        };
        assert!(matches!(
            quadratic_form(&id, &short),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constant_curvature_operator_is_identity() {
        let op = curvature_operator(&RiemannAtPoint::constant_curvature(3, 1.0)).unwrap();
        assert!((op.m.clone() - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
        let rep = spectral_report(&op, None).unwrap();
        for (k, s) in rep.partial_sums.iter().enumerate() {
            assert!((s - (k + 1) as f64).abs() < 1e-12);
        }
        assert!(rep.verdicts.iter().all(|v| v.positive));
    }

    #[test]
    fn wedge_is_antisymmetric() {
        let basis = BivectorBasis::new(3);
        let x = DVector::from_vec(vec![1.0, 2.0, 0.5]);
        let y = DVector::from_vec(vec![-0.3, 0.1, 4.0]);
        let a = Bivector::wedge(&basis, &x, &y);
        let b = Bivector::wedge(&basis, &y, &x);
        assert_eq!(a.add(&b).norm(), 0.0);
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(
            CurvatureOperatorMatrix::from_matrix(m),
            Err(Error::AsymmetricOperator { .. })
        ));
    }
}
