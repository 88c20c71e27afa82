use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Lower bound on the Gram determinant of the normalized input vectors.
pub const GRAM_DET_FLOOR: f64 = 1e-12;

/// A g-orthonormal family of vectors, stored as columns in chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalFrame {
    columns: DMatrix<f64>,
    metric: DMatrix<f64>,
    gram_residual: f64,
}

impl OrthonormalFrame {
    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    /// The metric matrix the frame is orthonormal for.
    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    /// max-entry of `E^T g E - Id`.
    pub fn gram_residual(&self) -> f64 {
        self.gram_residual
    }

    pub fn len(&self) -> usize {
        self.columns.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.ncols() == 0
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.columns.column(i).into_owned()
    }

    /// Components of a chart vector along the frame (`E^T g v`).
    pub fn components(&self, v: &DVector<f64>) -> DVector<f64> {
        self.columns.transpose() * (&self.metric * v)
    }

    /// Chart vector with the given frame components.
    pub fn to_chart(&self, components: &DVector<f64>) -> DVector<f64> {
        &self.columns * components
    }

    /// Frame with a reordered or sign-flipped set of columns; orthonormality is preserved
    /// exactly, so no recomputation is needed.
    pub(crate) fn from_parts_unchecked(columns: DMatrix<f64>, metric: DMatrix<f64>) -> Self {
        let gram_residual = gram_residual(&columns, &metric);
        Self {
            columns,
            metric,
            gram_residual,
        }
    }
}

fn gram_residual(e: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    let gram = e.transpose() * g * e;
    let m = gram.nrows();
    (gram - DMatrix::<f64>::identity(m, m)).amax()
}

/// Gram–Schmidt in the inner product `g`, keeping the direction of the first vector.
pub fn orthonormalize(g: &DMatrix<f64>, vectors: &[DVector<f64>]) -> Result<OrthonormalFrame> {
    let n = g.nrows();
    if vectors.iter().any(|v| v.len() != n) {
        let got = vectors
            .iter()
            .map(|v| v.len())
            .find(|&l| l != n)
            .unwrap_or(0);
        return Err(Error::DimensionMismatch { expected: n, got });
    }
    let ip = |a: &DVector<f64>, b: &DVector<f64>| a.dot(&(g * b));

    let m = vectors.len();
    let norms: Vec<f64> = vectors.iter().map(|v| ip(v, v).max(0.0).sqrt()).collect();
    if norms.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return Err(Error::DependentVectors { gram_det: 0.0 });
    }
    let gram = DMatrix::from_fn(m, m, |i, j| {
        ip(&vectors[i], &vectors[j]) / (norms[i] * norms[j])
    });
    let gram_det = gram.determinant();
    if !(gram_det > GRAM_DET_FLOOR) {
        return Err(Error::DependentVectors { gram_det });
    }

    let mut out: Vec<DVector<f64>> = Vec::with_capacity(m);
    for v in vectors {
        let mut w = v.clone();
        // two passes keep the columns orthogonal to roundoff
        for _ in 0..2 {
            for e in &out {
                let c = ip(e, &w);
                w -= e * c;
            }
        }
        let norm = ip(&w, &w).sqrt();
        w /= norm;
        out.push(w);
    }
    let columns = DMatrix::from_columns(&out);
    let gram_residual = gram_residual(&columns, g);
    Ok(OrthonormalFrame {
        columns,
        metric: g.clone(),
        gram_residual,
    })
}

/// Orthonormal frame from the coordinate basis.
pub fn coordinate_frame(g: &DMatrix<f64>) -> Result<OrthonormalFrame> {
    let n = g.nrows();
    let basis: Vec<DVector<f64>> = (0..n)
        .map(|i| DVector::from_fn(n, |j, _| f64::from(u8::from(i == j))))
        .collect();
    orthonormalize(g, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_metric_keeps_standard_basis() {
        let g = DMatrix::identity(3, 3);
        let f = coordinate_frame(&g).unwrap();
        assert_eq!(f.columns(), &DMatrix::identity(3, 3));
        assert_eq!(f.gram_residual(), 0.0);
    }

    #[test]
    fn weighted_inner_product() {
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]));
        let f = orthonormalize(
            &g,
            &[
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![1.0, 1.0]),
            ],
        )
        .unwrap();
        assert_abs_diff_eq!(f.vector(0)[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.vector(0)[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.vector(1)[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.vector(1)[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn dependent_pair_is_rejected() {
        let g = DMatrix::identity(2, 2);
        let err = orthonormalize(
            &g,
            &[
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![2.0, 0.0]),
            ],
        );
        assert!(matches!(err, Err(Error::DependentVectors { .. })));
    }

    #[test]
    fn components_roundtrip() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0]);
        let f = coordinate_frame(&g).unwrap();
        assert!(f.gram_residual() < 1e-12);
        let v = DVector::from_vec(vec![0.3, -1.0, 2.0]);
        let back = f.to_chart(&f.components(&v));
        assert!((back - v).amax() < 1e-12);
    }
}
