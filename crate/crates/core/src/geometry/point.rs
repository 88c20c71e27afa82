use serde::Serialize;

use crate::error::{Error, Result};

/// A point of a coordinate chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Point {
    pub coords: Vec<f64>,
    pub chart: String,
}

impl Point {
    pub fn new(chart: impl Into<String>, coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "point coordinates",
            });
        }
        Ok(Self {
            coords,
            chart: chart.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Axis-aligned coordinate box, closed on both ends.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoordBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl CoordBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "box bounds must have equal length");
        assert!(
            lo.iter().zip(&hi).all(|(a, b)| a < b),
            "empty coordinate box"
        );
        Self { lo, hi }
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    /// First axis on which `x` sits closer than `margin` to the boundary.
    pub fn margin_violation(&self, x: &[f64], margin: f64) -> Option<usize> {
        (0..self.dim()).find(|&i| x[i] < self.lo[i] + margin || x[i] > self.hi[i] - margin)
    }

    pub fn min_extent(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .fold(f64::INFINITY, f64::min)
    }

    /// Affine image of a point of the unit cube.
    pub fn lerp(&self, t: &[f64]) -> Vec<f64> {
        t.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(s, (a, b))| a + s * (b - a))
            .collect()
    }
}
