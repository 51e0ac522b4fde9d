//! Weighted pointwise 3-product spaces.
//!
//! Every space here carries the form `<x,y,z> = sum_i w_i x_i y_i z_i` with
//! strictly positive weights and the norm `(sum_i w_i |x_i|^3)^(1/3)`. Unit
//! weights give R^n (or a truncation of l^3); quadrature weights give a
//! discretized L^3.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_dimension, Error, Result};
use crate::quadrature::{self, Rule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriProductSpace {
    weights: Vec<f64>,
    label: String,
}

/// Coordinates together with the self-pairing `<x,x,x>` as computed by the
/// space that built them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    coords: Vec<f64>,
    cube_sum: f64,
}

impl StateVector {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn cube_sum(&self) -> f64 {
        self.cube_sum
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl Deref for StateVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.coords
    }
}

impl AsRef<[f64]> for StateVector {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

/// Product of three reals in an order that depends only on their values, so
/// that `t(a,b,c)` is bit-identical for every permutation of the arguments.
#[inline]
fn canonical_product(a: f64, b: f64, c: f64) -> f64 {
    let mut t = [a, b, c];
    if t[0].total_cmp(&t[1]).is_gt() {
        t.swap(0, 1);
    }
    if t[1].total_cmp(&t[2]).is_gt() {
        t.swap(1, 2);
    }
    if t[0].total_cmp(&t[1]).is_gt() {
        t.swap(0, 1);
    }
    t[0] * t[1] * t[2]
}

impl TriProductSpace {
    /// Build a pointwise space from strictly positive, finite weights.
    pub fn pointwise(weights: Vec<f64>) -> Result<Self> {
        Self::pointwise_labeled(weights, "pointwise")
    }

    pub fn pointwise_labeled(weights: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpace("weights must be non-empty".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidSpace(format!(
                "weight {} at index {i} is not a positive finite real",
                w
            )));
        }
        Ok(Self {
            weights,
            label: label.into(),
        })
    }

    /// `R^n` with the plain pointwise form.
    pub fn unit(dimension: usize) -> Result<Self> {
        Self::pointwise_labeled(vec![1.0; dimension], format!("unit-R{dimension}"))
    }

    /// Discretized `L^3([lo, hi])`; also returns the quadrature nodes so callers
    /// can sample functions on them.
    pub fn quadrature(rule: Rule, nodes: usize, lo: f64, hi: f64) -> Result<(Self, Vec<f64>)> {
        let (points, weights) = quadrature::nodes_and_weights(rule, nodes, lo, hi)?;
        let label = format!("L3[{lo},{hi}]-{}-{nodes}", rule.name());
        Ok((Self::pointwise_labeled(weights, label)?, points))
    }

    /// Builds a form without validating the weights. Only meant for negative
    /// tests that need a broken form.
    #[doc(hidden)]
    pub fn with_unchecked_weights(weights: Vec<f64>, label: impl Into<String>) -> Self {
        Self {
            weights,
            label: label.into(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().fold(0.0_f64, |m, w| m.max(w.abs()))
    }

    pub fn eval3(&self, x: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
        let n = self.dimension();
        check_dimension(n, x.len())?;
        check_dimension(n, y.len())?;
        check_dimension(n, z.len())?;
        let mut sum = 0.0;
        for i in 0..n {
            sum += self.weights[i] * canonical_product(x[i], y[i], z[i]);
        }
        Ok(sum)
    }

    /// `sum_i w_i |x_i y_i z_i|`: the magnitude that bounds rounding in `eval3`.
    pub fn eval3_abs(&self, x: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
        let n = self.dimension();
        check_dimension(n, x.len())?;
        check_dimension(n, y.len())?;
        check_dimension(n, z.len())?;
        Ok((0..n)
            .map(|i| (self.weights[i] * x[i] * y[i] * z[i]).abs())
            .sum())
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        check_dimension(self.dimension(), x.len())?;
        let s: f64 = self
            .weights
            .iter()
            .zip(x)
            .map(|(w, v)| w * v.abs().powi(3))
            .sum();
        // cbrt keeps a corrupted (negative-weight) form from producing NaN.
        Ok(s.cbrt())
    }

    pub fn state(&self, coords: Vec<f64>) -> Result<StateVector> {
        let cube_sum = self.eval3(&coords, &coords, &coords)?;
        Ok(StateVector { coords, cube_sum })
    }

    /// Rescale `x` by the signed cube root of `<x,x,x>` so the result pairs to 1.
    pub fn cube_normalize(&self, x: &[f64], epsilon: f64) -> Result<StateVector> {
        let s = self.eval3(x, x, x)?;
        if s.is_nan() || s.abs() < epsilon {
            return Err(Error::NearNullCube {
                cube_sum: s,
                epsilon,
            });
        }
        let r = s.cbrt();
        self.state(x.iter().map(|v| v / r).collect())
    }

    /// `|<x,x,x> - 1|` allowed for a normalized state, relative to the
    /// magnitude of the terms in the cube sum.
    pub fn normalization_slack(&self, x: &[f64], tol: &crate::Tolerance) -> Result<f64> {
        Ok(tol.allowance(self.eval3_abs(x, x, x)?))
    }

    pub fn is_normalized(&self, x: &StateVector, tol: &crate::Tolerance) -> Result<bool> {
        let slack = self.normalization_slack(x, tol)?;
        Ok((x.cube_sum - 1.0).abs() <= slack)
    }
}
