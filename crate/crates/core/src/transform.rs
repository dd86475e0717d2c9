//! The `P̂`-transform `y = P̂x`, its inverse, the Schauder basis `b^(k)` and
//! partial-sum reconstruction.
//!
//! Every routine works on explicit prefixes of length `N`. Rows of `P̂` are
//! finite, so the first `N` components of `P̂x` depend only on `x_0..x_{N−1}`
//! and the prefix arithmetic is exact up to rounding.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coeffs::FracOrder;
use crate::error::TransformError;
use crate::operator::{DenseTriangle, TriangularOperator};

/// A finitely supported real sequence; unspecified indices are zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FiniteSequence {
    support: BTreeMap<usize, f64>,
}

impl FiniteSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values(values: &[f64]) -> Self {
        let mut s = Self::new();
        for (i, &v) in values.iter().enumerate() {
            s.set(i, v);
        }
        s
    }

    /// The unit sequence `e^(k)`.
    pub fn unit(k: usize) -> Self {
        let mut s = Self::new();
        s.set(k, 1.0);
        s
    }

    pub fn get(&self, i: usize) -> f64 {
        self.support.get(&i).copied().unwrap_or(0.0)
    }

    /// Stores `v` at `i`; zeros are pruned from the support.
    pub fn set(&mut self, i: usize, v: f64) {
        if v == 0.0 {
            self.support.remove(&i);
        } else {
            self.support.insert(i, v);
        }
    }

    /// One past the largest index with a nonzero value.
    pub fn extent(&self) -> usize {
        self.support.keys().next_back().map_or(0, |&i| i + 1)
    }

    pub fn nnz(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().map(|(&i, &v)| (i, v))
    }

    pub fn prefix(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for (i, v) in self.support.range(..len) {
            out[*i] = *v;
        }
        out
    }

    /// Entrywise absolute values.
    pub fn abs(&self) -> Self {
        FiniteSequence {
            support: self.support.iter().map(|(&i, &v)| (i, v.abs())).collect(),
        }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        let mut out = Self::new();
        for (i, v) in self.iter() {
            out.set(i, alpha * v);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, v) in other.iter() {
            out.set(i, out.get(i) + v);
        }
        out
    }
}

impl From<&[f64]> for FiniteSequence {
    fn from(values: &[f64]) -> Self {
        Self::from_values(values)
    }
}

impl FromIterator<(usize, f64)> for FiniteSequence {
    fn from_iter<I: IntoIterator<Item = (usize, f64)>>(iter: I) -> Self {
        let mut s = Self::new();
        for (i, v) in iter {
            s.set(i, v);
        }
        s
    }
}

/// `b^(k)` truncated to `N` components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisVector {
    pub k: usize,
    pub values: Vec<f64>,
}

impl BasisVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_sequence(&self) -> FiniteSequence {
        FiniteSequence::from_values(&self.values)
    }
}

/// Truncated forward and inverse triangles for one `(τ, N)` pair, reusable
/// across many sequences.
#[derive(Debug, Clone)]
pub struct PhatTransform {
    tau: FracOrder,
    forward: DenseTriangle,
    inverse: DenseTriangle,
}

impl PhatTransform {
    pub fn new(tau: FracOrder, horizon: usize) -> Self {
        PhatTransform {
            tau,
            forward: TriangularOperator::phat(tau).truncate(horizon),
            inverse: TriangularOperator::phat_inverse(tau).truncate(horizon),
        }
    }

    pub fn tau(&self) -> FracOrder {
        self.tau
    }

    pub fn horizon(&self) -> usize {
        self.forward.size()
    }

    pub fn forward(&self) -> &DenseTriangle {
        &self.forward
    }

    pub fn inverse(&self) -> &DenseTriangle {
        &self.inverse
    }

    /// `(P̂x)_n` for `n < N`.
    pub fn apply(&self, x: &FiniteSequence) -> Vec<f64> {
        self.forward.mul_vec(&x.prefix(self.horizon()))
    }

    pub fn apply_prefix(&self, x: &[f64]) -> Vec<f64> {
        self.forward.mul_vec(x)
    }

    /// `x_k = Σ_{j≤k} P̂^{-1}(k, j) y_j` for `k < N`.
    pub fn inverse_apply(&self, y: &FiniteSequence) -> Vec<f64> {
        self.inverse.mul_vec(&y.prefix(self.horizon()))
    }

    pub fn inverse_apply_prefix(&self, y: &[f64]) -> Vec<f64> {
        self.inverse.mul_vec(y)
    }

    /// Column `k` of `P̂^{-1}`.
    pub fn basis_vector(&self, k: usize) -> Result<BasisVector, TransformError> {
        let horizon = self.horizon();
        if k >= horizon {
            return Err(TransformError::IndexBeyondHorizon { index: k, horizon });
        }
        let values = (0..horizon).map(|n| self.inverse.get(n, k)).collect();
        Ok(BasisVector { k, values })
    }

    /// `max_n |(P̂b^(k))_n − δ_{nk}|`, each row divided by
    /// `max(1, Σ_j |P̂(n,j) b^(k)_j|)`.
    ///
    /// Entries of `P̂` and `b^(k)` both grow like `2^n`, so the cancellation
    /// in `P̂b^(k)` is only meaningful against the size of its terms.
    pub fn schauder_residual(&self, k: usize) -> Result<f64, TransformError> {
        let b = self.basis_vector(k)?;
        let mut worst: f64 = 0.0;
        for n in 0..self.horizon() {
            let (mut sum, mut scale) = (0.0, 0.0f64);
            for (j, c) in self.forward.row(n).iter().enumerate() {
                let t = c * b.values[j];
                sum += t;
                scale += t.abs();
            }
            let target = if n == k { 1.0 } else { 0.0 };
            worst = worst.max((sum - target).abs() / scale.max(1.0));
        }
        Ok(worst)
    }

    /// `Σ_{k=0}^{K} μ_k b^(k)` with `μ = P̂x` recomputed here.
    pub fn reconstruct(&self, x: &FiniteSequence, terms: usize) -> Result<Vec<f64>, TransformError> {
        let horizon = self.horizon();
        if terms >= horizon {
            return Err(TransformError::IndexBeyondHorizon {
                index: terms,
                horizon,
            });
        }
        let mu = self.apply(x);
        let mut out = vec![0.0; horizon];
        for (k, &m) in mu.iter().enumerate().take(terms + 1) {
            if m == 0.0 {
                continue;
            }
            for (n, slot) in out.iter_mut().enumerate().skip(k) {
                *slot += m * self.inverse.get(n, k);
            }
        }
        Ok(out)
    }
}

pub fn apply(tau: FracOrder, x: &FiniteSequence, horizon: usize) -> Vec<f64> {
    PhatTransform::new(tau, horizon).apply(x)
}

pub fn inverse_apply(tau: FracOrder, y: &FiniteSequence, horizon: usize) -> Vec<f64> {
    PhatTransform::new(tau, horizon).inverse_apply(y)
}

pub fn basis_vector(tau: FracOrder, k: usize, horizon: usize) -> Result<BasisVector, TransformError> {
    if k >= horizon {
        return Err(TransformError::IndexBeyondHorizon { index: k, horizon });
    }
    PhatTransform::new(tau, horizon).basis_vector(k)
}

pub fn reconstruct(
    tau: FracOrder,
    x: &FiniteSequence,
    terms: usize,
    horizon: usize,
) -> Result<Vec<f64>, TransformError> {
    if terms >= horizon {
        return Err(TransformError::IndexBeyondHorizon {
            index: terms,
            horizon,
        });
    }
    PhatTransform::new(tau, horizon).reconstruct(x, terms)
}
