//! Lazily evaluated infinite lower-triangular operators.
//!
//! An operator is an entry rule `(n, k) → a_{nk}` that vanishes above the
//! diagonal. Rows are evaluated on demand and cached per operator, which keeps
//! composition chains at `O(N^3)` for an `N × N` truncation. Composition
//! itself memoizes nothing beyond the row caches of the operators involved.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::coeffs::{frac_binom, pascal_entry, pascal_inv_entry, alternate, CoeffTable, FracOrder};

type EntryRule = dyn Fn(usize, usize) -> f64 + Send + Sync;

/// An infinite lower-triangular matrix defined by an entry rule.
#[derive(Clone)]
pub struct TriangularOperator {
    descriptor: String,
    rule: Arc<EntryRule>,
    rows: Arc<RwLock<HashMap<usize, Arc<[f64]>>>>,
}

impl fmt::Debug for TriangularOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TriangularOperator")
            .field("descriptor", &self.descriptor)
            .finish_non_exhaustive()
    }
}

impl TriangularOperator {
    /// Wraps an entry rule. The rule is only consulted for `k ≤ n`; entries
    /// above the diagonal are zero regardless of what it returns there.
    pub fn from_rule<F>(descriptor: impl Into<String>, rule: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Send + Sync + 'static,
    {
        TriangularOperator {
            descriptor: descriptor.into(),
            rule: Arc::new(rule),
            rows: Arc::new(RwLock::new(HashMap::new())),
        }
    }

    pub fn identity() -> Self {
        Self::from_rule("I", |n, k| if n == k { 1.0 } else { 0.0 })
    }

    pub fn pascal() -> Self {
        Self::from_rule("P", pascal_entry)
    }

    pub fn pascal_inverse() -> Self {
        Self::from_rule("P^-1", pascal_inv_entry)
    }

    /// `Δ^(τ)`.
    pub fn delta(tau: FracOrder) -> Self {
        Self::difference(tau.value(), format!("Delta(tau={tau})"))
    }

    /// `Δ^(−τ)`.
    pub fn delta_inverse(tau: FracOrder) -> Self {
        Self::difference(tau.negated(), format!("Delta^-1(tau={tau})"))
    }

    /// Difference triangle `(−1)^{n−k} C(order, n−k)` of an arbitrary real
    /// order.
    pub fn difference(order: f64, descriptor: impl Into<String>) -> Self {
        let table = CoeffTable::new(order);
        Self::from_rule(descriptor, move |n, k| table.triangle_entry(n, k))
    }

    /// `P̂ = P·Δ^(τ)` from its defining finite sum.
    pub fn phat(tau: FracOrder) -> Self {
        let table = CoeffTable::forward(tau);
        Self::from_rule(format!("Phat(tau={tau})"), move |n, k| {
            (k..=n)
                .map(|i| pascal_entry(n, i) * table.triangle_entry(i, k))
                .sum()
        })
    }

    /// `P̂^{-1}` from its closed form.
    pub fn phat_inverse(tau: FracOrder) -> Self {
        let table = CoeffTable::inverse(tau);
        Self::from_rule(format!("Phat^-1(tau={tau})"), move |n, k| {
            (k..=n)
                .map(|j| table.triangle_entry(n, j) * pascal_inv_entry(j, k))
                .sum()
        })
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Entries `a_{n0}, …, a_{nn}`.
    pub fn row(&self, n: usize) -> Arc<[f64]> {
        if let Some(row) = self.rows.read().expect("row cache poisoned").get(&n) {
            return row.clone();
        }
        let row: Arc<[f64]> = (0..=n).map(|k| (self.rule)(n, k)).collect();
        self.rows
            .write()
            .expect("row cache poisoned")
            .entry(n)
            .or_insert(row)
            .clone()
    }

    pub fn entry(&self, n: usize, k: usize) -> f64 {
        if k > n {
            0.0
        } else {
            self.row(n)[k]
        }
    }

    /// `(self · other)(n, k) = Σ_{j=k}^{n} self(n, j) · other(j, k)`.
    pub fn compose(&self, other: &TriangularOperator) -> TriangularOperator {
        let a = self.clone();
        let b = other.clone();
        let descriptor = format!("{}*{}", self.descriptor, other.descriptor);
        Self::from_rule(descriptor, move |n, k| {
            let row = a.row(n);
            (k..=n).map(|j| row[j] * b.entry(j, k)).sum()
        })
    }

    /// The leading `size × size` block.
    pub fn truncate(&self, size: usize) -> DenseTriangle {
        let mut out = DenseTriangle::zeros(size);
        for n in 0..size {
            let row = self.row(n);
            out.row_mut(n).copy_from_slice(&row);
        }
        out
    }
}

/// `P̂(n, k)` for a single index pair.
pub fn phat_entry(tau: FracOrder, n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (k..=n)
        .map(|i| pascal_entry(n, i) * alternate(i - k, frac_binom(tau.value(), i - k)))
        .sum()
}

/// `P̂^{-1}(n, k)` for a single index pair.
pub fn phat_inv_entry(tau: FracOrder, n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (k..=n)
        .map(|j| alternate(n - j, frac_binom(tau.negated(), n - j)) * pascal_inv_entry(j, k))
        .sum()
}

/// Relative residual of `P̂ · P̂^{-1} − I` on the `size × size` truncation.
pub fn identity_residual(tau: FracOrder, size: usize) -> f64 {
    let forward = TriangularOperator::phat(tau).truncate(size);
    let inverse = TriangularOperator::phat_inverse(tau).truncate(size);
    product_residual(&forward, &inverse)
}

/// `max_{n,k} |(A·B)(n,k) − δ_{nk}| / rowScale(n, k)`, where the scale is
/// the largest summed product magnitude `|A(n,j)·B(j,k)|` (at least 1).
pub fn product_residual(a: &DenseTriangle, b: &DenseTriangle) -> f64 {
    let size = a.size().min(b.size());
    let mut worst: f64 = 0.0;
    for n in 0..size {
        for k in 0..size {
            let mut sum = 0.0;
            let mut scale: f64 = 1.0;
            for j in k..=n {
                let term = a.get(n, j) * b.get(j, k);
                sum += term;
                scale = scale.max(term.abs());
            }
            let target = if n == k { 1.0 } else { 0.0 };
            worst = worst.max((sum - target).abs() / scale);
        }
    }
    worst
}

/// A finite `N × N` lower-triangular block, stored row-packed.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTriangle {
    size: usize,
    values: Vec<f64>,
}

#[inline]
fn offset(n: usize) -> usize {
    n * (n + 1) / 2
}

impl DenseTriangle {
    pub fn zeros(size: usize) -> Self {
        DenseTriangle {
            size,
            values: vec![0.0; offset(size)],
        }
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(size);
        for n in 0..size {
            for k in 0..=n {
                out.values[offset(n) + k] = f(n, k);
            }
        }
        out
    }

    /// Builds from ragged rows; row `n` supplies entries `0..=n`, missing
    /// trailing entries are zero. Returns `None` if a row is too long.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let mut out = Self::zeros(rows.len());
        for (n, row) in rows.iter().enumerate() {
            if row.len() > n + 1 {
                return None;
            }
            out.row_mut(n)[..row.len()].copy_from_slice(row);
        }
        Some(out)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, n: usize, k: usize) -> f64 {
        if k > n || n >= self.size {
            0.0
        } else {
            self.values[offset(n) + k]
        }
    }

    /// Sets a lower-triangle entry. Panics if `k > n` or `n` is out of range.
    pub fn set(&mut self, n: usize, k: usize, v: f64) {
        assert!(k <= n && n < self.size, "({n}, {k}) outside the triangle");
        self.values[offset(n) + k] = v;
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.values[offset(n)..offset(n + 1)]
    }

    pub fn row_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.values[offset(n)..offset(n + 1)]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.size).map(move |n| self.row(n))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// `A·x` on the first `size` components; missing components of `x` are
    /// zero.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows()
            .map(|row| row.iter().zip(x).map(|(a, v)| a * v).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseTriangle) -> DenseTriangle {
        let size = self.size.min(other.size);
        DenseTriangle::from_fn(size, |n, k| {
            (k..=n).map(|j| self.get(n, j) * other.get(j, k)).sum()
        })
    }

    /// Largest absolute entrywise difference (over the common block).
    pub fn max_abs_diff(&self, other: &DenseTriangle) -> f64 {
        let size = self.size.min(other.size);
        let mut worst: f64 = 0.0;
        for n in 0..size {
            for k in 0..=n {
                worst = worst.max((self.get(n, k) - other.get(n, k)).abs());
            }
        }
        worst
    }
}
