//! Generalized binomial coefficients and the entries of the four elementary
//! triangles: the fractional difference `Δ^(τ)`, its inverse `Δ^(−τ)`, the
//! Pascal matrix `P` and `P^{-1}`.
//!
//! Coefficients `C(τ, i) = Γ(τ+1) / (i! Γ(τ−i+1))` are always produced by the
//! multiplicative recurrence `C(τ, i) = C(τ, i−1) · (τ−i+1) / i`. The Gamma
//! function is never evaluated at its poles; where the ratio has a removable
//! singularity the recurrence yields an exact zero.

use std::fmt;
use std::sync::RwLock;

use crate::error::CoeffError;

/// Largest row index for which Pascal entries are computed in exact
/// integer arithmetic (`binom(64, 32)` fits in 64 unsigned bits).
pub const EXACT_PASCAL_MAX_N: usize = 64;

/// A fractional order τ.
///
/// Admissible orders are finite reals outside `{0, −1, −2, …}`. The order
/// zero is only reachable through [`FracOrder::integer`], which exists for
/// the integer-order reductions (`Δ^(0)` is the identity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    tau: f64,
}

impl FracOrder {
    pub fn new(tau: f64) -> Result<Self, CoeffError> {
        if !tau.is_finite() {
            return Err(CoeffError::NonFiniteOrder(tau));
        }
        if tau <= 0.0 && tau.fract() == 0.0 {
            return Err(CoeffError::InadmissibleOrder(tau));
        }
        Ok(FracOrder { tau })
    }

    /// Nonnegative integer order `m`, including `m = 0`.
    pub fn integer(m: u32) -> Self {
        FracOrder { tau: f64::from(m) }
    }

    pub fn value(self) -> f64 {
        self.tau
    }

    /// The order of the inverse difference operator, `−τ`.
    pub fn negated(self) -> f64 {
        -self.tau
    }

    /// `Some(m)` when τ is a nonnegative integer.
    pub fn as_integer(self) -> Option<u32> {
        if self.tau.fract() == 0.0 && self.tau >= 0.0 && self.tau <= f64::from(u32::MAX) {
            Some(self.tau as u32)
        } else {
            None
        }
    }
}

impl fmt::Display for FracOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tau)
    }
}

/// `C(order, i)` by the multiplicative recurrence. Total for every real order.
pub fn frac_binom(order: f64, i: usize) -> f64 {
    let mut c = 1.0;
    for j in 1..=i {
        c = step(c, order, j);
        if c == 0.0 {
            break;
        }
    }
    c
}

#[inline]
fn step(prev: f64, order: f64, j: usize) -> f64 {
    let j = j as f64;
    prev * (order - j + 1.0) / j
}

/// Lazily extended table of `C(order, i)`.
///
/// Values are appended under a write lock and never modified afterwards, so
/// a table can be shared between threads and read concurrently.
#[derive(Debug)]
pub struct CoeffTable {
    order: f64,
    coeffs: RwLock<Vec<f64>>,
}

impl CoeffTable {
    pub fn new(order: f64) -> Self {
        CoeffTable {
            order,
            coeffs: RwLock::new(vec![1.0]),
        }
    }

    /// Table for `Δ^(τ)`.
    pub fn forward(tau: FracOrder) -> Self {
        Self::new(tau.value())
    }

    /// Table for `Δ^(−τ)`.
    pub fn inverse(tau: FracOrder) -> Self {
        Self::new(tau.negated())
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn get(&self, i: usize) -> f64 {
        {
            let coeffs = self.coeffs.read().expect("coefficient table poisoned");
            if let Some(&c) = coeffs.get(i) {
                return c;
            }
        }
        self.extend_to(i);
        self.coeffs.read().expect("coefficient table poisoned")[i]
    }

    /// Makes sure indices `0..=i` are published.
    pub fn extend_to(&self, i: usize) {
        let mut coeffs = self.coeffs.write().expect("coefficient table poisoned");
        if coeffs.len() > i {
            return;
        }
        // Amortized growth: at least double the published length.
        let target = i.max(2 * coeffs.len());
        let missing = target + 1 - coeffs.len();
        coeffs.reserve(missing);
        while coeffs.len() <= target {
            let j = coeffs.len();
            let next = step(coeffs[j - 1], self.order, j);
            coeffs.push(next);
        }
    }

    /// Number of published coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.read().expect("coefficient table poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed entry of the difference triangle of this order:
    /// `(−1)^{n−k} C(order, n−k)` for `k ≤ n`, else 0.
    pub fn triangle_entry(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return 0.0;
        }
        alternate(n - k, self.get(n - k))
    }
}

impl Clone for CoeffTable {
    fn clone(&self) -> Self {
        CoeffTable {
            order: self.order,
            coeffs: RwLock::new(self.coeffs.read().expect("coefficient table poisoned").clone()),
        }
    }
}

#[inline]
pub(crate) fn alternate(d: usize, v: f64) -> f64 {
    if d.is_multiple_of(2) {
        v
    } else {
        -v
    }
}

/// `(Δ^(τ))_{nk}`.
pub fn delta_entry(tau: FracOrder, n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    alternate(n - k, frac_binom(tau.value(), n - k))
}

/// `(Δ^(−τ))_{nk}`.
pub fn delta_inv_entry(tau: FracOrder, n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    alternate(n - k, frac_binom(tau.negated(), n - k))
}

/// Exact `binom(n, k)` for `n ≤ 64`.
pub fn binom_exact(n: usize, k: usize) -> Result<u64, CoeffError> {
    if n > EXACT_PASCAL_MAX_N {
        return Err(CoeffError::ExactRange {
            n,
            max: EXACT_PASCAL_MAX_N,
        });
    }
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient times a small
    // factor, so u128 never overflows for n ≤ 64.
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
    }
    Ok(acc as u64)
}

/// `ln binom(n, k)` through log-Gamma; relative error of the exponentiated
/// value stays below 1e−12 while the result is representable.
fn binom_log_gamma(n: usize, k: usize) -> f64 {
    let ln = libm::lgamma(n as f64 + 1.0)
        - libm::lgamma(k as f64 + 1.0)
        - libm::lgamma((n - k) as f64 + 1.0);
    ln.exp().round()
}

/// `binom(n, k)` as a float: exact-integer path for `n ≤ 64`, log-Gamma
/// beyond.
pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    match binom_exact(n, k) {
        Ok(v) => v as f64,
        Err(_) => binom_log_gamma(n, k),
    }
}

/// `p_{nk} = binom(n, n−k)` for `k ≤ n`.
pub fn pascal_entry(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    binom(n, n - k)
}

/// `(P^{-1})_{nk} = (−1)^{n−k} binom(n, n−k)` for `k ≤ n`.
pub fn pascal_inv_entry(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    alternate(n - k, binom(n, n - k))
}

/// Exact Pascal entry; fails outside the exact-integer range.
pub fn pascal_entry_exact(n: usize, k: usize) -> Result<u64, CoeffError> {
    if k > n {
        return if n > EXACT_PASCAL_MAX_N {
            Err(CoeffError::ExactRange {
                n,
                max: EXACT_PASCAL_MAX_N,
            })
        } else {
            Ok(0)
        };
    }
    binom_exact(n, n - k)
}

/// Exact signed `P^{-1}` entry.
pub fn pascal_inv_entry_exact(n: usize, k: usize) -> Result<i128, CoeffError> {
    let v = pascal_entry_exact(n, k)? as i128;
    Ok(if k <= n && (n - k) % 2 == 1 { -v } else { v })
}
