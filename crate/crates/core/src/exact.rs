//! Exact arithmetic paths.
//!
//! For `τ = m ∈ ℕ` every entry of `Δ^(±m)`, `P`, `P^{-1}`, `P̂` and `P̂^{-1}`
//! is an integer, so truncations can be formed and multiplied without any
//! rounding ([`ExactTriangle`]).
//!
//! For every other rational order (every finite `f64` is one) the transforms
//! are evaluated on [`ExactVector`]s and rounded once at the end
//! ([`ExactTransform`]). Entries of `P̂` and `P̂^{-1}` grow like `2^n`, so the
//! float round trip `P̂^{-1}(P̂x)` loses about `2n` bits at row `n`; the exact
//! path has no such loss.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coeffs::FracOrder;
use crate::operator::DenseTriangle;

/// Row-packed lower-triangular block of big integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTriangle {
    size: usize,
    values: Vec<BigInt>,
}

fn offset(n: usize) -> usize {
    n * (n + 1) / 2
}

impl ExactTriangle {
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut values = Vec::with_capacity(offset(size));
        for n in 0..size {
            for k in 0..=n {
                values.push(f(n, k));
            }
        }
        ExactTriangle { size, values }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, n: usize, k: usize) -> BigInt {
        if k > n || n >= self.size {
            BigInt::zero()
        } else {
            self.values[offset(n) + k].clone()
        }
    }

    pub fn row(&self, n: usize) -> &[BigInt] {
        &self.values[offset(n)..offset(n + 1)]
    }

    pub fn matmul(&self, other: &ExactTriangle) -> ExactTriangle {
        let size = self.size.min(other.size);
        ExactTriangle::from_fn(size, |n, k| {
            (k..=n).map(|j| &self.values[offset(n) + j] * &other.values[offset(j) + k]).sum()
        })
    }

    /// `max |A(n,k) − δ_{nk}|`.
    pub fn identity_deviation(&self) -> BigInt {
        let mut worst = BigInt::zero();
        for n in 0..self.size {
            for k in 0..=n {
                let mut d = self.values[offset(n) + k].clone();
                if n == k {
                    d -= 1;
                }
                let d = d.abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.size)
            .map(|n| self.row(n).iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }
}

/// `C(order, 0..=len)` for an integer order, by exact division.
fn binomial_row(order: i64, len: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(len + 1);
    let mut c = BigInt::one();
    out.push(c.clone());
    for i in 1..=len {
        c = c * BigInt::from(order - i as i64 + 1) / BigInt::from(i as u64);
        out.push(c.clone());
    }
    out
}

fn signed(d: usize, v: &BigInt) -> BigInt {
    if d.is_multiple_of(2) {
        v.clone()
    } else {
        -v
    }
}

pub fn pascal(size: usize) -> ExactTriangle {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(size);
    for n in 0..size {
        let mut row = vec![BigInt::one(); n + 1];
        for k in 1..n {
            row[k] = &rows[n - 1][k - 1] + &rows[n - 1][k];
        }
        rows.push(row);
    }
    ExactTriangle::from_fn(size, |n, k| rows[n][k].clone())
}

pub fn pascal_inverse(size: usize) -> ExactTriangle {
    let p = pascal(size);
    ExactTriangle::from_fn(size, |n, k| signed(n - k, &p.get(n, k)))
}

/// `Δ^(order)` for an integer order of either sign.
pub fn difference(order: i64, size: usize) -> ExactTriangle {
    let c = binomial_row(order, size.saturating_sub(1));
    ExactTriangle::from_fn(size, |n, k| signed(n - k, &c[n - k]))
}

pub fn phat(m: u32, size: usize) -> ExactTriangle {
    pascal(size).matmul(&difference(i64::from(m), size))
}

pub fn phat_inverse(m: u32, size: usize) -> ExactTriangle {
    difference(-i64::from(m), size).matmul(&pascal_inverse(size))
}

/// Exact `max |P̂·P̂^{-1} − I|` on the `size × size` truncation.
pub fn identity_residual(m: u32, size: usize) -> BigInt {
    phat(m, size).matmul(&phat_inverse(m, size)).identity_deviation()
}

/// A rational vector stored as integer numerators over one shared positive
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactVector {
    num: Vec<BigInt>,
    den: BigInt,
}

impl ExactVector {
    pub fn zeros(len: usize) -> Self {
        ExactVector {
            num: vec![BigInt::zero(); len],
            den: BigInt::one(),
        }
    }

    pub fn unit(k: usize, len: usize) -> Self {
        let mut v = Self::zeros(len);
        if k < len {
            v.num[k] = BigInt::one();
        }
        v
    }

    /// Exact image of a float vector; `None` if any value is not finite.
    pub fn from_f64(values: &[f64]) -> Option<Self> {
        let ratios = values
            .iter()
            .map(|&v| BigRational::from_float(v))
            .collect::<Option<Vec<_>>>()?;
        Some(Self::from_rationals(&ratios))
    }

    pub fn from_rationals(values: &[BigRational]) -> Self {
        let den = values
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let num = values
            .iter()
            .map(|v| v.numer() * (&den / v.denom()))
            .collect();
        let mut out = ExactVector { num, den };
        out.normalize();
        out
    }

    pub fn len(&self) -> usize {
        self.num.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num.is_empty()
    }

    pub fn get(&self, i: usize) -> BigRational {
        BigRational::new(self.num[i].clone(), self.den.clone())
    }

    /// Each component correctly rounded to the nearest `f64`.
    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.get(i).to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Keeps the first `len` components and zeros the rest.
    pub fn truncated(&self, len: usize) -> Self {
        let mut out = self.clone();
        for n in out.num.iter_mut().skip(len) {
            *n = BigInt::zero();
        }
        out.normalize();
        out
    }

    pub fn add(&self, other: &ExactVector) -> ExactVector {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &ExactVector) -> ExactVector {
        self.combine(other, true)
    }

    fn combine(&self, other: &ExactVector, negate: bool) -> ExactVector {
        let den = self.den.lcm(&other.den);
        let (ls, rs) = (&den / &self.den, &den / &other.den);
        let len = self.len().max(other.len());
        let zero = BigInt::zero();
        let num = (0..len)
            .map(|i| {
                let l = self.num.get(i).unwrap_or(&zero) * &ls;
                let r = other.num.get(i).unwrap_or(&zero) * &rs;
                if negate {
                    l - r
                } else {
                    l + r
                }
            })
            .collect();
        let mut out = ExactVector { num, den };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        let g = self
            .num
            .iter()
            .fold(self.den.clone(), |g, n| if n.is_zero() { g } else { g.gcd(n) });
        if !g.is_one() && !g.is_zero() {
            for n in &mut self.num {
                *n /= &g;
            }
            self.den /= &g;
        }
    }
}

/// `Δ^(r)` for a rational order `r = a/b`, with every coefficient
/// `C(r, i), i < N` written as `coeffs[i] / den`.
#[derive(Debug, Clone)]
struct ExactDifference {
    coeffs: Vec<BigInt>,
    den: BigInt,
}

impl ExactDifference {
    fn new(order: &BigRational, horizon: usize) -> Self {
        let a = order.numer();
        let b = order.denom();
        let last = horizon.saturating_sub(1);
        // g_i = Π_{j<i} (a − j·b), so C(r, i) = g_i / (i! · b^i).
        let mut g = Vec::with_capacity(horizon);
        let mut acc = BigInt::one();
        for i in 0..horizon {
            if i > 0 {
                acc *= a - b * BigInt::from(i - 1);
            }
            g.push(acc.clone());
        }
        // Scale to the common denominator (N−1)! · b^{N−1}.
        let mut coeffs = vec![BigInt::zero(); horizon];
        let mut tail = BigInt::one(); // (N−1)!/i! · b^{N−1−i}
        for i in (0..horizon).rev() {
            coeffs[i] = &g[i] * &tail;
            tail *= BigInt::from(i.max(1)) * b;
            if i == 0 {
                break;
            }
        }
        let mut den = BigInt::one();
        for j in 1..=last {
            den *= BigInt::from(j) * b;
        }
        ExactDifference { coeffs, den }
    }

    fn apply(&self, v: &ExactVector) -> ExactVector {
        let len = v.len().min(self.coeffs.len());
        let num = (0..len)
            .map(|n| {
                let mut s = BigInt::zero();
                for i in 0..=n {
                    let x = &v.num[n - i];
                    if x.is_zero() || self.coeffs[i].is_zero() {
                        continue;
                    }
                    let t = &self.coeffs[i] * x;
                    if i % 2 == 0 {
                        s += t;
                    } else {
                        s -= t;
                    }
                }
                s
            })
            .collect();
        let mut out = ExactVector {
            num,
            den: &v.den * &self.den,
        };
        out.normalize();
        out
    }
}

/// Exact `P̂` and `P̂^{-1}` transforms for one rational order and horizon.
#[derive(Debug, Clone)]
pub struct ExactTransform {
    order: BigRational,
    horizon: usize,
    forward: ExactDifference,
    inverse: ExactDifference,
    pascal: ExactTriangle,
}

impl ExactTransform {
    pub fn new(order: &BigRational, horizon: usize) -> Self {
        ExactTransform {
            order: order.clone(),
            horizon,
            forward: ExactDifference::new(order, horizon),
            inverse: ExactDifference::new(&-order.clone(), horizon),
            pascal: pascal(horizon),
        }
    }

    /// Uses the exact binary value of the order.
    pub fn from_order(tau: FracOrder, horizon: usize) -> Self {
        let order = BigRational::from_float(tau.value()).expect("FracOrder is finite");
        Self::new(&order, horizon)
    }

    pub fn order(&self) -> &BigRational {
        &self.order
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    fn pascal_apply(&self, v: &ExactVector, signed_inverse: bool) -> ExactVector {
        let len = v.len().min(self.horizon);
        let num = (0..len)
            .map(|n| {
                let row = self.pascal.row(n);
                let mut s = BigInt::zero();
                for (k, x) in v.num.iter().enumerate().take(n + 1) {
                    if x.is_zero() {
                        continue;
                    }
                    let t = &row[k] * x;
                    if signed_inverse && (n - k) % 2 == 1 {
                        s -= t;
                    } else {
                        s += t;
                    }
                }
                s
            })
            .collect();
        ExactVector {
            num,
            den: v.den.clone(),
        }
    }

    fn fit(&self, v: &ExactVector) -> ExactVector {
        let mut out = v.clone();
        out.num.resize(self.horizon, BigInt::zero());
        out
    }

    /// `P̂x = P(Δ^(τ)x)` on the first `N` components.
    pub fn apply(&self, x: &ExactVector) -> ExactVector {
        self.pascal_apply(&self.forward.apply(&self.fit(x)), false)
    }

    /// `P̂^{-1}y = Δ^(−τ)(P^{-1}y)` on the first `N` components.
    pub fn inverse_apply(&self, y: &ExactVector) -> ExactVector {
        self.inverse.apply(&self.pascal_apply(&self.fit(y), true))
    }

    /// `Σ_{k≤K} μ_k b^(k)` with `μ = P̂x`. Agrees with `x` on `0..=K`.
    pub fn reconstruct(&self, x: &ExactVector, terms: usize) -> ExactVector {
        self.inverse_apply(&self.apply(x).truncated(terms + 1))
    }

    pub fn apply_f64(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(self.apply(&ExactVector::from_f64(x)?).to_f64())
    }

    pub fn inverse_apply_f64(&self, y: &[f64]) -> Option<Vec<f64>> {
        Some(self.inverse_apply(&ExactVector::from_f64(y)?).to_f64())
    }

    /// `P̂` truncation with every entry correctly rounded.
    pub fn forward_triangle(&self) -> DenseTriangle {
        self.columns(|e| self.apply(e))
    }

    /// `P̂^{-1}` truncation with every entry correctly rounded.
    pub fn inverse_triangle(&self) -> DenseTriangle {
        self.columns(|e| self.inverse_apply(e))
    }

    /// `Δ^(τ)` (or `Δ^(−τ)`) truncation, correctly rounded.
    pub fn difference_triangle(&self, inverse: bool) -> DenseTriangle {
        let d = if inverse { &self.inverse } else { &self.forward };
        self.columns(|e| d.apply(e))
    }

    fn columns(&self, f: impl Fn(&ExactVector) -> ExactVector) -> DenseTriangle {
        let mut out = DenseTriangle::zeros(self.horizon);
        for k in 0..self.horizon {
            let col = f(&ExactVector::unit(k, self.horizon)).to_f64();
            for (n, v) in col.into_iter().enumerate().skip(k) {
                out.set(n, k, v);
            }
        }
        out
    }
}
