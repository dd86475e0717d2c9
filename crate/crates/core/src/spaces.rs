//! Norms of `ℓp(P̂)` and the finite-horizon checks built on them: isometry,
//! the parallelogram law, the non-absoluteness witness and the inclusion
//! bound `‖P̂x‖ ≤ B_N ‖x‖`.
//!
//! Norms of `P̂x` are always taken over an explicit horizon `N`; a finitely
//! supported `x` generally has an infinitely supported transform, so the
//! horizon is reported alongside every value.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::coeffs::FracOrder;
use crate::error::{SpaceError, TransformError};
use crate::exact::{ExactTransform, ExactVector};
use crate::operator::TriangularOperator;
use crate::transform::{FiniteSequence, PhatTransform};

/// An exponent `p ∈ [1, ∞]` together with its conjugate `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PExponent {
    p: f64,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self, SpaceError> {
        if p.is_nan() || p < 1.0 {
            return Err(SpaceError::InvalidExponent(p));
        }
        Ok(PExponent { p })
    }

    pub fn infinity() -> Self {
        PExponent { p: f64::INFINITY }
    }

    pub fn p(self) -> f64 {
        self.p
    }

    pub fn is_infinite(self) -> bool {
        self.p.is_infinite()
    }

    /// `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> PExponent {
        let q = if self.p == 1.0 {
            f64::INFINITY
        } else if self.p.is_infinite() {
            1.0
        } else {
            self.p / (self.p - 1.0)
        };
        PExponent { p: q }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.p)
        }
    }
}

impl FromStr for PExponent {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::infinity()),
            other => {
                let p: f64 = other.parse().map_err(|_| SpaceError::InvalidExponent(f64::NAN))?;
                Self::new(p)
            }
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.p)
        }
    }
}

/// `‖x‖_p` of a prefix.
pub fn p_norm(x: &[f64], p: PExponent) -> f64 {
    let p = p.p();
    if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// A norm of `P̂x` truncated at a horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedNorm {
    pub value: f64,
    pub horizon: usize,
}

/// `‖P̂x‖_p` over the first `horizon` components.
pub fn phat_norm(tau: FracOrder, x: &FiniteSequence, p: PExponent, horizon: usize) -> TruncatedNorm {
    phat_norm_with(&PhatTransform::new(tau, horizon), x, p)
}

pub fn phat_norm_with(t: &PhatTransform, x: &FiniteSequence, p: PExponent) -> TruncatedNorm {
    TruncatedNorm {
        value: p_norm(&t.apply(x), p),
        horizon: t.horizon(),
    }
}

/// Both sides of the parallelogram law for the witnesses `u, v` with
/// `P̂u = (1, 1, 0, …)` and `P̂v = (1, −1, 0, …)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParallelogramSides {
    pub lhs: f64,
    pub rhs: f64,
}

impl ParallelogramSides {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn parallelogram_gap(
    tau: FracOrder,
    p: PExponent,
    horizon: usize,
) -> Result<ParallelogramSides, SpaceError> {
    if horizon < 2 {
        return Err(TransformError::HorizonTooSmall { got: horizon, min: 2 }.into());
    }
    let t = PhatTransform::new(tau, horizon);
    let witness = |second: f64| FiniteSequence::from_values(&t.inverse_apply(&FiniteSequence::from_values(&[1.0, second])));
    let u = witness(1.0);
    let v = witness(-1.0);
    let norm_sq = |x: &FiniteSequence| phat_norm_with(&t, x, p).value.powi(2);
    let lhs = norm_sq(&u.add(&v)) + norm_sq(&u.add(&v.scale(-1.0)));
    let rhs = 2.0 * (norm_sq(&u) + norm_sq(&v));
    Ok(ParallelogramSides { lhs, rhs })
}

/// [`parallelogram_gap`] with the witnesses and their transforms held in
/// exact rational arithmetic; only the final norms are rounded.
///
/// Past `N ≈ 24` the float witnesses lose digits to cancellation (`P̂u` is
/// a difference of entries of size `2^n`), so this is the variant to use
/// at larger horizons.
pub fn parallelogram_gap_exact(
    order: &BigRational,
    p: PExponent,
    horizon: usize,
) -> Result<ParallelogramSides, SpaceError> {
    if horizon < 2 {
        return Err(TransformError::HorizonTooSmall { got: horizon, min: 2 }.into());
    }
    let t = ExactTransform::new(order, horizon);
    let witness = |second: f64| t.inverse_apply(&ExactVector::from_f64(&[1.0, second]).expect("finite"));
    let u = witness(1.0);
    let v = witness(-1.0);
    let norm_sq = |x: &ExactVector| p_norm(&t.apply(x).to_f64(), p).powi(2);
    let lhs = norm_sq(&u.add(&v)) + norm_sq(&u.sub(&v));
    let rhs = 2.0 * (norm_sq(&u) + norm_sq(&v));
    Ok(ParallelogramSides { lhs, rhs })
}

/// `|‖w‖ − ‖|w|‖|` in `ℓp(P̂)` at the given horizon.
pub fn absoluteness_gap(tau: FracOrder, p: PExponent, w: &FiniteSequence, horizon: usize) -> f64 {
    let t = PhatTransform::new(tau, horizon);
    (phat_norm_with(&t, w, p).value - phat_norm_with(&t, &w.abs(), p).value).abs()
}

/// The default witness `(1, −1, 0, …)`.
pub fn default_absoluteness_witness() -> FiniteSequence {
    FiniteSequence::from_values(&[1.0, -1.0])
}

/// Row-absolute-sum bound `B_N` with `‖P̂x‖_p ≤ B_N ‖x‖_p` for every `x`
/// supported in `[0, N)`, norms taken over the horizon `N`.
///
/// `B_N = (Σ_{n<N} r_n^p)^{1/p}` with `r_n = Σ_k |P̂(n,k)|`, or `max_n r_n`
/// for `p = ∞`.
pub fn inclusion_bound(tau: FracOrder, p: PExponent, horizon: usize) -> f64 {
    let phat = TriangularOperator::phat(tau);
    let row_sums: Vec<f64> = (0..horizon)
        .map(|n| phat.row(n).iter().map(|v| v.abs()).sum())
        .collect();
    p_norm(&row_sums, p)
}
