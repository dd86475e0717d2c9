//! Dual-space diagnostics.
//!
//! The multiplier `a` enters through two triangles built from `P̂^{-1}`:
//!
//! * `Ũ` with `ũ_{nk} = a_n · P̂^{-1}(n, k)`, so that `a_n x_n = (Ũy)_n`;
//! * `Ṽ` with `ṽ_{nk} = Σ_{j=k}^{n} P̂^{-1}(j, k) · a_j`, so that
//!   `Σ_{k≤n} a_k x_k = (Ṽy)_n`,
//!
//! where `x = P̂^{-1}y`. Membership in the dual sets is an infinite-horizon
//! question, so every condition is reported as a sequence of truncated
//! statistics `S_1, …, S_N` plus a stabilization hint, never as a boolean.

use serde::Serialize;

use crate::coeffs::FracOrder;
use crate::error::DualError;
use crate::operator::{DenseTriangle, TriangularOperator};
use crate::spaces::PExponent;
use crate::transform::FiniteSequence;

/// Columns enumerated by [`stat_subset_sup_l1`] are `0..=m` with `m` at most
/// this value.
pub const SUBSET_BUDGET: usize = 16;

/// Relative tolerance for declaring a statistic stabilized.
pub const STABILIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    SubsetSupL1,
    RowQSumSup,
    ColumnLimitOscillation,
    RowAbsSumSup,
    LimitDeviationSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictHint {
    Stabilized,
    Growing,
    Inconclusive,
}

/// Truncated statistics `S_1, …, S_N` for one condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub statistic: Statistic,
    pub horizon: usize,
    pub values: Vec<f64>,
    pub verdict_hint: VerdictHint,
}

impl ConditionReport {
    pub fn new(statistic: Statistic, values: Vec<f64>) -> Self {
        let verdict_hint = verdict(&values);
        ConditionReport {
            statistic,
            horizon: values.len(),
            values,
            verdict_hint,
        }
    }

    pub fn last(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= STABILIZATION_TOL * a.abs().max(b.abs())
}

/// Looks at the last quarter of the sequence: constant means stabilized,
/// nondecreasing with a net rise means growing.
fn verdict(values: &[f64]) -> VerdictHint {
    let Some(&last) = values.last() else {
        return VerdictHint::Inconclusive;
    };
    let tail = &values[values.len() - values.len().div_ceil(4).max(1)..];
    if tail.iter().all(|&v| close(v, last)) {
        VerdictHint::Stabilized
    } else if tail.windows(2).all(|w| w[0] <= w[1]) && tail[0] < last {
        VerdictHint::Growing
    } else {
        VerdictHint::Inconclusive
    }
}

fn check_horizon(a: &DenseTriangle, horizon: usize) -> Result<(), DualError> {
    if horizon > a.size() {
        return Err(DualError::HorizonBeyondMatrix {
            got: horizon,
            size: a.size(),
        });
    }
    Ok(())
}

/// `Ũ` on the `N × N` truncation.
pub fn alpha_matrix(tau: FracOrder, a: &FiniteSequence, horizon: usize) -> DenseTriangle {
    alpha_matrix_with(&TriangularOperator::phat_inverse(tau).truncate(horizon), a)
}

pub fn alpha_matrix_with(inverse: &DenseTriangle, a: &FiniteSequence) -> DenseTriangle {
    DenseTriangle::from_fn(inverse.size(), |n, k| a.get(n) * inverse.get(n, k))
}

/// `Ṽ` on the `N × N` truncation.
pub fn beta_matrix(tau: FracOrder, a: &FiniteSequence, horizon: usize) -> DenseTriangle {
    beta_matrix_with(&TriangularOperator::phat_inverse(tau).truncate(horizon), a)
}

pub fn beta_matrix_with(inverse: &DenseTriangle, a: &FiniteSequence) -> DenseTriangle {
    let size = inverse.size();
    let mut v = DenseTriangle::zeros(size);
    for n in 0..size {
        let an = a.get(n);
        for k in 0..=n {
            let above = if k < n { v.get(n - 1, k) } else { 0.0 };
            v.set(n, k, above + inverse.get(n, k) * an);
        }
    }
    v
}

/// Worst deviations in the two-path identities `a_n x_n = (Ũy)_n` and
/// `Σ_{k≤n} a_k x_k = (Ṽy)_n` with `x = P̂^{-1}y`, each relative to the
/// absolute size of the terms being summed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualIdentityResiduals {
    pub alpha: f64,
    pub beta: f64,
}

pub fn dual_identity_residuals(tau: FracOrder, a: &FiniteSequence, y: &[f64]) -> DualIdentityResiduals {
    let horizon = y.len();
    let inverse = TriangularOperator::phat_inverse(tau).truncate(horizon);
    let u = alpha_matrix_with(&inverse, a);
    let v = beta_matrix_with(&inverse, a);
    let x = inverse.mul_vec(y);
    let (uy, vy) = (u.mul_vec(y), v.mul_vec(y));
    let scale = |m: &DenseTriangle, n: usize| -> f64 { m.row(n).iter().zip(y).map(|(c, t)| (c * t).abs()).sum() };
    let rel = |dev: f64, scale: f64| if scale == 0.0 { dev } else { dev / scale };

    let mut out = DualIdentityResiduals { alpha: 0.0, beta: 0.0 };
    let (mut partial, mut partial_abs) = (0.0, 0.0);
    for n in 0..horizon {
        let ax = a.get(n) * x[n];
        let s = scale(&u, n).max(ax.abs());
        out.alpha = out.alpha.max(rel((ax - uy[n]).abs(), s));
        partial += ax;
        partial_abs += ax.abs();
        let s = scale(&v, n).max(partial_abs);
        out.beta = out.beta.max(rel((partial - vy[n]).abs(), s));
    }
    out
}

/// `sup_K Σ_{n<M} |Σ_{k∈K} A(n,k)|` over all `K ⊆ {0, …, m}`, for
/// `M = 1..=N`, by exhaustive enumeration.
pub fn stat_subset_sup_l1(a: &DenseTriangle, m: usize, horizon: usize) -> Result<ConditionReport, DualError> {
    if m > SUBSET_BUDGET {
        return Err(DualError::SubsetBudget {
            columns: m + 1,
            max: SUBSET_BUDGET + 1,
        });
    }
    check_horizon(a, horizon)?;
    let subsets = 1usize << (m + 1);
    let mut sums = vec![0.0f64; subsets];
    let mut acc = vec![0.0f64; subsets];
    let mut values = Vec::with_capacity(horizon);
    let mut best: f64 = 0.0;
    for n in 0..horizon {
        for set in 1..subsets {
            // Drop the lowest column; column sums are built highest-first.
            let low = set.trailing_zeros() as usize;
            sums[set] = sums[set & (set - 1)] + a.get(n, low);
            acc[set] += sums[set].abs();
            best = best.max(acc[set]);
        }
        values.push(best);
    }
    Ok(ConditionReport::new(Statistic::SubsetSupL1, values))
}

/// Bracketing bounds for the subset statistic at horizon `N`:
/// `max_k Σ_n |A(n,k)|` and `Σ_n Σ_{k≤m} |A(n,k)|`, accumulated in the same
/// order as the enumeration so the bracket holds without rounding slack.
pub fn subset_sup_bounds(a: &DenseTriangle, m: usize, horizon: usize) -> (f64, f64) {
    let mut columns = vec![0.0f64; m + 1];
    let mut total = 0.0f64;
    for n in 0..horizon {
        let mut row = 0.0f64;
        for k in (0..=m).rev() {
            let v = a.get(n, k);
            columns[k] += v.abs();
            row += v.abs();
        }
        total += row;
    }
    (columns.iter().fold(0.0, |x: f64, &y| x.max(y)), total)
}

fn row_qsum(row: &[f64], q: PExponent) -> f64 {
    if q.is_infinite() {
        row.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if q.p() == 1.0 {
        row.iter().map(|v| v.abs()).sum()
    } else {
        row.iter().map(|v| v.abs().powf(q.p())).sum()
    }
}

fn running_sup(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut best: f64 = 0.0;
    values
        .map(|v| {
            best = best.max(v);
            best
        })
        .collect()
}

/// `sup_{n<M} Σ_k |A(n,k)|^q` (row-sup of `|A(n,k)|` for `q = ∞`).
pub fn stat_row_qsum_sup(a: &DenseTriangle, q: PExponent, horizon: usize) -> Result<ConditionReport, DualError> {
    check_horizon(a, horizon)?;
    let statistic = if q.p() == 1.0 {
        Statistic::RowAbsSumSup
    } else {
        Statistic::RowQSumSup
    };
    let values = running_sup((0..horizon).map(|n| row_qsum(a.row(n), q)));
    Ok(ConditionReport::new(statistic, values))
}

/// Column-limit diagnostics on the last quarter of rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnLimitReport {
    pub horizon: usize,
    /// First row of the observation window.
    pub window_start: usize,
    /// `max − min` of column `k` over the window, for `k < window_start`.
    pub oscillation: Vec<f64>,
    /// `Σ_{k<window_start} |A(n,k) − L_k|` for each row, with `L_k` the
    /// value in the final row.
    pub deviation: ConditionReport,
}

impl ColumnLimitReport {
    pub fn max_oscillation(&self) -> f64 {
        self.oscillation.iter().fold(0.0, |m, &v| m.max(v))
    }
}

pub fn stat_column_limits(a: &DenseTriangle, horizon: usize) -> Result<ColumnLimitReport, DualError> {
    if horizon < 8 {
        return Err(DualError::HorizonTooSmall { got: horizon, min: 8 });
    }
    check_horizon(a, horizon)?;
    let window_start = horizon - horizon / 4;
    let oscillation = (0..window_start)
        .map(|k| {
            let (lo, hi) = (window_start..horizon)
                .map(|n| a.get(n, k))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            hi - lo
        })
        .collect();
    let limits: Vec<f64> = (0..window_start).map(|k| a.get(horizon - 1, k)).collect();
    let deviation = (0..horizon)
        .map(|n| limits.iter().enumerate().map(|(k, l)| (a.get(n, k) - l).abs()).sum())
        .collect();
    Ok(ColumnLimitReport {
        horizon,
        window_start,
        oscillation,
        deviation: ConditionReport::new(Statistic::LimitDeviationSum, deviation),
    })
}

/// One dual-set condition with its statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetReport {
    pub set: &'static str,
    pub condition: &'static str,
    /// Computed for coverage only; not part of any dual characterization.
    pub informational: bool,
    pub report: ConditionReport,
}

/// Truncated statistics for the sets `D̃1 … D̃4` of one multiplier `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualReport {
    pub tau: f64,
    pub p: PExponent,
    pub q: PExponent,
    pub horizon: usize,
    pub d1: SetReport,
    pub d2: SetReport,
    pub d3: SetReport,
    pub d4: SetReport,
}

pub fn dual_membership_report(tau: FracOrder, a: &FiniteSequence, p: PExponent, horizon: usize) -> DualReport {
    let inverse = TriangularOperator::phat_inverse(tau).truncate(horizon);
    dual_membership_report_with(&inverse, tau, a, p)
}

/// [`dual_membership_report`] on a precomputed `P̂^{-1}` truncation; the
/// horizon is its size.
pub fn dual_membership_report_with(
    inverse: &DenseTriangle,
    tau: FracOrder,
    a: &FiniteSequence,
    p: PExponent,
) -> DualReport {
    let horizon = inverse.size();
    let u = alpha_matrix_with(inverse, a);
    let v = beta_matrix_with(inverse, a);
    let q = p.conjugate();

    let d1 = running_sup((0..horizon).map(|n| row_qsum(u.row(n), q)));
    // Diagonal-free rows of Ṽ: the bracket entries ṽ_{nk}, k < n.
    let d2 = running_sup((0..horizon).map(|n| row_qsum(&v.row(n)[..n], q)));
    let d3 = running_sup((0..horizon).map(|n| row_qsum(v.row(n), PExponent::infinity())));
    let d4 = (0..horizon)
        .map(|n| if n == 0 { 0.0 } else { v.get(n, n - 1).abs() })
        .collect();

    DualReport {
        tau: tau.value(),
        p,
        q,
        horizon,
        d1: SetReport {
            set: "D1",
            condition: "sup_n sum_k |u_nk|^q",
            informational: false,
            report: ConditionReport::new(Statistic::RowQSumSup, d1),
        },
        d2: SetReport {
            set: "D2",
            condition: "sup_n sum_{k<n} |v_nk|^q",
            informational: false,
            report: ConditionReport::new(Statistic::RowQSumSup, d2),
        },
        d3: SetReport {
            set: "D3",
            condition: "sup_n max_k |v_nk|",
            informational: false,
            report: ConditionReport::new(Statistic::RowQSumSup, d3),
        },
        d4: SetReport {
            set: "D4",
            condition: "|v_{n,n-1}| -> 0",
            informational: true,
            report: ConditionReport::new(Statistic::LimitDeviationSum, d4),
        },
    }
}

impl DualReport {
    pub fn sets(&self) -> [&SetReport; 4] {
        [&self.d1, &self.d2, &self.d3, &self.d4]
    }

    /// Sets relevant to the α-dual.
    pub fn alpha_sets(&self) -> Vec<SetReport> {
        vec![self.d1.clone()]
    }

    /// Sets relevant to the β-dual (`D̃2 ∩ D̃3`, plus `D̃4` flagged
    /// informational).
    pub fn beta_sets(&self) -> Vec<SetReport> {
        vec![self.d2.clone(), self.d3.clone(), self.d4.clone()]
    }

    /// The γ-dual coincides with the β-dual.
    pub fn gamma_sets(&self) -> Vec<SetReport> {
        [&self.d2, &self.d3, &self.d4].into_iter().cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_path_identities() {
        let t = FracOrder::new(0.5).unwrap();
        let a = FiniteSequence::from_values(&[0.3, -1.0, 0.0, 2.5, 0.7]);
        let y: Vec<f64> = (0..24).map(|i| ((i * 37 % 11) as f64 - 5.0) / 5.0).collect();
        let r = dual_identity_residuals(t, &a, &y);
        assert!(r.alpha <= 1e-13 && r.beta <= 1e-13, "{r:?}");
        let zero = dual_identity_residuals(t, &FiniteSequence::new(), &y);
        assert_eq!((zero.alpha, zero.beta), (0.0, 0.0));
    }

    fn identity(n: usize) -> DenseTriangle {
        DenseTriangle::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    fn tau(t: f64) -> FracOrder {
        FracOrder::new(t).unwrap()
    }

    #[test]
    fn verdicts() {
        assert_eq!(verdict(&[1.0, 2.0, 3.0, 3.0]), VerdictHint::Stabilized);
        assert_eq!(verdict(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]), VerdictHint::Growing);
        assert_eq!(verdict(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 7.0]), VerdictHint::Inconclusive);
        assert_eq!(verdict(&[]), VerdictHint::Inconclusive);
        assert_eq!(verdict(&[0.0]), VerdictHint::Stabilized);
    }

    #[test]
    fn alpha_examples() {
        let t = tau(0.5);
        let u = alpha_matrix(t, &FiniteSequence::unit(0), 6);
        assert_eq!(u.row(0), &[1.0]);
        for n in 1..6 {
            assert!(u.row(n).iter().all(|&v| v == 0.0));
        }
        let z = alpha_matrix(t, &FiniteSequence::new(), 6);
        assert_eq!(z, DenseTriangle::zeros(6));
    }

    #[test]
    fn beta_examples() {
        let t = tau(0.5);
        let a = FiniteSequence::from_values(&[0.3, -1.0, 2.0, 0.0, 5.0]);
        let v = beta_matrix(t, &a, 8);
        for n in 0..8 {
            assert_eq!(v.get(n, n), a.get(n));
        }
        let v0 = beta_matrix(t, &FiniteSequence::unit(0), 8);
        for n in 0..8 {
            assert_eq!(v0.get(n, 0), 1.0);
        }
    }

    #[test]
    fn subset_examples() {
        let r = stat_subset_sup_l1(&identity(10), 3, 10).unwrap();
        assert_eq!(r.last(), 4.0);
        let r = stat_subset_sup_l1(&identity(3), 5, 3).unwrap();
        assert_eq!(r.last(), 3.0);
        let r = stat_subset_sup_l1(&DenseTriangle::zeros(6), 4, 6).unwrap();
        assert!(r.values.iter().all(|&v| v == 0.0));
        let u = alpha_matrix(tau(1.5), &FiniteSequence::unit(0), 12);
        let r = stat_subset_sup_l1(&u, 5, 12).unwrap();
        assert_eq!(r.last(), 1.0);
        assert_eq!(r.verdict_hint, VerdictHint::Stabilized);
        assert!(matches!(
            stat_subset_sup_l1(&identity(4), 17, 4),
            Err(DualError::SubsetBudget { .. })
        ));
        assert!(stat_subset_sup_l1(&identity(4), 2, 5).is_err());
    }

    #[test]
    fn row_qsum_examples() {
        let q2 = PExponent::new(2.0).unwrap();
        assert_eq!(stat_row_qsum_sup(&identity(5), q2, 5).unwrap().last(), 1.0);
        assert_eq!(
            stat_row_qsum_sup(&identity(5), PExponent::infinity(), 5).unwrap().last(),
            1.0
        );
        let p = TriangularOperator::pascal().truncate(12);
        let r = stat_row_qsum_sup(&p, PExponent::new(1.0).unwrap(), 12).unwrap();
        assert_eq!(r.last(), 2f64.powi(11));
        assert_eq!(r.statistic, Statistic::RowAbsSumSup);
        assert_eq!(r.verdict_hint, VerdictHint::Growing);
        assert_eq!(stat_row_qsum_sup(&DenseTriangle::zeros(4), q2, 4).unwrap().last(), 0.0);
    }

    #[test]
    fn column_limit_examples() {
        let r = stat_column_limits(&identity(16), 16).unwrap();
        assert_eq!(r.window_start, 12);
        assert_eq!(r.max_oscillation(), 0.0);
        assert_eq!(&r.deviation.values[..12], &[1.0; 12]);
        assert_eq!(&r.deviation.values[12..], &[0.0; 4]);
        assert_eq!(r.deviation.verdict_hint, VerdictHint::Stabilized);

        let consts = [2.0, -1.0, 0.5, 3.0, 1.0, 4.0, -2.0, 0.25, 7.0, 1.5];
        let c = DenseTriangle::from_fn(10, |_, k| consts[k]);
        let r = stat_column_limits(&c, 10).unwrap();
        assert_eq!(r.max_oscillation(), 0.0);
        assert_eq!(r.deviation.last(), 0.0);

        let r = stat_column_limits(&DenseTriangle::zeros(8), 8).unwrap();
        assert!(r.oscillation.iter().chain(&r.deviation.values).all(|&v| v == 0.0));
        assert!(stat_column_limits(&identity(7), 7).is_err());
    }

    #[test]
    fn finitely_supported_multipliers_stabilize() {
        let p2 = PExponent::new(2.0).unwrap();
        for j in [0, 3, 9] {
            let r = dual_membership_report(tau(0.5), &FiniteSequence::unit(j), p2, 32);
            for s in r.sets() {
                assert_eq!(s.report.verdict_hint, VerdictHint::Stabilized, "j={j} {}", s.set);
            }
        }
        let r = dual_membership_report(tau(0.5), &FiniteSequence::new(), p2, 16);
        for s in r.sets() {
            assert!(s.report.values.iter().all(|&v| v == 0.0));
            assert_eq!(s.report.verdict_hint, VerdictHint::Stabilized);
        }
    }

    #[test]
    fn constant_multiplier_grows() {
        let ones = FiniteSequence::from_values(&[1.0; 64]);
        let r = dual_membership_report(tau(0.5), &ones, PExponent::new(2.0).unwrap(), 64);
        assert_eq!(r.d1.report.verdict_hint, VerdictHint::Growing);
    }
}
