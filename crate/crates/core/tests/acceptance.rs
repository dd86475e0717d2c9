//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Oracles here are computed independently of the library, in
//! exact rational or integer arithmetic where the library uses floats.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use frakpascal::cli::{self, DualKind, RunConfig};
use frakpascal::coeffs::delta_entry;
use frakpascal::duals::{beta_matrix, dual_identity_residuals, dual_membership_report, stat_row_qsum_sup, stat_subset_sup_l1, subset_sup_bounds};
use frakpascal::exact::{self, ExactTransform, ExactVector};
use frakpascal::operator::{identity_residual, phat_inv_entry};
use frakpascal::spaces::{
    absoluteness_gap, default_absoluteness_witness, inclusion_bound, p_norm, parallelogram_gap, parallelogram_gap_exact, phat_norm,
    PExponent,
};
use frakpascal::{DenseTriangle, FiniteSequence, FracOrder, PhatTransform, TriangularOperator};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: [f64; 5] = [0.5, 1.5, -0.5, 1.0, 2.0];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn order(t: f64) -> FracOrder {
    if t == t.trunc() && t >= 0.0 {
        FracOrder::integer(t as u32)
    } else {
        FracOrder::new(t).unwrap()
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, || format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()))
}

fn random_values(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn ratio(t: f64) -> BigRational {
    BigRational::from_float(t).unwrap()
}

/// `P̂(n,k) = Σ_i binom(n,i)·(−1)^{i−k}·C(τ, i−k)` in exact rationals.
fn phat_oracle(tau: &BigRational, size: usize) -> Vec<Vec<BigRational>> {
    let mut c = vec![BigRational::one()];
    for i in 1..size {
        let i_r = BigRational::from_integer(BigInt::from(i));
        let next = &c[i - 1] * (tau - &i_r + BigRational::one()) / i_r;
        c.push(next);
    }
    let mut binom = vec![vec![BigInt::one()]];
    for n in 1..size {
        let prev = &binom[n - 1];
        let row = (0..=n)
            .map(|k| {
                let left = if k > 0 { prev[k - 1].clone() } else { BigInt::zero() };
                left + prev.get(k).cloned().unwrap_or_default()
            })
            .collect();
        binom.push(row);
    }
    (0..size)
        .map(|n| {
            (0..=n)
                .map(|k| {
                    (k..=n).fold(BigRational::zero(), |acc, i| {
                        let term = BigRational::from_integer(binom[n][i].clone()) * &c[i - k];
                        if (i - k) % 2 == 0 {
                            acc + term
                        } else {
                            acc - term
                        }
                    })
                })
                .collect()
        })
        .collect()
}

/// Inverse of a unit-diagonal lower triangle by forward substitution.
fn invert_unit_lower(a: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let size = a.len();
    let mut x: Vec<Vec<BigRational>> = (0..size).map(|n| vec![BigRational::zero(); n + 1]).collect();
    for k in 0..size {
        x[k][k] = BigRational::one();
        for n in k + 1..size {
            let mut s = BigRational::zero();
            for j in k..n {
                s += &a[n][j] * &x[j][k];
            }
            x[n][k] = -s / &a[n][n];
        }
    }
    x
}

fn rel_err(got: f64, want: &BigRational) -> f64 {
    let w = want.to_f64().unwrap();
    let diff = (BigRational::from_float(got).unwrap() - want).abs().to_f64().unwrap();
    if w == 0.0 {
        diff
    } else {
        diff / w.abs()
    }
}

fn integer_binom(n: u64, k: u64) -> i128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i128, |acc, i| acc * i128::from(n - i) / i128::from(i + 1))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for t in GRID {
        let r = identity_residual(order(t), 64);
        ensure(r <= 1e-8, || format!("tau={t}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    for m in [1, 2, 3] {
        let r = exact::identity_residual(m, 64);
        ensure(r.is_zero(), || format!("exact m={m}: deviation {r}"))?;
    }
    within(start.elapsed(), 2.0)?;
    Ok(format!("max float residual {worst:e}; exact integer residual 0"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let n = 32;
    let (mut vs_dense, mut vs_compose) = (0.0f64, 0.0f64);
    for t in GRID {
        let tau = order(t);
        let dense = invert_unit_lower(&phat_oracle(&ratio(t), n));
        let composed = TriangularOperator::delta_inverse(tau).compose(&TriangularOperator::pascal_inverse()).truncate(n);
        for row in 0..n {
            let scale = composed.row(row).iter().fold(0f64, |m, v| m.max(v.abs()));
            for k in 0..=row {
                let closed = phat_inv_entry(tau, row, k);
                let e = rel_err(closed, &dense[row][k]);
                ensure(e <= 1e-10, || format!("tau={t} ({row},{k}): {closed} vs dense, rel {e:e}"))?;
                vs_dense = vs_dense.max(e);
                let c = composed.get(row, k);
                let e = (closed - c).abs() / c.abs().max(f64::MIN_POSITIVE);
                let e = if c == 0.0 { (closed - c).abs() / scale } else { e };
                ensure(e <= 1e-10, || format!("tau={t} ({row},{k}): {closed} vs composed {c}"))?;
                vs_compose = vs_compose.max(e);
            }
        }
    }
    within(start.elapsed(), 1.0)?;
    Ok(format!("max rel vs exact dense inverse {vs_dense:e}, vs composed {vs_compose:e}"))
}

fn criterion_3() -> Outcome {
    let n = 32;
    let zero = TriangularOperator::phat(FracOrder::integer(0)).truncate(n);
    ensure(zero.to_rows() == exact::pascal(n).to_f64_rows(), || "tau=0 float P̂ differs from P".into())?;
    ensure(exact::phat(0, n).matmul(&exact::pascal_inverse(n)).identity_deviation().is_zero(), || {
        "tau=0 exact P̂ differs from P".into()
    })?;
    let mut worst: f64 = 0.0;
    for m in [1u32, 2, 3] {
        let tau = FracOrder::integer(m);
        for row in 0..n {
            for k in 0..=row {
                let want = integer_binom(u64::from(m), (row - k) as u64) * if (row - k) % 2 == 0 { 1 } else { -1 };
                ensure(delta_entry(tau, row, k) == want as f64, || format!("m={m} Δ({row},{k})"))?;
            }
        }
        let phat = TriangularOperator::phat(tau).truncate(n);
        for row in 0..n {
            for k in 0..=row {
                let want: i128 = (k..=row.min(k + m as usize))
                    .map(|i| {
                        let d = integer_binom(u64::from(m), (i - k) as u64) * if (i - k) % 2 == 0 { 1 } else { -1 };
                        integer_binom(row as u64, i as u64) * d
                    })
                    .sum();
                let got = phat.get(row, k);
                let e = if want == 0 { got.abs() } else { (got - want as f64).abs() / (want as f64).abs() };
                ensure(e <= 1e-12, || format!("m={m} ({row},{k}): {got} vs {want}"))?;
                worst = worst.max(e);
            }
        }
    }
    Ok(format!("tau=0 bit-exact; m=1,2,3 max rel {worst:e}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut float_worst: f64 = 0.0;
    for t in [0.5, 1.5, -0.5] {
        let tau = order(t);
        let exact_t = ExactTransform::from_order(tau, 32);
        let float_t = PhatTransform::new(tau, 32);
        for trial in 0..100 {
            let len = rng.gen_range(1..=32);
            let x = random_values(&mut rng, len);
            let scale = x.iter().fold(1f64, |m, v| m.max(v.abs()));
            let back = exact_t.inverse_apply(&exact_t.apply(&ExactVector::from_f64(&x).unwrap())).to_f64();
            let err = back.iter().enumerate().fold(0f64, |m, (i, v)| m.max((v - x.get(i).copied().unwrap_or(0.0)).abs()));
            ensure(err <= 1e-8 * scale, || format!("tau={t} trial {trial}: error {err:e}"))?;
            let xs = FiniteSequence::from_values(&x);
            let fb = float_t.inverse_apply(&FiniteSequence::from_values(&float_t.apply(&xs)));
            float_worst = float_worst.max(fb.iter().enumerate().fold(0f64, |m, (i, v)| m.max((v - xs.get(i)).abs())) / scale);
        }
    }
    within(start.elapsed(), 1.0)?;
    Ok(format!("exact path error 0; float path (informational) {float_worst:e}"))
}

fn criterion_5() -> Outcome {
    let t = PhatTransform::new(FracOrder::new(0.5).unwrap(), 48);
    let mut worst: f64 = 0.0;
    for k in [0, 3, 7, 15] {
        let r = t.schauder_residual(k).map_err(|e| e.to_string())?;
        ensure(r <= 1e-9, || format!("k={k}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut recon: f64 = 0.0;
    for trial in 0..50 {
        let x = FiniteSequence::from_values(&random_values(&mut rng, 17));
        let r = t.reconstruct(&x, 16).map_err(|e| e.to_string())?;
        // Terms k ≤ K touch every index; only 0..=K is fully determined.
        let err = (0..=16).fold(0f64, |m, i| m.max((r[i] - x.get(i)).abs()));
        ensure(err <= 1e-8, || format!("trial {trial}: reconstruction error {err:e}"))?;
        recon = recon.max(err);
    }
    Ok(format!("basis residual {worst:e}; reconstruction error {recon:e}"))
}

fn criterion_6() -> Outcome {
    let mut seen: Vec<(f64, f64)> = Vec::new();
    for p in [1.0, 2.0, 4.0] {
        let pe = PExponent::new(p).unwrap();
        let formula = 4.0 * 2f64.powf(2.0 / p);
        let mut first: Option<(f64, f64)> = None;
        for t in GRID {
            let small = parallelogram_gap(order(t), pe, 16).map_err(|e| e.to_string())?;
            let large = parallelogram_gap_exact(&ratio(t), pe, 32).map_err(|e| e.to_string())?;
            for s in [small, large] {
                ensure(s.lhs == 8.0, || format!("tau={t} p={p}: lhs {}", s.lhs))?;
                ensure((s.rhs - formula).abs() <= 1e-12 * formula, || format!("tau={t} p={p}: rhs {} vs {formula}", s.rhs))?;
                if p == 2.0 {
                    ensure(s.gap() <= 1e-12, || format!("tau={t}: gap {:e}", s.gap()))?;
                } else {
                    ensure(s.gap() >= 2.0, || format!("tau={t} p={p}: gap {}", s.gap()))?;
                }
                let (l0, r0) = *first.get_or_insert((s.lhs, s.rhs));
                ensure((s.lhs - l0).abs() <= 1e-10 && (s.rhs - r0).abs() <= 1e-10, || format!("tau={t} p={p}: depends on tau"))?;
            }
        }
        seen.push(first.unwrap());
    }
    Ok(format!("(lhs, rhs) at p=1,2,4: {seen:?}"))
}

fn criterion_7() -> Outcome {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/oracles.json");
    let data: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let golden: f64 = data["absoluteness"]["gap"].as_str().unwrap().parse().unwrap();
    let gap = absoluteness_gap(FracOrder::new(0.5).unwrap(), PExponent::new(2.0).unwrap(), &default_absoluteness_witness(), 16);
    ensure(gap > 0.1, || format!("gap {gap}"))?;
    ensure((gap - golden).abs() <= 1e-12 * golden, || format!("gap {gap} vs golden {golden}"))?;
    Ok(format!("gap {gap} (golden {golden})"))
}

fn criterion_8() -> Outcome {
    let tau = FracOrder::new(0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tightest: f64 = 0.0;
    for p in [PExponent::new(1.0).unwrap(), PExponent::new(2.0).unwrap(), PExponent::infinity()] {
        let bound = inclusion_bound(tau, p, 32);
        for trial in 0..100 {
            let len = rng.gen_range(1..=32);
            let x = random_values(&mut rng, len);
            let lhs = phat_norm(tau, &FiniteSequence::from_values(&x), p, 32).value;
            let rhs = bound * p_norm(&x, p);
            ensure(lhs <= rhs, || format!("p={p} trial {trial}: {lhs} > {rhs}"))?;
            tightest = tightest.max(lhs / rhs);
        }
    }
    for n in 1..=54 {
        let b = inclusion_bound(FracOrder::integer(0), PExponent::infinity(), n);
        ensure(b == 2f64.powi(n as i32 - 1), || format!("N={n}: bound {b}"))?;
    }
    Ok(format!("max norm ratio {tightest:.3e}; 2^(N-1) exact for N=1..54"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut alpha, mut beta) = (0f64, 0f64);
    for pair in 0..50 {
        let tau = order(GRID[pair % GRID.len()]);
        let a = FiniteSequence::from_values(&random_values(&mut rng, 32));
        let y = random_values(&mut rng, 32);
        let r = dual_identity_residuals(tau, &a, &y);
        ensure(r.alpha <= 1e-10 && r.beta <= 1e-10, || format!("pair {pair}: {r:?}"))?;
        alpha = alpha.max(r.alpha);
        beta = beta.max(r.beta);
        let report = dual_membership_report(tau, &a, PExponent::new(2.0).unwrap(), 32);
        let (g, b) = (serde_json::to_string(&report.gamma_sets()).unwrap(), serde_json::to_string(&report.beta_sets()).unwrap());
        ensure(g == b, || format!("pair {pair}: gamma report differs from beta"))?;
    }
    let input = cli::parse_sequence("0.3 -1.2 0.8 0 0.25 1.5 -0.7").map_err(|e| e.to_string())?;
    let config = RunConfig::new("-0.5", 32).map_err(|e| e.to_string())?;
    let beta_text = cli::cmd_dual(&config, &input, DualKind::Beta).map_err(|e| e.to_string())?;
    let gamma_text = cli::cmd_dual(&config, &input, DualKind::Gamma).map_err(|e| e.to_string())?;
    ensure(beta_text == gamma_text, || "rendered gamma report differs from beta".into())?;
    Ok(format!("max alpha {alpha:e}, beta {beta:e}; gamma == beta"))
}

/// `sup_K Σ_{n<N} |Σ_{k∈K} A(n,k)|` over every subset of `{0..=m}`, columns
/// added highest first so the sums round the same way as the library's.
fn naive_subset_sup(a: &DenseTriangle, m: usize, horizon: usize) -> f64 {
    let mut best: f64 = 0.0;
    for set in 1u32..(1 << (m + 1)) {
        let total: f64 = (0..horizon)
            .map(|n| (0..=m).rev().filter(|k| set & (1 << k) != 0).fold(0.0, |s, k| s + a.get(n, k)).abs())
            .fold(0.0, |acc, v| acc + v);
        best = best.max(total);
    }
    best
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let horizon = 16;
    let mut checked = 0;
    for m in [0, 3, 7, 12] {
        let tau = order(GRID[m % GRID.len()]);
        let a = FiniteSequence::from_values(&random_values(&mut rng, horizon));
        let v = beta_matrix(tau, &a, horizon);
        let stat = stat_subset_sup_l1(&v, m, horizon).map_err(|e| e.to_string())?;
        ensure(stat.is_nondecreasing(), || format!("m={m}: not monotone"))?;
        for n in [1, horizon / 2, horizon] {
            let got = stat.values[n - 1];
            let want = naive_subset_sup(&v, m, n);
            ensure(got == want, || format!("m={m} N={n}: {got} vs naive {want}"))?;
            let (lo, hi) = subset_sup_bounds(&v, m, n);
            ensure(lo <= got && got <= hi, || format!("m={m} N={n}: {lo} <= {got} <= {hi} fails"))?;
            checked += 1;
        }
        for q in [PExponent::new(1.0).unwrap(), PExponent::new(2.0).unwrap(), PExponent::infinity()] {
            let s = stat_row_qsum_sup(&v, q, horizon).map_err(|e| e.to_string())?;
            ensure(s.is_nondecreasing(), || format!("row sup q={q} not monotone"))?;
        }
        let report = dual_membership_report(tau, &a, PExponent::new(2.0).unwrap(), horizon);
        for s in [&report.d1, &report.d2, &report.d3] {
            ensure(s.report.is_nondecreasing(), || format!("{} not monotone", s.set))?;
        }
    }
    Ok(format!("{checked} (m, N) cases equal to naive enumeration and bracketed"))
}

fn criterion_11() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_frakpascal"))
        .args(["verify", "identity", "--report-star", "--tau", "0.5"])
        .env_remove("FRAKPASCAL_MAX_N")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let (checks, star) = text.split_once("\n\n").ok_or("no star table")?;
    let t = 0.5;
    let expected = [
        (1, 0, 1.0 - t, 2.0 - t),
        (2, 0, 1.0 - 2.0 * t + t * (t - 1.0) / 2.0, 3.0 - 3.0 * t + t * (t - 1.0) / 2.0),
        (2, 1, 2.0 - t, 3.0 - t),
    ];
    let rows: Vec<Vec<f64>> = star.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    ensure(rows.len() == 3, || format!("{} star rows", rows.len()))?;
    for (row, (n, k, defining, display)) in rows.iter().zip(expected) {
        ensure(row[..] == [n as f64, k as f64, defining, display], || format!("row {row:?}"))?;
    }
    let value = |name: &str| -> Result<f64, String> {
        let line = checks.lines().find(|l| l.starts_with(&format!("{name},"))).ok_or(format!("missing {name}"))?;
        line.split(',').nth(1).unwrap().parse().map_err(|_| format!("bad value in {line}"))
    };
    let (good, bad) = (value("defining_sum_block_residual")?, value("star_display_block_residual")?);
    ensure(good <= 1e-10 && bad >= 0.5, || format!("residuals {good} / {bad}"))?;
    Ok(format!("defining-sum residual {good}, star-display residual {bad}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("inverse identity", criterion_1),
        ("closed-form vs composed and dense inverse", criterion_2),
        ("integer-order reductions", criterion_3),
        ("round trip", criterion_4),
        ("Schauder basis", criterion_5),
        ("parallelogram", criterion_6),
        ("non-absoluteness", criterion_7),
        ("inclusion bound", criterion_8),
        ("dual identities", criterion_9),
        ("subset statistics", criterion_10),
        ("discrepancy report", criterion_11),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = run();
        let ms = t.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({ms:.0} ms): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({ms:.0} ms): {why}", i + 1);
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    if total >= 10.0 {
        failed += 1;
        println!("FAIL    total runtime {total:.2}s, limit 10s");
    }
    println!("{} of 11 criteria passed in {total:.2}s", 11 - failed.min(11));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
