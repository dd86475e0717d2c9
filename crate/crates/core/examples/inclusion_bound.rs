//! The row-sum constant B_N with ‖P̂x‖_p ≤ B_N ‖x‖_p on sequences
//! supported below N, and how close random vectors get to it.
//!
//!     cargo run --example inclusion_bound

use frakpascal::spaces::{inclusion_bound, p_norm, phat_norm};
use frakpascal::{FiniteSequence, FracOrder, PExponent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let tau = FracOrder::new(0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [PExponent::new(1.0).unwrap(), PExponent::new(2.0).unwrap(), PExponent::infinity()] {
        for n in [8, 16, 32] {
            let bound = inclusion_bound(tau, p, n);
            let worst = (0..200)
                .map(|_| {
                    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                    phat_norm(tau, &FiniteSequence::from_values(&x), p, n).value / p_norm(&x, p)
                })
                .fold(0.0, f64::max);
            println!("p={p:<3} N={n:>2}: B_N = {bound:.4e}, best random ratio {:.3}", worst / bound);
        }
    }
    // At τ = 0, p = ∞ the constant is the last Pascal row sum.
    for n in [1, 10, 53] {
        println!("τ=0, p=∞, N={n}: {}", inclusion_bound(FracOrder::integer(0), PExponent::infinity(), n));
    }
}
