//! Float against exact rational arithmetic. Entries of P̂ grow like 2^n, so
//! float round trips lose about two bits per index; the exact path does not.
//!
//!     cargo run --example exact_arithmetic

use frakpascal::exact::{self, ExactTransform, ExactVector};
use frakpascal::{FiniteSequence, FracOrder, PhatTransform};
use num_rational::BigRational;

fn main() {
    // Integer orders stay in big integers.
    let p = exact::phat(2, 40);
    println!("P̂ at τ=2, entry (39, 19) = {}", p.get(39, 19));
    println!("exact |P̂·P̂^-1 − I| for τ=3, N=64: {}", exact::identity_residual(3, 64));

    let x: Vec<f64> = (0..32).map(|i| ((i * 37 % 17) as f64 - 8.0) / 8.0).collect();
    let tau = FracOrder::new(-0.5).unwrap();
    for n in [16, 24, 32] {
        let t = PhatTransform::new(tau, n);
        let xs = FiniteSequence::from_values(&x[..n]);
        let back = t.inverse_apply(&FiniteSequence::from_values(&t.apply(&xs)));
        let float_err = back.iter().zip(&x).fold(0f64, |m, (a, b)| m.max((a - b).abs()));

        let e = ExactTransform::from_order(tau, n);
        let v = ExactVector::from_f64(&x[..n]).unwrap();
        let exact_back = e.inverse_apply(&e.apply(&v)).to_f64();
        let exact_err = exact_back.iter().zip(&x).fold(0f64, |m, (a, b)| m.max((a - b).abs()));
        println!("N={n}: float round-trip error {float_err:e}, exact {exact_err:e}");
    }

    // Any rational order works; τ = 1/3 here.
    let third = BigRational::new(1.into(), 3.into());
    let e = ExactTransform::new(&third, 5);
    println!("P̂^-1 at τ=1/3, row 4: {:?}", e.inverse_triangle().row(4));
}
