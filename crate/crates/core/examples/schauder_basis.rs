//! Basis vectors b^(k) = P̂^{-1} e^(k) and reconstruction from their
//! coefficients μ = P̂x.
//!
//!     cargo run --example schauder_basis

use frakpascal::{FiniteSequence, FracOrder, PhatTransform};

fn main() {
    let t = PhatTransform::new(FracOrder::new(0.5).unwrap(), 48);
    for k in [0, 3, 7] {
        let b = t.basis_vector(k).unwrap();
        let head: Vec<String> = b.values[..k + 5].iter().map(|v| format!("{v:.4}")).collect();
        println!("b^({k}) = [{} …], residual {:e}", head.join(", "), t.schauder_residual(k).unwrap());
    }

    let x = FiniteSequence::from_values(&[0.4, -1.0, 0.25, 0.0, 0.8, -0.3, 0.6]);
    let mu = t.apply(&x);
    println!("μ = P̂x starts {:?}", &mu[..7]);
    for terms in [2, 6, 16] {
        let r = t.reconstruct(&x, terms).unwrap();
        let err = (0..=terms).fold(0f64, |m, i| m.max((r[i] - x.get(i)).abs()));
        println!("K={terms:>2}: max error on indices 0..=K is {err:e}");
    }
}
