//! ℓp(P̂) norms: the parallelogram law holds only at p = 2, and the norm
//! changes when signs are dropped.
//!
//!     cargo run --example norms_and_geometry

use frakpascal::spaces::{
    absoluteness_gap, default_absoluteness_witness, parallelogram_gap, parallelogram_gap_exact, phat_norm,
};
use frakpascal::{FiniteSequence, FracOrder, PExponent};
use num_rational::BigRational;

fn main() {
    let tau = FracOrder::new(0.5).unwrap();
    let x = FiniteSequence::from_values(&[1.0, -0.5, 0.25]);
    for p in ["1", "2", "3", "inf"] {
        let p: PExponent = p.parse().unwrap();
        println!("‖x‖ in ℓ{p}(P̂), N=12: {}", phat_norm(tau, &x, p, 12).value);
    }

    println!("\nparallelogram, N=16 (float) and N=48 (exact):");
    let half = BigRational::new(1.into(), 2.into());
    for p in [1.0, 1.5, 2.0, 4.0] {
        let pe = PExponent::new(p).unwrap();
        let f = parallelogram_gap(tau, pe, 16).unwrap();
        let e = parallelogram_gap_exact(&half, pe, 48).unwrap();
        println!("p={p}: lhs {} rhs {} | exact lhs {} rhs {}", f.lhs, f.rhs, e.lhs, e.rhs);
    }

    let w = default_absoluteness_witness();
    let gap = absoluteness_gap(tau, PExponent::new(2.0).unwrap(), &w, 16);
    println!("\n|‖w‖ − ‖|w|‖| for w = (1, −1), N=16: {gap}");
}
