//! The triangles behind P̂ and how they compose.
//!
//!     cargo run --example operator_algebra

use frakpascal::coeffs::frac_binom;
use frakpascal::operator::{identity_residual, product_residual};
use frakpascal::{FracOrder, TriangularOperator};

fn print(name: &str, t: &frakpascal::DenseTriangle) {
    println!("{name}:");
    for row in t.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>9.4}")).collect();
        println!("  {}", cells.join(" "));
    }
}

fn main() {
    let tau = FracOrder::new(0.5).unwrap();
    println!("C(0.5, i) for i < 6: {:?}", (0..6).map(|i| frac_binom(0.5, i)).collect::<Vec<_>>());

    let n = 6;
    print("P", &TriangularOperator::pascal().truncate(n));
    print("Δ^(0.5)", &TriangularOperator::delta(tau).truncate(n));
    print("P̂ = P·Δ^(0.5)", &TriangularOperator::phat(tau).truncate(n));
    print("P̂^{-1}", &TriangularOperator::phat_inverse(tau).truncate(n));

    // Closed-form inverse against the composition Δ^(−τ)·P^{-1}.
    let closed = TriangularOperator::phat_inverse(tau).truncate(32);
    let composed = TriangularOperator::delta_inverse(tau)
        .compose(&TriangularOperator::pascal_inverse())
        .truncate(32);
    println!("closed form vs composed, N=32: max diff {:e}", closed.max_abs_diff(&composed));

    for t in [0.5, 1.5, -0.5, 2.3] {
        let tau = FracOrder::new(t).unwrap();
        println!("tau={t:>4}: |P̂·P̂^-1 − I| at N=64 = {:e}", identity_residual(tau, 64));
    }
    let d = TriangularOperator::delta(tau).truncate(64);
    let di = TriangularOperator::delta_inverse(tau).truncate(64);
    println!("|Δ^τ·Δ^-τ − I| at N=64 (row-relative) = {:e}", product_residual(&d, &di));
}
