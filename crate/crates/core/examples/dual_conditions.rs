//! Truncated statistics for the α/β/γ-dual conditions of a multiplier a.
//! Stabilizing sups suggest membership; growth suggests the opposite.
//!
//!     cargo run --example dual_conditions

use frakpascal::duals::{dual_identity_residuals, dual_membership_report};
use frakpascal::{FiniteSequence, FracOrder, PExponent};

fn main() {
    let tau = FracOrder::new(0.5).unwrap();
    let p = PExponent::new(2.0).unwrap();
    let finite = FiniteSequence::from_values(&[1.0]);
    let ones: FiniteSequence = (0..24).map(|i| (i, 1.0)).collect();

    for (name, a) in [("e0", &finite), ("ones", &ones)] {
        let r = dual_membership_report(tau, a, p, 24);
        println!("a = {name}");
        for s in r.sets() {
            println!(
                "  {} {:<34} {:?} last {:.4e}{}",
                s.set,
                s.condition,
                s.report.verdict_hint,
                s.report.last(),
                if s.informational { " (informational)" } else { "" }
            );
        }
    }

    // Σ a_n x_n computed directly and through the matrices built from P̂^{-1}.
    let y: Vec<f64> = (0..32).map(|i| (i as f64 * 0.7).sin()).collect();
    let a = FiniteSequence::from_values(&[0.5, -0.25, 1.0, 0.75]);
    println!("two-path identity residuals: {:?}", dual_identity_residuals(tau, &a, &y));
}
