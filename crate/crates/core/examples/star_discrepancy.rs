//! Three low entries of P̂ have a second printed form that disagrees with
//! the defining sum. Only the defining sum inverts correctly.
//!
//!     cargo run --example star_discrepancy

use frakpascal::cli::{star_block_residual, star_entries};
use frakpascal::FracOrder;

fn main() {
    for t in [0.5, 1.5, -0.5] {
        let tau = FracOrder::new(t).unwrap();
        println!("tau = {t}");
        for e in star_entries(tau) {
            println!("  ({}, {}): defining sum {:>8.4}, alternative {:>8.4}", e.n, e.k, e.defining_sum, e.star_display);
        }
        println!(
            "  3x3 |A·P̂^-1 − I|: defining {:e}, alternative {}",
            star_block_residual(tau, false),
            star_block_residual(tau, true)
        );
    }
}
