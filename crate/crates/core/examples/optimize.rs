//! Search for the measurement angles that maximize p(11-+).

use hardy_toolkit::hardy::{hardy_fraction, optimize_hardy_fraction, optimize_hardy_fraction_symmetric};

fn main() {
    let closed_form = (5.0 * 5f64.sqrt() - 11.0) / 2.0;
    for (grid, refine) in [(8, 0), (16, 2), (64, 4)] {
        let opt = optimize_hardy_fraction(grid, refine).unwrap();
        println!(
            "grid {grid:>3}, refine {refine}: p* = {:.12} at ({:.6}, {:.6}), {} evaluations, gap {:.1e}",
            opt.probability,
            opt.theta_left,
            opt.theta_right,
            opt.evaluations,
            closed_form - opt.probability
        );
    }
    let diag = optimize_hardy_fraction_symmetric(64, 4).unwrap();
    println!("diagonal search: p* = {:.12} at {:.6}", diag.probability, diag.theta_left);

    let golden = ((5f64.sqrt() - 1.0) / 2.0).sqrt().asin();
    println!("analytic angle {golden:.6}: p = {:.12}", hardy_fraction(golden, golden).unwrap());
}
