//! Chain the three zero-probability implications naively and report where
//! the experimental context changes underneath the argument.

use hardy_toolkit::counterfactuals::detect_context_mixing;
use hardy_toolkit::hardy::{build_hardy_state, hardy_implications, MeasurementFamily};

fn main() {
    let state = build_hardy_state(MeasurementFamily::reference()).unwrap();
    let chain = &hardy_implications()[..3];
    let report = detect_context_mixing(&state, chain);
    for imp in &report.chain {
        println!("  {imp}");
    }
    for s in &report.switches {
        println!(
            "switch after step {}: settings {} -> {} (left changed: {}, right changed: {})",
            s.position + 1,
            s.from,
            s.to,
            s.left_changed,
            s.right_changed
        );
    }
    if let Some(c) = &report.composed {
        println!("composed claim {} => {}: holds = {}", c.antecedent, c.consequent, c.holds);
        for run in &c.counterexamples {
            println!("  refuted by {run} with weight {:.6}", run.weight);
        }
    }
    println!("chain valid: {}", report.valid);

    let single = detect_context_mixing(&state, &chain[..1]);
    println!("single implication valid: {}", single.valid);
}
