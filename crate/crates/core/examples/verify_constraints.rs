//! Build the state for a few measurement families and print the four
//! Hardy probabilities along with the implication table.

use hardy_toolkit::hardy::{build_hardy_state, constraint_report, validate_implications, MeasurementFamily, Tolerances};

fn main() {
    let families = [
        MeasurementFamily::reference(),
        MeasurementFamily::new(0.9046, 0.9046),
        MeasurementFamily::with_phases(0.4, 1.1, 0.7, -1.3),
    ];
    for family in families {
        let state = build_hardy_state(family).expect("proper family");
        let report = constraint_report(&state, Tolerances::default());
        println!(
            "theta = ({:.4}, {:.4}), phi = ({:.2}, {:.2})",
            family.theta_left, family.theta_right, family.phi_left, family.phi_right
        );
        for check in &report.checks {
            println!("  {} = {:.3e}  {}", check.label, check.probability, if check.passed { "ok" } else { "FAIL" });
        }
        for v in validate_implications(&state, Tolerances::default()) {
            println!("  {}  (counter-event weight {:.3e})", v.implication, v.counter_probability);
        }
    }

    match build_hardy_state(MeasurementFamily::new(0.0, 0.8)) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}
