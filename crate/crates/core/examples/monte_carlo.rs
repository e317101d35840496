//! Sample runs with a fixed seed and compare frequencies with the Born
//! probabilities.

use hardy_toolkit::hardy::{build_hardy_state, MeasurementFamily};
use hardy_toolkit::sim::{empirical_report, sample_runs};

fn main() {
    let state = build_hardy_state(MeasurementFamily::reference()).unwrap();
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let tally = sample_runs(&state, 100_000, seed).unwrap();
    let report = empirical_report(&tally, &state).unwrap();
    println!("{} runs, seed {seed}", report.total);
    for b in &report.buckets {
        println!(
            "  p({}{}) = {:.5}  observed {:.5} ({:>6} of {:>6})  z = {:+.2}{}",
            b.settings,
            b.outcomes,
            b.probability,
            b.frequency,
            b.count,
            b.settings_total,
            b.z_score,
            if b.forbidden { "  forbidden" } else { "" }
        );
    }
    println!("{}", if report.passed { "PASS" } else { "FAIL" });
}
