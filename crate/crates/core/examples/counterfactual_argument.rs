//! Evaluate the two counterfactual propositions with the grounded semantics
//! and show the run-by-run trace.

use hardy_toolkit::counterfactuals::{
    evaluate_proposition, evaluate_with_grounding, CounterfactualQuery, PropositionSchema, Run,
};
use hardy_toolkit::hardy::{build_hardy_state, MeasurementFamily, Outcome, OutcomePair, Setting, SettingPair, Side};

fn main() {
    let state = build_hardy_state(MeasurementFamily::reference()).unwrap();
    for (name, schema) in [
        ("I", PropositionSchema::proposition_one()),
        ("II", PropositionSchema::proposition_two()),
    ] {
        let eval = evaluate_proposition(&state, &schema);
        println!("proposition {name}: {:?}", eval.status);
        for rv in &eval.trace {
            println!("  actual {} -> {:?}", rv.actual, rv.verdict.kind);
        }
        for w in &eval.witnesses {
            println!("  witness {w}");
        }
    }

    // Asking the same question while passing the grounding record of a
    // different run is refused.
    let actual = Run::weighted(
        &state,
        SettingPair::new(Setting::One, Setting::Two),
        OutcomePair::new(Outcome::Minus, Outcome::Plus),
    );
    let query = CounterfactualQuery {
        side: Side::Right,
        alternative: Setting::One,
    };
    let substituted = actual.record(Side::Left).negated();
    println!("{}", evaluate_with_grounding(&state, &actual, query, substituted).unwrap_err());
}
