//! The same counterfactual told from three temporal perspectives.

use hardy_toolkit::counterfactuals::{
    evaluate_counterfactual, narrate_proposition, narrate_verdict, CounterfactualQuery, Frame, PropositionSchema, Run,
};
use hardy_toolkit::hardy::{build_hardy_state, MeasurementFamily, Outcome, OutcomePair, Setting, SettingPair, Side};

fn main() {
    let state = build_hardy_state(MeasurementFamily::reference()).unwrap();
    let schema = PropositionSchema::proposition_one();
    for frame in Frame::ALL {
        println!("{:?}: {}", frame, narrate_proposition(&schema, frame).text);
    }

    let actual = Run::weighted(
        &state,
        SettingPair::new(Setting::Two, Setting::Two),
        OutcomePair::new(Outcome::Plus, Outcome::Plus),
    );
    let query = CounterfactualQuery {
        side: Side::Right,
        alternative: Setting::One,
    };
    let verdict = evaluate_counterfactual(&state, &actual, query).unwrap();
    for frame in Frame::ALL {
        let n = narrate_verdict(&actual, query, &verdict, frame);
        println!("{:?}: {}", frame, n.text);
    }
}
