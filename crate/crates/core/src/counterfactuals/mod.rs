//! Possible-worlds evaluation of counterfactual conditionals.
//!
//! A counterfactual about a measurement that was not performed is admitted
//! only when it can be deduced from the actual record of the other station
//! plus the theory. Concretely, the evaluator fixes the far side's actual
//! setting and outcome, swaps the queried side's setting for the alternative,
//! and looks at every quantum-possible world that remains. If all of them
//! agree on the queried outcome the counterfactual is necessary; otherwise it
//! has no grounding.

mod mixing;
mod narrate;

pub use mixing::{detect_context_mixing, ComposedConclusion, ContextMixingReport, ContextSwitch};
pub use narrate::{narrate_proposition, narrate_verdict, Frame, Narration, NarrationPayload};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hardy::{
    joint_probability, HardyState, Literal, Outcome, OutcomePair, Setting, SettingPair, Side,
};
use crate::qcore::ZERO_TOLERANCE;

/// A world with weight at or below this cannot occur.
pub const POSSIBILITY_TOLERANCE: f64 = ZERO_TOLERANCE;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CounterfactualError {
    #[error("actual run {0} is not quantum-possible")]
    ImpossibleActual(String),
    #[error("query asks for setting {setting} on the {side}, which is the setting actually used")]
    AlternativeEqualsActual { side: Side, setting: Setting },
    #[error("grounding record {supplied} is not the actual far-side record {actual}")]
    SubstitutedRecord { actual: Literal, supplied: Literal },
    #[error("malformed proposition: {0}")]
    MalformedProposition(String),
}

/// One possible world: a setting and outcome on each side, with its
/// Born-rule weight given the settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub left_setting: Setting,
    pub left_outcome: Outcome,
    pub right_setting: Setting,
    pub right_outcome: Outcome,
    pub weight: f64,
}

impl Run {
    pub fn settings(&self) -> SettingPair {
        SettingPair::new(self.left_setting, self.right_setting)
    }

    pub fn outcomes(&self) -> OutcomePair {
        OutcomePair::new(self.left_outcome, self.right_outcome)
    }

    /// The record of one station as a literal.
    pub fn record(&self, side: Side) -> Literal {
        Literal::new(side, self.settings().get(side), self.outcomes().get(side))
    }

    pub fn is_possible(&self) -> bool {
        self.weight > POSSIBILITY_TOLERANCE
    }

    /// Same settings and outcomes, ignoring weight.
    pub fn same_event(&self, other: &Run) -> bool {
        self.settings() == other.settings() && self.outcomes() == other.outcomes()
    }

    /// The run with the given records, weighted by `state`.
    pub fn weighted(state: &HardyState, settings: SettingPair, outcomes: OutcomePair) -> Run {
        Run {
            left_setting: settings.left,
            left_outcome: outcomes.left,
            right_setting: settings.right,
            right_outcome: outcomes.right,
            weight: joint_probability(state, settings, outcomes),
        }
    }
}

impl std::fmt::Display for Run {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(L{},{},R{},{})",
            self.left_setting, self.left_outcome, self.right_setting, self.right_outcome
        )
    }
}

/// All 16 runs, setting pairs in order 11, 12, 21, 22 and outcome pairs in
/// order ++, +−, −+, −− within each.
pub fn possible_runs(state: &HardyState) -> Vec<Run> {
    SettingPair::ALL
        .iter()
        .flat_map(|&s| OutcomePair::ALL.iter().map(move |&o| Run::weighted(state, s, o)))
        .collect()
}

/// "Had `side` measured `alternative` instead, what would the result be?"
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterfactualQuery {
    pub side: Side,
    pub alternative: Setting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    NecessarilyPlus,
    NecessarilyMinus,
    Undetermined,
    Inconsistent,
}

impl VerdictKind {
    pub fn necessarily(outcome: Outcome) -> Self {
        match outcome {
            Outcome::Plus => VerdictKind::NecessarilyPlus,
            Outcome::Minus => VerdictKind::NecessarilyMinus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// The quantum-possible worlds consistent with the grounding record.
    pub feasible: Vec<Run>,
}

/// Evaluates `query` against the actual far-side record of `actual`.
pub fn evaluate_counterfactual(
    state: &HardyState,
    actual: &Run,
    query: CounterfactualQuery,
) -> Result<Verdict, CounterfactualError> {
    evaluate_with_grounding(state, actual, query, actual.record(query.side.other()))
}

/// As [`evaluate_counterfactual`], with the far-side grounding record passed
/// explicitly. Any record other than the one `actual` contains is refused:
/// a counterfactual may only rest on what actually happened.
pub fn evaluate_with_grounding(
    state: &HardyState,
    actual: &Run,
    query: CounterfactualQuery,
    grounding: Literal,
) -> Result<Verdict, CounterfactualError> {
    let far = query.side.other();
    let actual_record = actual.record(far);
    if grounding != actual_record {
        return Err(CounterfactualError::SubstitutedRecord {
            actual: actual_record,
            supplied: grounding,
        });
    }
    if actual.settings().get(query.side) == query.alternative {
        return Err(CounterfactualError::AlternativeEqualsActual {
            side: query.side,
            setting: query.alternative,
        });
    }
    if joint_probability(state, actual.settings(), actual.outcomes()) <= POSSIBILITY_TOLERANCE {
        return Err(CounterfactualError::ImpossibleActual(actual.to_string()));
    }
    Ok(verdict_from_grounding(state, grounding, query))
}

// Looks only at the grounding record and the query; the queried side's
// actual outcome never reaches this function.
fn verdict_from_grounding(state: &HardyState, grounding: Literal, query: CounterfactualQuery) -> Verdict {
    let settings = SettingPair::new(Setting::One, Setting::One)
        .with(grounding.side, grounding.setting)
        .with(query.side, query.alternative);
    let feasible: Vec<Run> = Outcome::ALL
        .iter()
        .map(|&queried| {
            let mut outcomes = OutcomePair::new(queried, queried);
            match grounding.side {
                Side::Left => outcomes.left = grounding.outcome,
                Side::Right => outcomes.right = grounding.outcome,
            }
            Run::weighted(state, settings, outcomes)
        })
        .filter(Run::is_possible)
        .collect();

    let outcomes: Vec<Outcome> = feasible.iter().map(|r| r.outcomes().get(query.side)).collect();
    Verdict {
        kind: classify(&outcomes),
        feasible,
    }
}

fn classify(outcomes: &[Outcome]) -> VerdictKind {
    match outcomes {
        [] => VerdictKind::Inconsistent,
        [first, rest @ ..] if rest.iter().all(|o| o == first) => VerdictKind::necessarily(*first),
        _ => VerdictKind::Undetermined,
    }
}

/// "Whenever the left measures `left_setting` (optionally with outcome
/// `left_outcome`), if the right measures `right_setting` and gets
/// `right_outcome`, then had the right measured `alternative_right` the
/// result would be `claimed`."
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropositionSchema {
    left_setting: Setting,
    left_outcome: Option<Outcome>,
    right_setting: Setting,
    right_outcome: Outcome,
    alternative_right: Setting,
    claimed: Outcome,
}

impl PropositionSchema {
    pub fn new(
        left_setting: Setting,
        right_setting: Setting,
        right_outcome: Outcome,
        alternative_right: Setting,
        claimed: Outcome,
    ) -> Result<Self, CounterfactualError> {
        if alternative_right == right_setting {
            return Err(CounterfactualError::MalformedProposition(format!(
                "alternative right setting {alternative_right} equals the conditioning setting"
            )));
        }
        Ok(PropositionSchema {
            left_setting,
            left_outcome: None,
            right_setting,
            right_outcome,
            alternative_right,
            claimed,
        })
    }

    /// Left L2; right R2 gives +; had R1 been measured it would give −.
    pub fn proposition_one() -> Self {
        Self::new(Setting::Two, Setting::Two, Outcome::Plus, Setting::One, Outcome::Minus)
            .expect("well-formed")
    }

    /// As [`proposition_one`](Self::proposition_one) with the left choice L1.
    pub fn proposition_two() -> Self {
        PropositionSchema {
            left_setting: Setting::One,
            ..Self::proposition_one()
        }
    }

    pub fn with_claimed(self, claimed: Outcome) -> Self {
        PropositionSchema { claimed, ..self }
    }

    /// Additionally conditions on the left outcome.
    pub fn with_left_outcome(self, outcome: Outcome) -> Self {
        PropositionSchema {
            left_outcome: Some(outcome),
            ..self
        }
    }

    pub fn left_setting(&self) -> Setting {
        self.left_setting
    }

    pub fn left_outcome(&self) -> Option<Outcome> {
        self.left_outcome
    }

    pub fn right_setting(&self) -> Setting {
        self.right_setting
    }

    pub fn right_outcome(&self) -> Outcome {
        self.right_outcome
    }

    pub fn alternative_right(&self) -> Setting {
        self.alternative_right
    }

    pub fn claimed(&self) -> Outcome {
        self.claimed
    }

    pub fn query(&self) -> CounterfactualQuery {
        CounterfactualQuery {
            side: Side::Right,
            alternative: self.alternative_right,
        }
    }

    /// Actual runs the proposition quantifies over, possible or not.
    pub fn matching_runs(&self, state: &HardyState) -> Vec<Run> {
        let settings = SettingPair::new(self.left_setting, self.right_setting);
        Outcome::ALL
            .iter()
            .filter(|&&o| self.left_outcome.is_none_or(|lo| lo == o))
            .map(|&o| Run::weighted(state, settings, OutcomePair::new(o, self.right_outcome)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivability {
    Derivable,
    NotDerivable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunVerdict {
    pub actual: Run,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionEvaluation {
    pub schema: PropositionSchema,
    pub status: Derivability,
    /// Verdict for every quantum-possible actual run the schema covers.
    pub trace: Vec<RunVerdict>,
    /// Actual runs whose verdict is not the claimed necessity.
    pub witnesses: Vec<Run>,
}

impl PropositionEvaluation {
    pub fn is_derivable(&self) -> bool {
        self.status == Derivability::Derivable
    }
}

/// A proposition is derivable when every quantum-possible actual run it
/// covers yields the claimed outcome of necessity. With no possible actual
/// run the proposition holds vacuously.
pub fn evaluate_proposition(state: &HardyState, schema: &PropositionSchema) -> PropositionEvaluation {
    let query = schema.query();
    let target = VerdictKind::necessarily(schema.claimed);
    let trace: Vec<RunVerdict> = schema
        .matching_runs(state)
        .into_iter()
        .filter(Run::is_possible)
        .map(|actual| {
            let verdict = evaluate_counterfactual(state, &actual, query)
                .expect("schema runs are possible and use a different right setting");
            RunVerdict { actual, verdict }
        })
        .collect();
    let witnesses: Vec<Run> = trace
        .iter()
        .filter(|rv| rv.verdict.kind != target)
        .map(|rv| rv.actual)
        .collect();
    PropositionEvaluation {
        schema: *schema,
        status: if witnesses.is_empty() {
            Derivability::Derivable
        } else {
            Derivability::NotDerivable
        },
        trace,
        witnesses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::{build_hardy_state, MeasurementFamily};

    fn reference() -> HardyState {
        build_hardy_state(MeasurementFamily::reference()).unwrap()
    }

    fn run(state: &HardyState, ls: Setting, lo: Outcome, rs: Setting, ro: Outcome) -> Run {
        Run::weighted(state, SettingPair::new(ls, rs), OutcomePair::new(lo, ro))
    }

    use Outcome::{Minus, Plus};
    use Setting::{One, Two};

    const RIGHT_TO_ONE: CounterfactualQuery = CounterfactualQuery {
        side: Side::Right,
        alternative: One,
    };

    #[test]
    fn run_table_matches_probabilities() {
        let state = reference();
        let runs = possible_runs(&state);
        assert_eq!(runs.len(), 16);
        let find = |r: Run| *runs.iter().find(|x| x.same_event(&r)).unwrap();
        assert!(find(run(&state, Two, Minus, Two, Plus)).weight <= 1e-10);
        assert!((find(run(&state, One, Minus, One, Plus)).weight - 1.0 / 12.0).abs() < 1e-12);
        let total: f64 = runs.iter().filter(|r| r.settings() == SettingPair::new(One, One)).map(|r| r.weight).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn left_two_plus_forces_right_one_minus() {
        let state = reference();
        let v = evaluate_counterfactual(&state, &run(&state, Two, Plus, Two, Plus), RIGHT_TO_ONE).unwrap();
        assert_eq!(v.kind, VerdictKind::NecessarilyMinus);
        assert_eq!(v.feasible.len(), 1);
    }

    #[test]
    fn left_one_minus_leaves_right_one_open() {
        let state = reference();
        let v = evaluate_counterfactual(&state, &run(&state, One, Minus, Two, Plus), RIGHT_TO_ONE).unwrap();
        assert_eq!(v.kind, VerdictKind::Undetermined);
        assert_eq!(v.feasible.len(), 2);
    }

    #[test]
    fn substituted_far_record_is_refused() {
        let state = reference();
        let actual = run(&state, One, Minus, Two, Plus);
        let substituted = Literal::new(Side::Left, Two, Plus);
        let err = evaluate_with_grounding(&state, &actual, RIGHT_TO_ONE, substituted).unwrap_err();
        assert!(matches!(err, CounterfactualError::SubstitutedRecord { .. }));
    }

    #[test]
    fn precondition_violations() {
        let state = reference();
        let impossible = run(&state, Two, Minus, Two, Plus);
        assert!(matches!(
            evaluate_counterfactual(&state, &impossible, RIGHT_TO_ONE),
            Err(CounterfactualError::ImpossibleActual(_))
        ));
        let actual = run(&state, One, Minus, One, Plus);
        assert!(matches!(
            evaluate_counterfactual(&state, &actual, RIGHT_TO_ONE),
            Err(CounterfactualError::AlternativeEqualsActual { .. })
        ));
        assert!(PropositionSchema::new(Two, Two, Plus, Two, Minus).is_err());
    }

    #[test]
    fn left_queries_work_symmetrically() {
        let state = reference();
        // R2+ with L1 actually measured: had L2 been measured, R2+ forces L2+
        let actual = run(&state, One, Minus, Two, Plus);
        let q = CounterfactualQuery {
            side: Side::Left,
            alternative: Two,
        };
        assert_eq!(evaluate_counterfactual(&state, &actual, q).unwrap().kind, VerdictKind::NecessarilyPlus);
    }

    #[test]
    fn verdict_classification() {
        assert_eq!(classify(&[]), VerdictKind::Inconsistent);
        assert_eq!(classify(&[Plus]), VerdictKind::NecessarilyPlus);
        assert_eq!(classify(&[Minus, Minus]), VerdictKind::NecessarilyMinus);
        assert_eq!(classify(&[Plus, Minus]), VerdictKind::Undetermined);

        let state = reference();
        // 22−+ never occurs, so a left record L2− pins R2 to −
        let v = verdict_from_grounding(
            &state,
            Literal::new(Side::Left, Two, Minus),
            CounterfactualQuery {
                side: Side::Right,
                alternative: Two,
            },
        );
        assert_eq!(v.kind, VerdictKind::NecessarilyMinus);
    }

    #[test]
    fn propositions_one_and_two() {
        let state = reference();
        let one = evaluate_proposition(&state, &PropositionSchema::proposition_one());
        assert_eq!(one.status, Derivability::Derivable);
        assert_eq!(one.trace.len(), 1);

        let two = evaluate_proposition(&state, &PropositionSchema::proposition_two());
        assert_eq!(two.status, Derivability::NotDerivable);
        assert!(two.witnesses.iter().any(|r| r.same_event(&run(&state, One, Minus, Two, Plus))));

        let flipped = evaluate_proposition(&state, &PropositionSchema::proposition_one().with_claimed(Plus));
        assert_eq!(flipped.status, Derivability::NotDerivable);
    }

    #[test]
    fn strengthened_proposition_stays_derivable() {
        let state = reference();
        let strong = PropositionSchema::proposition_one().with_left_outcome(Plus);
        assert!(evaluate_proposition(&state, &strong).is_derivable());
    }
}
