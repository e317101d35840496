use hardy_toolkit::counterfactuals::{
    evaluate_counterfactual, evaluate_proposition, narrate_verdict, possible_runs, CounterfactualQuery, Frame,
    PropositionSchema, Run,
};
use hardy_toolkit::hardy::{
    build_hardy_state, hardy_fraction, joint_probability, probability_table, MeasurementFamily, Outcome, OutcomePair,
    Setting, SettingPair, Side,
};
use hardy_toolkit::lhv::{
    enumerate_strategies, feasible_strategies, feasible_under, hardy_zero_constraints, mixture_probability,
    DeterministicStrategy, ZeroConstraint,
};
use hardy_toolkit::qcore::{inner, tensor, Vec2};
use hardy_toolkit::sim::{empirical_report, sample_runs, Tally};
use num_complex::Complex64;
use proptest::prelude::*;
use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;

const EDGE: f64 = 0.05;

fn angle() -> impl Strategy<Value = f64> {
    EDGE..FRAC_PI_2 - EDGE
}

fn phase() -> impl Strategy<Value = f64> {
    -std::f64::consts::PI..std::f64::consts::PI
}

fn vec2() -> impl Strategy<Value = Vec2> {
    prop::array::uniform4(-2.0f64..2.0).prop_map(|a| {
        hardy_toolkit::qcore::Ket([Complex64::new(a[0], a[1]), Complex64::new(a[2], a[3])])
    })
}

fn family() -> impl Strategy<Value = MeasurementFamily> {
    (angle(), angle(), phase(), phase()).prop_map(|(a, b, c, d)| MeasurementFamily::with_phases(a, b, c, d))
}

fn outcome() -> impl Strategy<Value = Outcome> {
    prop_oneof![Just(Outcome::Plus), Just(Outcome::Minus)]
}

fn setting() -> impl Strategy<Value = Setting> {
    prop_oneof![Just(Setting::One), Just(Setting::Two)]
}

fn hardy_zero(p: f64) -> bool {
    p <= 1e-10
}

fn survivor_set(constraints: &[ZeroConstraint]) -> BTreeSet<DeterministicStrategy> {
    feasible_under(constraints).into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn tensor_norm_is_product_of_norms(a in vec2(), b in vec2()) {
        let t = tensor(&a, &b);
        prop_assert!((t.norm() - a.norm() * b.norm()).abs() < 1e-9);
    }

    #[test]
    fn inner_is_conjugate_symmetric(a in vec2(), b in vec2()) {
        let ab = inner(a.components(), b.components()).unwrap();
        let ba = inner(b.components(), a.components()).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-12);
    }

    #[test]
    fn inner_factorizes_over_tensor(a in vec2(), b in vec2(), c in vec2(), d in vec2()) {
        let lhs = tensor(&a, &b).inner(&tensor(&c, &d));
        let rhs = a.inner(&c) * b.inner(&d);
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn three_zeros_hold_and_target_is_positive(f in family()) {
        let state = build_hardy_state(f).unwrap();
        let p = |ls, rs, lo, ro| joint_probability(&state, SettingPair::new(ls, rs), OutcomePair::new(lo, ro));
        use Outcome::*;
        use Setting::*;
        prop_assert!(hardy_zero(p(One, Two, Minus, Minus)));
        prop_assert!(hardy_zero(p(Two, Two, Minus, Plus)));
        prop_assert!(hardy_zero(p(Two, One, Plus, Plus)));
        prop_assert!(p(One, One, Minus, Plus) > 1e-12);
    }

    #[test]
    fn every_setting_row_is_a_distribution(f in family()) {
        let state = build_hardy_state(f).unwrap();
        for row in probability_table(&state) {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(row.iter().all(|&p| (0.0..=1.0).contains(&p)));
        }
    }

    #[test]
    fn fraction_is_symmetric(a in angle(), b in angle()) {
        prop_assert!((hardy_fraction(a, b).unwrap() - hardy_fraction(b, a).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn local_mixtures_never_reach_target(weights in prop::collection::vec(0.0f64..1.0, 5)) {
        let survivors = feasible_strategies();
        let total: f64 = weights.iter().sum::<f64>().max(1e-9);
        let mixture: Vec<_> = weights.iter().zip(&survivors).map(|(w, s)| (w / total, *s)).collect();
        let p = mixture_probability(
            &mixture,
            SettingPair::new(Setting::One, Setting::One),
            OutcomePair::new(Outcome::Minus, Outcome::Plus),
        );
        prop_assert_eq!(p, 0.0);
    }

    #[test]
    fn verdicts_are_frame_invariant(
        f in family(),
        run_index in 0usize..16,
        side in prop_oneof![Just(Side::Left), Just(Side::Right)],
    ) {
        let state = build_hardy_state(f).unwrap();
        let runs: Vec<Run> = possible_runs(&state).into_iter().filter(Run::is_possible).collect();
        let actual = runs[run_index % runs.len()];
        let query = CounterfactualQuery { side, alternative: actual.settings().get(side).other() };
        let verdict = evaluate_counterfactual(&state, &actual, query).unwrap();
        let payloads: Vec<_> = Frame::ALL
            .iter()
            .map(|&fr| narrate_verdict(&actual, query, &verdict, fr).payload)
            .collect();
        prop_assert!(payloads.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn verdict_ignores_queried_side_actual_outcome(
        f in family(),
        ls in setting(),
        rs in setting(),
        lo in outcome(),
        ro in outcome(),
        side in prop_oneof![Just(Side::Left), Just(Side::Right)],
    ) {
        let state = build_hardy_state(f).unwrap();
        let settings = SettingPair::new(ls, rs);
        let a = Run::weighted(&state, settings, OutcomePair::new(lo, ro));
        let flipped = match side {
            Side::Left => OutcomePair::new(lo.flipped(), ro),
            Side::Right => OutcomePair::new(lo, ro.flipped()),
        };
        let b = Run::weighted(&state, settings, flipped);
        prop_assume!(a.is_possible() && b.is_possible());
        let query = CounterfactualQuery { side, alternative: settings.get(side).other() };
        let va = evaluate_counterfactual(&state, &a, query).unwrap();
        let vb = evaluate_counterfactual(&state, &b, query).unwrap();
        prop_assert_eq!(va.kind, vb.kind);
    }

    #[test]
    fn propositions_hold_across_families(a in 0.2f64..1.3, b in 0.2f64..1.3) {
        let state = build_hardy_state(MeasurementFamily::new(a, b)).unwrap();
        let one = evaluate_proposition(&state, &PropositionSchema::proposition_one());
        prop_assert!(one.is_derivable());
        let two = evaluate_proposition(&state, &PropositionSchema::proposition_two());
        prop_assert!(!two.is_derivable());
        prop_assert!(two.witnesses.iter().any(|w| w.left_outcome == Outcome::Minus));
    }

    #[test]
    fn extra_grounding_preserves_derivability(a in 0.2f64..1.3, b in 0.2f64..1.3, lo in outcome()) {
        let state = build_hardy_state(MeasurementFamily::new(a, b)).unwrap();
        let schema = PropositionSchema::proposition_one().with_left_outcome(lo);
        prop_assert!(evaluate_proposition(&state, &schema).is_derivable());
    }

    #[test]
    fn tally_is_deterministic_per_seed(seed in any::<u64>()) {
        let state = build_hardy_state(MeasurementFamily::reference()).unwrap();
        prop_assert_eq!(sample_runs(&state, 2_000, seed).unwrap(), sample_runs(&state, 2_000, seed).unwrap());
    }
}

#[test]
fn mirror_maps_survivors_to_survivors_of_mirrored_constraints() {
    let constraints = hardy_zero_constraints();
    let mirrored: Vec<_> = constraints.iter().map(ZeroConstraint::mirrored).collect();
    let image: BTreeSet<_> = survivor_set(&constraints).iter().map(DeterministicStrategy::mirrored).collect();
    assert_eq!(image, survivor_set(&mirrored));
    for s in enumerate_strategies() {
        assert_eq!(s.mirrored().mirrored(), s);
        for c in &constraints {
            assert_eq!(c.violated_by(&s), c.mirrored().violated_by(&s.mirrored()));
        }
    }
}

#[test]
fn hardy_constraints_are_not_mirror_closed() {
    let constraints = hardy_zero_constraints();
    let set: BTreeSet<_> = constraints.iter().copied().collect();
    let image: BTreeSet<_> = constraints.iter().map(ZeroConstraint::mirrored).collect();
    assert_ne!(set, image);
    let survivors = survivor_set(&constraints);
    let mirrored: BTreeSet<_> = survivors.iter().map(DeterministicStrategy::mirrored).collect();
    assert_ne!(survivors, mirrored);
}

#[test]
fn symmetrized_constraints_give_closed_survivors() {
    let mut constraints = hardy_zero_constraints();
    constraints.extend(hardy_zero_constraints().iter().map(ZeroConstraint::mirrored));
    let survivors = survivor_set(&constraints);
    let mirrored: BTreeSet<_> = survivors.iter().map(DeterministicStrategy::mirrored).collect();
    assert_eq!(survivors, mirrored);
}

#[test]
fn distinct_seeds_give_distinct_tallies() {
    let state = build_hardy_state(MeasurementFamily::reference()).unwrap();
    let tallies: BTreeSet<_> = (0..20u64).map(|s| sample_runs(&state, 1_000, s).unwrap().counts).collect();
    assert_eq!(tallies.len(), 20);
}

fn target_error(tally: &Tally) -> f64 {
    let s = SettingPair::new(Setting::One, Setting::One);
    (tally.frequency(s, OutcomePair::new(Outcome::Minus, Outcome::Plus)) - 1.0 / 12.0).abs()
}

#[test]
fn sampling_error_shrinks_with_more_runs() {
    let state = build_hardy_state(MeasurementFamily::reference()).unwrap();
    let median = |n: u64| {
        let mut errs: Vec<f64> = (0..41u64).map(|seed| target_error(&sample_runs(&state, n, seed).unwrap())).collect();
        errs.sort_by(f64::total_cmp);
        errs[errs.len() / 2]
    };
    let small = median(2_000);
    let large = median(32_000);
    assert!(large < small, "median error {large} at 32k not below {small} at 2k");
}

#[test]
fn ten_thousand_runs_pass_the_report() {
    let state = build_hardy_state(MeasurementFamily::reference()).unwrap();
    let tally = sample_runs(&state, 10_000, 11).unwrap();
    let report = empirical_report(&tally, &state).unwrap();
    assert!(report.passed, "{:?}", report.failures);
}
