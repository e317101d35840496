//! Local deterministic hidden-variable strategies and the no-go certificate.
//!
//! A strategy fixes one outcome per local setting, so the outcome on one side
//! cannot depend on the setting chosen on the other. Sixteen such strategies
//! exist; any local model is a mixture of them. Three zero constraints of the
//! Hardy state eliminate all strategies that would ever produce `11−+`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hardy::{
    build_hardy_state, joint_probability, HardyState, Literal, MeasurementFamily, Outcome,
    OutcomePair, Requirement, Setting, SettingPair, Side, HARDY_EVENTS, POSITIVITY_THRESHOLD,
};

/// Outcome assignment for `L1`, `L2`, `R1`, `R2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub l1: Outcome,
    pub l2: Outcome,
    pub r1: Outcome,
    pub r2: Outcome,
}

impl DeterministicStrategy {
    /// Strategy number `index` in enumeration order: bits 3..0 encode
    /// `L1, L2, R1, R2`, with a set bit meaning `−`.
    pub fn from_index(index: usize) -> Self {
        assert!(index < 16, "strategy index out of range");
        let bit = |k: usize| {
            if index >> k & 1 == 1 {
                Outcome::Minus
            } else {
                Outcome::Plus
            }
        };
        DeterministicStrategy {
            l1: bit(3),
            l2: bit(2),
            r1: bit(1),
            r2: bit(0),
        }
    }

    pub fn index(&self) -> usize {
        let bit = |o: Outcome| usize::from(o == Outcome::Minus);
        bit(self.l1) << 3 | bit(self.l2) << 2 | bit(self.r1) << 1 | bit(self.r2)
    }

    pub fn value(&self, side: Side, setting: Setting) -> Outcome {
        match (side, setting) {
            (Side::Left, Setting::One) => self.l1,
            (Side::Left, Setting::Two) => self.l2,
            (Side::Right, Setting::One) => self.r1,
            (Side::Right, Setting::Two) => self.r2,
        }
    }

    pub fn satisfies(&self, literal: Literal) -> bool {
        self.value(literal.side, literal.setting) == literal.outcome
    }

    /// The outcome pair this strategy produces under `settings`.
    pub fn outcomes(&self, settings: SettingPair) -> OutcomePair {
        OutcomePair::new(
            self.value(Side::Left, settings.left),
            self.value(Side::Right, settings.right),
        )
    }

    /// Image under the joint relabeling: swap stations, swap setting labels
    /// and flip every outcome.
    pub fn mirrored(&self) -> Self {
        DeterministicStrategy {
            l1: self.r2.flipped(),
            l2: self.r1.flipped(),
            r1: self.l2.flipped(),
            r2: self.l1.flipped(),
        }
    }
}

impl fmt::Display for DeterministicStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L1{} L2{} R1{} R2{}", self.l1, self.l2, self.r1, self.r2)
    }
}

/// A joint event that must never occur.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZeroConstraint {
    pub settings: SettingPair,
    pub forbidden: OutcomePair,
}

impl ZeroConstraint {
    pub fn violated_by(&self, strategy: &DeterministicStrategy) -> bool {
        strategy.outcomes(self.settings) == self.forbidden
    }

    pub fn literal(&self, side: Side) -> Literal {
        Literal::new(side, self.settings.get(side), self.forbidden.get(side))
    }

    pub fn mirrored(&self) -> Self {
        ZeroConstraint {
            settings: SettingPair::new(self.settings.right.other(), self.settings.left.other()),
            forbidden: OutcomePair::new(self.forbidden.right.flipped(), self.forbidden.left.flipped()),
        }
    }

    /// Given `premise`, the literal this constraint forces on the other side.
    pub fn deduce(&self, premise: Literal) -> Option<Literal> {
        if self.literal(premise.side) != premise {
            return None;
        }
        Some(self.literal(premise.side.other()).negated())
    }
}

impl fmt::Display for ZeroConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p({}{}) = 0", self.settings, self.forbidden)
    }
}

/// `p(12−−) = 0`, `p(22−+) = 0`, `p(21++) = 0`, in that order.
pub fn hardy_zero_constraints() -> Vec<ZeroConstraint> {
    HARDY_EVENTS
        .iter()
        .filter(|(_, _, req)| *req == Requirement::Zero)
        .map(|&(settings, forbidden, _)| ZeroConstraint { settings, forbidden })
        .collect()
}

/// The classically forbidden event `11−+`.
pub const TARGET_SETTINGS: SettingPair = SettingPair::new(Setting::One, Setting::One);
pub const TARGET_OUTCOMES: OutcomePair = OutcomePair::new(Outcome::Minus, Outcome::Plus);

/// All 16 strategies, ordered by [`DeterministicStrategy::index`].
pub fn enumerate_strategies() -> Vec<DeterministicStrategy> {
    (0..16).map(DeterministicStrategy::from_index).collect()
}

pub fn feasible_under(constraints: &[ZeroConstraint]) -> Vec<DeterministicStrategy> {
    enumerate_strategies()
        .into_iter()
        .filter(|s| constraints.iter().all(|c| !c.violated_by(s)))
        .collect()
}

/// Strategies compatible with the three Hardy zeros.
pub fn feasible_strategies() -> Vec<DeterministicStrategy> {
    feasible_under(&hardy_zero_constraints())
}

/// Probability of `outcomes` under `settings` for a mixture of strategies.
pub fn mixture_probability(
    mixture: &[(f64, DeterministicStrategy)],
    settings: SettingPair,
    outcomes: OutcomePair,
) -> f64 {
    mixture
        .iter()
        .filter(|(_, s)| s.outcomes(settings) == outcomes)
        .map(|(w, _)| w)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub strategy: DeterministicStrategy,
    /// Indices into the certificate's constraint list.
    pub violated: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeductionStep {
    pub premise: Literal,
    pub conclusion: Literal,
    pub constraint: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumWitness {
    pub family: MeasurementFamily,
    pub settings: SettingPair,
    pub outcomes: OutcomePair,
    pub probability: f64,
    pub threshold: f64,
}

/// Structured evidence that no mixture of local strategies satisfies the
/// zero constraints while giving `11−+` positive weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoGoCertificate {
    pub constraints: Vec<ZeroConstraint>,
    pub strategy_count: usize,
    pub survivors: Vec<DeterministicStrategy>,
    pub eliminated: Vec<Elimination>,
    pub target_settings: SettingPair,
    pub target_outcomes: OutcomePair,
    /// Survivors producing the target event; empty when the no-go holds.
    pub survivors_reaching_target: Vec<DeterministicStrategy>,
    /// Chain from the target's left literal to the negation of its right one.
    pub chain: Vec<DeductionStep>,
    pub contradicts: Literal,
    pub quantum_witness: QuantumWitness,
}

/// Breadth-first search for a chain of constraint deductions from `start`
/// to `goal`.
pub fn deduction_chain(constraints: &[ZeroConstraint], start: Literal, goal: Literal) -> Option<Vec<DeductionStep>> {
    let mut parent: HashMap<Literal, DeductionStep> = HashMap::new();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(lit) = queue.pop_front() {
        if lit == goal {
            let mut steps = Vec::new();
            let mut cur = lit;
            while let Some(step) = parent.get(&cur) {
                steps.push(*step);
                cur = step.premise;
            }
            steps.reverse();
            return Some(steps);
        }
        for (idx, c) in constraints.iter().enumerate() {
            if let Some(next) = c.deduce(lit) {
                if seen.insert(next) {
                    parent.insert(
                        next,
                        DeductionStep {
                            premise: lit,
                            conclusion: next,
                            constraint: idx,
                        },
                    );
                    queue.push_back(next);
                }
            }
        }
    }
    None
}

/// Certificate with the witness taken from the π/4 reference family.
pub fn nogo_certificate() -> NoGoCertificate {
    let state = build_hardy_state(MeasurementFamily::reference()).expect("reference family is proper");
    nogo_certificate_for(&state)
}

pub fn nogo_certificate_for(state: &HardyState) -> NoGoCertificate {
    let constraints = hardy_zero_constraints();
    let all = enumerate_strategies();
    let mut survivors = Vec::new();
    let mut eliminated = Vec::new();
    for strategy in &all {
        let violated: Vec<usize> = constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.violated_by(strategy))
            .map(|(i, _)| i)
            .collect();
        if violated.is_empty() {
            survivors.push(*strategy);
        } else {
            eliminated.push(Elimination {
                strategy: *strategy,
                violated,
            });
        }
    }
    let survivors_reaching_target = survivors
        .iter()
        .filter(|s| s.outcomes(TARGET_SETTINGS) == TARGET_OUTCOMES)
        .copied()
        .collect();

    let start = Literal::new(Side::Left, TARGET_SETTINGS.left, TARGET_OUTCOMES.left);
    let contradicts = Literal::new(Side::Right, TARGET_SETTINGS.right, TARGET_OUTCOMES.right);
    let chain = deduction_chain(&constraints, start, contradicts.negated()).unwrap_or_default();

    NoGoCertificate {
        strategy_count: all.len(),
        constraints,
        survivors,
        eliminated,
        target_settings: TARGET_SETTINGS,
        target_outcomes: TARGET_OUTCOMES,
        survivors_reaching_target,
        chain,
        contradicts,
        quantum_witness: QuantumWitness {
            family: *state.family(),
            settings: TARGET_SETTINGS,
            outcomes: TARGET_OUTCOMES,
            probability: joint_probability(state, TARGET_SETTINGS, TARGET_OUTCOMES),
            threshold: POSITIVITY_THRESHOLD,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecheckError {
    #[error("constraint table differs from the Hardy zero patterns")]
    ConstraintTable,
    #[error("strategy partition is wrong: {0}")]
    Partition(String),
    #[error("a surviving strategy produces the target event: {0}")]
    TargetReachable(String),
    #[error("deduction step {index} is invalid: {reason}")]
    Step { index: usize, reason: String },
    #[error("quantum witness {probability:e} does not exceed {threshold:e}")]
    Witness { probability: f64, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecheckSummary {
    pub strategies_checked: usize,
    pub survivors: usize,
    pub steps_checked: usize,
    pub witness_probability: f64,
}

/// Re-verifies a certificate from first principles.
///
/// The checker carries its own copy of the forbidden patterns and enumerates
/// strategies with plain nested loops, so it shares no code path with
/// [`nogo_certificate`] beyond the data types.
pub fn recheck(cert: &NoGoCertificate) -> Result<RecheckSummary, RecheckError> {
    // (left setting, right setting, left outcome is '+', right outcome is '+')
    const RAW: [(u8, u8, bool, bool); 3] = [(1, 2, false, false), (2, 2, false, true), (2, 1, true, true)];

    let raw_of = |c: &ZeroConstraint| {
        (
            c.settings.left.number(),
            c.settings.right.number(),
            c.forbidden.left == Outcome::Plus,
            c.forbidden.right == Outcome::Plus,
        )
    };
    if cert.constraints.len() != RAW.len() || cert.constraints.iter().map(raw_of).ne(RAW.iter().copied()) {
        return Err(RecheckError::ConstraintTable);
    }

    // values indexed [side][setting - 1], true meaning '+'
    let violates = |v: [[bool; 2]; 2], (ls, rs, lp, rp): (u8, u8, bool, bool)| {
        v[0][ls as usize - 1] == lp && v[1][rs as usize - 1] == rp
    };
    let to_values = |s: &DeterministicStrategy| {
        let p = |o: Outcome| o == Outcome::Plus;
        [[p(s.l1), p(s.l2)], [p(s.r1), p(s.r2)]]
    };

    let mut expected_survivors = BTreeSet::new();
    let mut expected_eliminated = BTreeSet::new();
    let mut total = 0;
    for l1 in [true, false] {
        for l2 in [true, false] {
            for r1 in [true, false] {
                for r2 in [true, false] {
                    total += 1;
                    let v = [[l1, l2], [r1, r2]];
                    let violated: Vec<usize> = (0..RAW.len()).filter(|&i| violates(v, RAW[i])).collect();
                    if violated.is_empty() {
                        expected_survivors.insert(v);
                    } else {
                        expected_eliminated.insert((v, violated));
                    }
                }
            }
        }
    }

    if cert.strategy_count != total {
        return Err(RecheckError::Partition(format!(
            "claims {} strategies, expected {total}",
            cert.strategy_count
        )));
    }
    let claimed_survivors: BTreeSet<_> = cert.survivors.iter().map(to_values).collect();
    if claimed_survivors.len() != cert.survivors.len() || claimed_survivors != expected_survivors {
        return Err(RecheckError::Partition("survivor list does not match enumeration".into()));
    }
    let claimed_eliminated: BTreeSet<_> = cert
        .eliminated
        .iter()
        .map(|e| (to_values(&e.strategy), e.violated.clone()))
        .collect();
    if claimed_eliminated.len() != cert.eliminated.len() || claimed_eliminated != expected_eliminated {
        return Err(RecheckError::Partition(
            "eliminated strategies or their cited constraints do not match".into(),
        ));
    }

    // target 11−+ means L1 = '-' and R1 = '+'
    if let Some(v) = expected_survivors.iter().find(|v| !v[0][0] && v[1][0]) {
        return Err(RecheckError::TargetReachable(format!("{v:?}")));
    }
    if !cert.survivors_reaching_target.is_empty() {
        return Err(RecheckError::TargetReachable("certificate lists target-reaching survivors".into()));
    }

    let lit_raw = |l: &Literal| (l.side, l.setting.number(), l.outcome == Outcome::Plus);
    let step_err = |index: usize, reason: &str| RecheckError::Step {
        index,
        reason: reason.to_string(),
    };
    if cert.chain.is_empty() {
        return Err(step_err(0, "empty chain"));
    }
    if lit_raw(&cert.chain[0].premise) != (Side::Left, 1, false) {
        return Err(step_err(0, "chain must start from L1-"));
    }
    for (i, step) in cert.chain.iter().enumerate() {
        let Some(&(ls, rs, lp, rp)) = RAW.get(step.constraint) else {
            return Err(step_err(i, "cites an unknown constraint"));
        };
        let (pside, pset, pplus) = lit_raw(&step.premise);
        let (cside, cset, cplus) = lit_raw(&step.conclusion);
        if pside == cside {
            return Err(step_err(i, "premise and conclusion on the same side"));
        }
        let (premise_pattern, conclusion_pattern) = match pside {
            Side::Left => ((ls, lp), (rs, rp)),
            Side::Right => ((rs, rp), (ls, lp)),
        };
        if (pset, pplus) != premise_pattern {
            return Err(step_err(i, "premise does not match the cited forbidden pattern"));
        }
        if (cset, cplus) != (conclusion_pattern.0, !conclusion_pattern.1) {
            return Err(step_err(i, "conclusion is not the negation of the forbidden partner"));
        }
        if i > 0 && cert.chain[i - 1].conclusion != step.premise {
            return Err(step_err(i, "premise does not follow from the previous step"));
        }
    }
    let last = cert.chain.last().map(|s| lit_raw(&s.conclusion));
    if lit_raw(&cert.contradicts) != (Side::Right, 1, true) || last != Some((Side::Right, 1, false)) {
        return Err(step_err(cert.chain.len(), "chain does not end in R1- against R1+"));
    }

    let w = &cert.quantum_witness;
    let witness_ok = w.settings == TARGET_SETTINGS
        && w.outcomes == TARGET_OUTCOMES
        && w.probability.is_finite()
        && w.probability > w.threshold
        && w.threshold >= POSITIVITY_THRESHOLD;
    if !witness_ok {
        return Err(RecheckError::Witness {
            probability: w.probability,
            threshold: w.threshold,
        });
    }

    Ok(RecheckSummary {
        strategies_checked: total,
        survivors: expected_survivors.len(),
        steps_checked: cert.chain.len(),
        witness_probability: w.probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Outcome::{Minus as M, Plus as P};

    fn strat(l1: Outcome, l2: Outcome, r1: Outcome, r2: Outcome) -> DeterministicStrategy {
        DeterministicStrategy { l1, l2, r1, r2 }
    }

    #[test]
    fn enumeration_order_and_uniqueness() {
        let all = enumerate_strategies();
        assert_eq!(all.len(), 16);
        assert_eq!(all[0], strat(P, P, P, P));
        assert_eq!(all[15], strat(M, M, M, M));
        let unique: BTreeSet<_> = all.iter().collect();
        assert_eq!(unique.len(), 16);
        for (i, s) in all.iter().enumerate() {
            assert_eq!(s.index(), i);
        }
    }

    #[test]
    fn feasibility_examples() {
        let constraints = hardy_zero_constraints();
        let s = strat(M, P, P, P);
        assert!(!constraints[0].violated_by(&s));
        assert!(!constraints[1].violated_by(&s));
        assert!(constraints[2].violated_by(&s));
        assert!(feasible_strategies().contains(&strat(P, P, M, P)));
    }

    #[test]
    fn chain_follows_the_three_zeros_in_order() {
        let cert = nogo_certificate();
        let rendered: Vec<String> = cert
            .chain
            .iter()
            .map(|s| format!("{}->{}#{}", s.premise, s.conclusion, s.constraint))
            .collect();
        assert_eq!(rendered, ["L1-->R2+#0", "R2+->L2+#1", "L2+->R1-#2"]);
        assert_eq!(cert.contradicts.to_string(), "R1+");
    }

    #[test]
    fn deduction_fails_without_a_link() {
        let mut constraints = hardy_zero_constraints();
        constraints.remove(1);
        let start = Literal::new(Side::Left, Setting::One, M);
        let goal = Literal::new(Side::Right, Setting::One, M);
        assert!(deduction_chain(&constraints, start, goal).is_none());
    }

    #[test]
    fn recheck_accepts_genuine_certificate() {
        let summary = recheck(&nogo_certificate()).unwrap();
        assert_eq!(summary.strategies_checked, 16);
        assert_eq!(summary.survivors, 5);
        assert_eq!(summary.steps_checked, 3);
    }

    #[test]
    fn recheck_rejects_tampering() {
        let good = nogo_certificate();

        let mut bad = good.clone();
        let moved = bad.eliminated.pop().unwrap();
        bad.survivors.push(moved.strategy);
        assert!(matches!(recheck(&bad), Err(RecheckError::Partition(_))));

        let mut bad = good.clone();
        bad.eliminated[0].violated = vec![1];
        assert!(recheck(&bad).is_err());

        let mut bad = good.clone();
        bad.chain[1].constraint = 2;
        assert!(matches!(recheck(&bad), Err(RecheckError::Step { index: 1, .. })));

        let mut bad = good.clone();
        bad.chain.pop();
        assert!(matches!(recheck(&bad), Err(RecheckError::Step { .. })));

        let mut bad = good.clone();
        bad.constraints.swap(0, 1);
        assert_eq!(recheck(&bad), Err(RecheckError::ConstraintTable));

        let mut bad = good;
        bad.quantum_witness.probability = 0.0;
        assert!(matches!(recheck(&bad), Err(RecheckError::Witness { .. })));
    }

    #[test]
    fn mirrored_is_an_involution() {
        for s in enumerate_strategies() {
            assert_eq!(s.mirrored().mirrored(), s);
        }
        for c in hardy_zero_constraints() {
            assert_eq!(c.mirrored().mirrored(), c);
        }
    }
}
