//! Detection of chained implications that silently switch experiments.
//!
//! Each Hardy implication holds only under its own setting pair. Composing
//! two of them as though they described one experiment is unsound whenever
//! their contexts differ.

use serde::Serialize;

use super::{Run, POSSIBILITY_TOLERANCE};
use crate::hardy::{HardyState, Implication, Literal, SettingPair, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ContextSwitch {
    /// Switch between chain entries `position` and `position + 1`.
    pub position: usize,
    pub from: SettingPair,
    pub to: SettingPair,
    pub left_changed: bool,
    pub right_changed: bool,
}

/// The conclusion the chain would license if composition were valid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComposedConclusion {
    pub antecedent: Literal,
    pub consequent: Literal,
    /// The single experiment in which the composed claim could be tested;
    /// `None` when both literals sit on the same side.
    pub context: Option<SettingPair>,
    /// Possible runs in `context` where the antecedent holds and the
    /// consequent fails.
    pub counterexamples: Vec<Run>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextMixingReport {
    pub chain: Vec<Implication>,
    pub switches: Vec<ContextSwitch>,
    /// Positions where an entry's consequent is not the next antecedent.
    pub broken_links: Vec<usize>,
    pub composed: Option<ComposedConclusion>,
    /// True when every step is evaluated in one and the same experiment.
    pub valid: bool,
}

pub fn detect_context_mixing(state: &HardyState, chain: &[Implication]) -> ContextMixingReport {
    let mut switches = Vec::new();
    let mut broken_links = Vec::new();
    for (position, pair) in chain.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        if a.context != b.context {
            switches.push(ContextSwitch {
                position,
                from: a.context,
                to: b.context,
                left_changed: a.context.left != b.context.left,
                right_changed: a.context.right != b.context.right,
            });
        }
        if a.consequent != b.antecedent {
            broken_links.push(position);
        }
    }

    let composed = match (chain.first(), chain.last()) {
        (Some(first), Some(last)) if chain.len() >= 2 && broken_links.is_empty() => {
            Some(compose(state, first.antecedent, last.consequent))
        }
        _ => None,
    };

    ContextMixingReport {
        chain: chain.to_vec(),
        valid: switches.is_empty() && broken_links.is_empty(),
        switches,
        broken_links,
        composed,
    }
}

fn compose(state: &HardyState, antecedent: Literal, consequent: Literal) -> ComposedConclusion {
    if antecedent.side == consequent.side {
        return ComposedConclusion {
            antecedent,
            consequent,
            context: None,
            counterexamples: Vec::new(),
            holds: antecedent.setting != consequent.setting || antecedent.outcome == consequent.outcome,
        };
    }
    let context = SettingPair::new(antecedent.setting, antecedent.setting)
        .with(consequent.side, consequent.setting);
    let mut counter = crate::hardy::OutcomePair::new(antecedent.outcome, antecedent.outcome);
    let failed = consequent.negated();
    match failed.side {
        Side::Left => counter.left = failed.outcome,
        Side::Right => counter.right = failed.outcome,
    }
    let run = Run::weighted(state, context, counter);
    let counterexamples: Vec<Run> = [run].into_iter().filter(|r| r.weight > POSSIBILITY_TOLERANCE).collect();
    ComposedConclusion {
        antecedent,
        consequent,
        context: Some(context),
        holds: counterexamples.is_empty(),
        counterexamples,
    }
}
