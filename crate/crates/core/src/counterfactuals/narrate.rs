//! Tense-structured renderings of propositions and verdicts.
//!
//! A frame changes only the prose: which station's events are described as
//! earlier. The structured payload is identical in every frame.

use serde::{Deserialize, Serialize};

use super::{CounterfactualQuery, PropositionSchema, Run, Verdict, VerdictKind};
use crate::hardy::{Literal, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// Events on the left happen first.
    LeftFirst,
    /// Events on the right happen first.
    RightFirst,
    Atemporal,
}

impl Frame {
    pub const ALL: [Frame; 3] = [Frame::LeftFirst, Frame::RightFirst, Frame::Atemporal];

    fn when(self, side: Side) -> &'static str {
        match (self, side) {
            (Frame::Atemporal, _) => "",
            (Frame::LeftFirst, Side::Left) | (Frame::RightFirst, Side::Right) => "earlier ",
            _ => "later ",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NarrationPayload {
    Proposition {
        schema: PropositionSchema,
    },
    Verdict {
        grounding: Literal,
        query: CounterfactualQuery,
        verdict: VerdictKind,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Narration {
    pub frame: Frame,
    pub payload: NarrationPayload,
    pub text: String,
}

fn letter(side: Side) -> char {
    side.letter()
}

pub fn narrate_proposition(schema: &PropositionSchema, frame: Frame) -> Narration {
    let left = format!(
        "L{}{}",
        schema.left_setting(),
        schema
            .left_outcome()
            .map(|o| format!(" with result {o}"))
            .unwrap_or_default()
    );
    let (rs, ro, alt, claimed) = (
        schema.right_setting(),
        schema.right_outcome(),
        schema.alternative_right(),
        schema.claimed(),
    );
    let text = match frame {
        Frame::Atemporal => format!(
            "Left choice {left}. On the right, R{rs} is measured with result {ro}. \
             Counterfactually, R{alt} measured on the right instead yields {claimed}."
        ),
        Frame::LeftFirst => format!(
            "The left choice was {left}, made first. Later on the right, R{rs} is measured with result {ro}. \
             Counterfactually, R{alt} done later on the right instead would have to yield {claimed}."
        ),
        Frame::RightFirst => format!(
            "The left choice is {left}, made afterwards. Earlier on the right, R{rs} was measured with result {ro}. \
             Counterfactually, R{alt} done earlier on the right instead would necessarily have yielded {claimed}."
        ),
    };
    Narration {
        frame,
        payload: NarrationPayload::Proposition { schema: *schema },
        text,
    }
}

pub fn narrate_verdict(actual: &Run, query: CounterfactualQuery, verdict: &Verdict, frame: Frame) -> Narration {
    let far = query.side.other();
    let grounding = actual.record(far);
    let result = match verdict.kind {
        VerdictKind::NecessarilyPlus => "would necessarily have been +".to_string(),
        VerdictKind::NecessarilyMinus => "would necessarily have been -".to_string(),
        VerdictKind::Undetermined => "is not fixed by the actual record: both + and - remain possible".to_string(),
        VerdictKind::Inconsistent => "has no possible world consistent with the actual record".to_string(),
    };
    let text = match frame {
        Frame::Atemporal => format!(
            "Given {grounding} on the {far}, had {}{} been measured on the {} instead, the result {result}.",
            letter(query.side),
            query.alternative,
            query.side,
        ),
        _ => format!(
            "{}{} was measured {}on the {far} and gave {}; had {}{} instead been done {}on the {}, the result {result}.",
            letter(far),
            grounding.setting,
            frame.when(far),
            grounding.outcome,
            letter(query.side),
            query.alternative,
            frame.when(query.side),
            query.side,
        ),
    };
    Narration {
        frame,
        payload: NarrationPayload::Verdict {
            grounding,
            query,
            verdict: verdict.kind,
        },
        text,
    }
}
