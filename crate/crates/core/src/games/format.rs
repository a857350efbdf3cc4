//! JSON game files.
//!
//! ```json
//! {
//!   "name": "tiny",
//!   "observables": [{"party": "alice", "label": "X"}, ...],
//!   "questions": [{"party": "alice", "first": "X", "second": "z"}, ...],
//!   "pairs": [{
//!     "alice": 0, "bob": 1,
//!     "predicates": [{"id": "p01", "sign": 1, "factors": [["alice", "X"], ["bob", "X"]]}],
//!     "weight": "1/1"
//!   }]
//! }
//! ```
//!
//! `alice`/`bob` index into `questions`. Predicate ids are optional on input
//! and default to `p01`, `p02`, ... in document order. Unknown keys are
//! rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Game, ObservableId, Party, Predicate, Question, QuestionPair, Sign};
use crate::fraction::{serde_fraction, Fraction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        let full = e.to_string();
        // serde_json appends " at line L column C"; keep the bare message.
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        ParseError {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDoc {
    name: String,
    observables: Vec<ObservableDoc>,
    questions: Vec<QuestionDoc>,
    pairs: Vec<PairDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservableDoc {
    party: Party,
    label: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuestionDoc {
    party: Party,
    first: String,
    second: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    alice: usize,
    bob: usize,
    predicates: Vec<PredicateDoc>,
    #[serde(with = "serde_fraction")]
    weight: Fraction,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PredicateDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    sign: Sign,
    factors: Vec<(Party, String)>,
}

pub fn parse_game(document: &str) -> Result<Game, ParseError> {
    let doc: GameDoc = serde_json::from_str(document)?;
    let mut counter = 0usize;
    let pairs = doc
        .pairs
        .into_iter()
        .map(|p| QuestionPair {
            alice: p.alice,
            bob: p.bob,
            predicates: p
                .predicates
                .into_iter()
                .map(|pr| {
                    counter += 1;
                    Predicate {
                        id: pr.id.unwrap_or_else(|| format!("p{counter:02}")),
                        sign: pr.sign,
                        factors: pr
                            .factors
                            .into_iter()
                            .map(|(party, label)| ObservableId { party, label })
                            .collect(),
                    }
                })
                .collect(),
            weight: p.weight,
        })
        .collect();
    Ok(Game {
        name: doc.name,
        observables: doc
            .observables
            .into_iter()
            .map(|o| ObservableId::new(o.party, o.label))
            .collect(),
        questions: doc
            .questions
            .into_iter()
            .map(|q| Question::new(q.party, q.first, q.second))
            .collect(),
        pairs,
    })
}

/// Canonical pretty-printed JSON; weights in lowest terms, ids always present.
pub fn serialize_game(game: &Game) -> String {
    let doc = GameDoc {
        name: game.name.clone(),
        observables: game
            .observables
            .iter()
            .map(|o| ObservableDoc {
                party: o.party,
                label: o.label.clone(),
            })
            .collect(),
        questions: game
            .questions
            .iter()
            .map(|q| QuestionDoc {
                party: q.party,
                first: q.first.clone(),
                second: q.second.clone(),
            })
            .collect(),
        pairs: game
            .pairs
            .iter()
            .map(|p| PairDoc {
                alice: p.alice,
                bob: p.bob,
                predicates: p
                    .predicates
                    .iter()
                    .map(|pr| PredicateDoc {
                        id: Some(pr.id.clone()),
                        sign: pr.sign,
                        factors: pr
                            .factors
                            .iter()
                            .map(|f| (f.party, f.label.clone()))
                            .collect(),
                    })
                    .collect(),
                weight: p.weight,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("game documents always serialize")
}
