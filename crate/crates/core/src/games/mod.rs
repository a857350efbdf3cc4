//! Two-player parity games with contextual answers.
//!
//! Each player is asked a question naming two of their observables and
//! answers ±1 for each. A question pair wins when every parity predicate
//! attached to it holds, i.e. the product of the named answers equals the
//! predicate's sign.

mod builtin;
mod format;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fraction::{checked_add, format_fraction, Fraction};

pub use builtin::{builtin_full_game, builtin_game, builtin_simple_game, BUILTIN_NAMES};
pub use format::{parse_game, serialize_game, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub const BOTH: [Party; 2] = [Party::Alice, Party::Bob];

    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    /// Subscript used in the conventional notation (`X1` is Alice's `X`).
    pub fn subscript(self) -> char {
        match self {
            Party::Alice => '1',
            Party::Bob => '2',
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObservableId {
    pub party: Party,
    pub label: String,
}

impl ObservableId {
    pub fn new(party: Party, label: impl Into<String>) -> Self {
        ObservableId {
            party,
            label: label.into(),
        }
    }
}

impl fmt::Display for ObservableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.label, self.party.subscript())
    }
}

/// A question asks one party for the values of two of its observables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Question {
    pub party: Party,
    pub first: String,
    pub second: String,
}

impl Question {
    pub fn new(party: Party, first: impl Into<String>, second: impl Into<String>) -> Self {
        Question {
            party,
            first: first.into(),
            second: second.into(),
        }
    }

    /// Concatenated labels, e.g. `Xz`.
    pub fn name(&self) -> String {
        format!("{}{}", self.first, self.second)
    }

    pub fn asks(&self, label: &str) -> bool {
        self.first == label || self.second == label
    }

    /// The observable asked together with `label`.
    pub fn companion(&self, label: &str) -> Option<&str> {
        if self.first == label {
            Some(&self.second)
        } else if self.second == label {
            Some(&self.first)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    /// GF(2) encoding: `+1 -> 0`, `-1 -> 1`.
    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_bit(bit: bool) -> Sign {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_value(v).ok_or_else(|| serde::de::Error::custom("sign must be +1 or -1"))
    }
}

/// Winning condition: the product of the answers to `factors` equals `sign`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub id: String,
    pub sign: Sign,
    pub factors: Vec<ObservableId>,
}

impl Predicate {
    pub fn new(id: impl Into<String>, sign: Sign, factors: Vec<ObservableId>) -> Self {
        Predicate {
            id: id.into(),
            sign,
            factors,
        }
    }

    pub fn is_satisfied_by(&self, mut answer: impl FnMut(&ObservableId) -> i8) -> bool {
        let product: i8 = self.factors.iter().map(&mut answer).product();
        product == self.sign.value()
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self.factors.iter().map(|o| o.to_string()).collect();
        let sign = if self.sign == Sign::Minus { "-" } else { "+" };
        write!(f, "{}: {}1 = {}", self.id, sign, factors.join(" "))
    }
}

/// An allowed (Alice question, Bob question) combination; `alice` and `bob`
/// index into [`Game::questions`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionPair {
    pub alice: usize,
    pub bob: usize,
    pub predicates: Vec<Predicate>,
    pub weight: Fraction,
}

/// A player's answer to `observable` when it is asked alongside `context`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContextualVariable {
    pub party: Party,
    pub observable: String,
    pub context: String,
}

impl fmt::Display for ContextualVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.party.subscript();
        write!(f, "v({}{s}|{}{s})", self.observable, self.context)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    pub name: String,
    pub observables: Vec<ObservableId>,
    pub questions: Vec<Question>,
    pub pairs: Vec<QuestionPair>,
}

impl Game {
    pub fn question_indices(&self, party: Party) -> impl Iterator<Item = usize> + '_ {
        self.questions
            .iter()
            .enumerate()
            .filter(move |(_, q)| q.party == party)
            .map(|(i, _)| i)
    }

    pub fn predicate_count(&self) -> usize {
        self.pairs.iter().map(|p| p.predicates.len()).sum()
    }

    pub fn predicates(&self) -> impl Iterator<Item = (usize, &Predicate)> {
        self.pairs
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.predicates.iter().map(move |pr| (i, pr)))
    }

    pub fn find_predicate(&self, id: &str) -> Option<(usize, &Predicate)> {
        self.predicates().find(|(_, p)| p.id == id)
    }

    pub fn pair_name(&self, pair: &QuestionPair) -> String {
        format!(
            "{}:{}",
            self.questions[pair.alice].name(),
            self.questions[pair.bob].name()
        )
    }

    /// Looks up a pair by its `AliceQ:BobQ` name, e.g. `Xz:Yy`.
    pub fn find_pair(&self, name: &str) -> Option<usize> {
        let (a, b) = name.split_once(':')?;
        self.pairs.iter().position(|p| {
            self.questions[p.alice].name() == a && self.questions[p.bob].name() == b
        })
    }

    /// The question asked of `party` in `pair`.
    pub fn asked(&self, pair: &QuestionPair, party: Party) -> &Question {
        match party {
            Party::Alice => &self.questions[pair.alice],
            Party::Bob => &self.questions[pair.bob],
        }
    }

    /// Contextual variable that answers `factor` in `pair`, if it is asked there.
    pub fn variable_for(&self, pair: &QuestionPair, factor: &ObservableId) -> Option<ContextualVariable> {
        let q = self.asked(pair, factor.party);
        q.companion(&factor.label).map(|ctx| ContextualVariable {
            party: factor.party,
            observable: factor.label.clone(),
            context: ctx.to_string(),
        })
    }

    pub fn labels(&self, party: Party) -> Vec<&str> {
        let mut labels: Vec<&str> = self
            .observables
            .iter()
            .filter(|o| o.party == party)
            .map(|o| o.label.as_str())
            .collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }
}

/// One variable per (observable, companion) occurrence in the party's
/// questions, sorted by observable label then context label.
pub fn contextual_variables(game: &Game, party: Party) -> Vec<ContextualVariable> {
    let mut set = BTreeSet::new();
    for q in game.questions.iter().filter(|q| q.party == party) {
        set.insert((q.first.clone(), q.second.clone()));
        set.insert((q.second.clone(), q.first.clone()));
    }
    set.into_iter()
        .map(|(observable, context)| ContextualVariable {
            party,
            observable,
            context,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateObservable(ObservableId),
    UnknownObservable { question: usize, label: String },
    RepeatedObservableInQuestion(usize),
    QuestionOutOfRange { pair: usize, index: usize },
    WrongParty { pair: usize, party: Party },
    DuplicatePair { first: usize, second: usize },
    EmptyPair(usize),
    TooFewFactors { pair: usize, predicate: String },
    FactorNotAsked { pair: usize, predicate: String, factor: String },
    RepeatedFactor { pair: usize, predicate: String, factor: String },
    DuplicatePredicateId(String),
    WeightsSum(String),
    NoPairs,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateObservable(o) => write!(f, "duplicate observable {o}"),
            Violation::UnknownObservable { question, label } => {
                write!(f, "question {question} uses undeclared observable {label}")
            }
            Violation::RepeatedObservableInQuestion(q) => {
                write!(f, "question {q} asks the same observable twice")
            }
            Violation::QuestionOutOfRange { pair, index } => {
                write!(f, "pair {pair} references missing question {index}")
            }
            Violation::WrongParty { pair, party } => {
                write!(f, "pair {pair}: {party} slot holds a question of the other party")
            }
            Violation::DuplicatePair { first, second } => {
                write!(f, "duplicate pair: pairs {first} and {second} ask the same questions")
            }
            Violation::EmptyPair(p) => write!(f, "pair {p} has no predicates"),
            Violation::TooFewFactors { pair, predicate } => {
                write!(f, "pair {pair}: predicate {predicate} needs at least 2 factors")
            }
            Violation::FactorNotAsked {
                pair,
                predicate,
                factor,
            } => write!(f, "pair {pair}: predicate {predicate}: factor not asked: {factor}"),
            Violation::RepeatedFactor {
                pair,
                predicate,
                factor,
            } => write!(f, "pair {pair}: predicate {predicate} repeats factor {factor}"),
            Violation::DuplicatePredicateId(id) => write!(f, "duplicate predicate id {id}"),
            Violation::WeightsSum(s) => write!(f, "weights sum \u{2260} 1 (sum is {s})"),
            Violation::NoPairs => write!(f, "game has no question pairs"),
        }
    }
}

/// Checks every structural invariant of a game. Never panics.
pub fn validate(game: &Game) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for o in &game.observables {
        if !seen.insert(o) {
            out.push(Violation::DuplicateObservable(o.clone()));
        }
    }

    for (qi, q) in game.questions.iter().enumerate() {
        for label in [&q.first, &q.second] {
            if !game
                .observables
                .iter()
                .any(|o| o.party == q.party && &o.label == label)
            {
                out.push(Violation::UnknownObservable {
                    question: qi,
                    label: label.clone(),
                });
            }
        }
        if q.first == q.second {
            out.push(Violation::RepeatedObservableInQuestion(qi));
        }
    }

    if game.pairs.is_empty() {
        out.push(Violation::NoPairs);
    }

    let mut combos: Vec<((usize, usize), usize)> = Vec::new();
    let mut ids = HashSet::new();
    let mut sum = Some(Fraction::from_integer(0));
    for (pi, pair) in game.pairs.iter().enumerate() {
        sum = sum.and_then(|s| checked_add(&s, &pair.weight));
        let mut in_range = true;
        for (party, idx) in [(Party::Alice, pair.alice), (Party::Bob, pair.bob)] {
            match game.questions.get(idx) {
                None => {
                    in_range = false;
                    out.push(Violation::QuestionOutOfRange { pair: pi, index: idx });
                }
                Some(q) if q.party != party => {
                    in_range = false;
                    out.push(Violation::WrongParty { pair: pi, party });
                }
                Some(_) => {}
            }
        }
        if let Some((_, first)) = combos.iter().find(|(c, _)| *c == (pair.alice, pair.bob)) {
            out.push(Violation::DuplicatePair {
                first: *first,
                second: pi,
            });
        } else {
            combos.push(((pair.alice, pair.bob), pi));
        }
        if pair.predicates.is_empty() {
            out.push(Violation::EmptyPair(pi));
        }
        for pred in &pair.predicates {
            if !ids.insert(pred.id.as_str()) {
                out.push(Violation::DuplicatePredicateId(pred.id.clone()));
            }
            if pred.factors.len() < 2 {
                out.push(Violation::TooFewFactors {
                    pair: pi,
                    predicate: pred.id.clone(),
                });
            }
            let mut fseen = HashSet::new();
            for f in &pred.factors {
                if !fseen.insert(f) {
                    out.push(Violation::RepeatedFactor {
                        pair: pi,
                        predicate: pred.id.clone(),
                        factor: f.to_string(),
                    });
                }
                if in_range && game.variable_for(pair, f).is_none() {
                    out.push(Violation::FactorNotAsked {
                        pair: pi,
                        predicate: pred.id.clone(),
                        factor: f.to_string(),
                    });
                }
            }
        }
    }
    match sum {
        Some(s) if s == Fraction::from_integer(1) => {}
        Some(s) => out.push(Violation::WeightsSum(format_fraction(&s))),
        None => out.push(Violation::WeightsSum("overflow".into())),
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_pair_game(bob_first: &str, bob_second: &str, factor: &str) -> Game {
        let alice = |l: &str| ObservableId::new(Party::Alice, l);
        let bob = |l: &str| ObservableId::new(Party::Bob, l);
        Game {
            name: "tiny".into(),
            observables: vec![alice("X"), alice("z"), bob("X"), bob("z"), bob("x")],
            questions: vec![
                Question::new(Party::Alice, "X", "z"),
                Question::new(Party::Bob, bob_first, bob_second),
            ],
            pairs: vec![QuestionPair {
                alice: 0,
                bob: 1,
                predicates: vec![Predicate::new(
                    "p01",
                    Sign::Plus,
                    vec![alice("X"), bob("X"), bob(factor)],
                )],
                weight: Fraction::from_integer(1),
            }],
        }
    }

    #[test]
    fn tiny_game_valid() {
        validate(&one_pair_game("X", "z", "z")).unwrap();
    }

    #[test]
    fn factor_not_asked() {
        let v = validate(&one_pair_game("X", "x", "z")).unwrap_err();
        assert!(v.iter().any(|v| v.to_string().contains("factor not asked")), "{v:?}");
    }

    #[test]
    fn weights_must_sum_to_one() {
        let mut g = one_pair_game("X", "z", "z");
        let mut second = g.pairs[0].clone();
        second.predicates[0].id = "p02".into();
        g.questions.push(Question::new(Party::Alice, "z", "X"));
        second.alice = 2;
        g.pairs[0].weight = Fraction::new(1, 2);
        second.weight = Fraction::new(1, 3);
        g.pairs.push(second);
        let v = validate(&g).unwrap_err();
        assert_eq!(v, vec![Violation::WeightsSum("5/6".into())]);
        assert!(v[0].to_string().contains("weights sum \u{2260} 1"));
    }

    #[test]
    fn duplicate_pair_reported() {
        let mut g = one_pair_game("X", "z", "z");
        let mut dup = g.pairs[0].clone();
        dup.predicates[0].id = "p02".into();
        g.pairs[0].weight = Fraction::new(1, 2);
        dup.weight = Fraction::new(1, 2);
        g.pairs.push(dup);
        let v = validate(&g).unwrap_err();
        assert_eq!(v, vec![Violation::DuplicatePair { first: 0, second: 1 }]);
    }

    #[test]
    fn single_question_game_has_two_variables_per_party() {
        let g = one_pair_game("X", "z", "z");
        for party in Party::BOTH {
            assert_eq!(contextual_variables(&g, party).len(), 2);
        }
    }

    #[test]
    fn wrong_party_and_out_of_range() {
        let mut g = one_pair_game("X", "z", "z");
        g.pairs[0].alice = 1;
        g.pairs[0].bob = 7;
        let v = validate(&g).unwrap_err();
        assert!(v.contains(&Violation::WrongParty { pair: 0, party: Party::Alice }));
        assert!(v.contains(&Violation::QuestionOutOfRange { pair: 0, index: 7 }));
    }

    #[test]
    fn predicate_satisfaction_is_a_product() {
        let g = one_pair_game("X", "z", "z");
        let p = &g.pairs[0].predicates[0];
        assert!(p.is_satisfied_by(|_| 1));
        assert!(p.is_satisfied_by(|o| if o.party == Party::Bob { -1 } else { 1 }));
        assert!(!p.is_satisfied_by(|o| if o.label == "z" { -1 } else { 1 }));
    }
}
