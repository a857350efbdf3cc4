//! The two built-in games.
//!
//! Questions are written as label pairs (`"Xz"` asks for `X` and `z`) and
//! factors as label plus party digit (`"z2"` is Bob's `z`). Every predicate
//! carries the stable id `e01`..`e32` of the parity equation it encodes.

use super::{Game, ObservableId, Party, Predicate, Question, QuestionPair, Sign};
use crate::fraction::Fraction;

pub const BUILTIN_NAMES: [&str; 2] = ["full", "simple"];

const LABELS: [&str; 6] = ["X", "Y", "Z", "x", "y", "z"];

const FULL_QUESTIONS: [&str; 8] = ["Xz", "Zx", "Yz", "Zy", "Xx", "Xy", "Yx", "Yy"];
const SIMPLE_ALICE: [&str; 5] = ["Xz", "Yz", "Zy", "Xx", "Yx"];
const SIMPLE_BOB: [&str; 5] = ["Xz", "Zx", "Yz", "Yy", "Xy"];

/// (id, Alice question, Bob question, sign, factors)
type Row = (&'static str, &'static str, &'static str, i8, &'static str);

#[rustfmt::skip]
const EQUATIONS: [Row; 32] = [
    ("e01", "Xz", "Xz",  1, "X1 X2 z2"),
    ("e02", "Xz", "Xz",  1, "X1 z1 X2"),
    ("e03", "Xz", "Yz",  1, "z1 z2"),
    ("e04", "Xz", "Xy",  1, "X1 z1 X2"),
    ("e05", "Xz", "Xx",  1, "X1 z1 X2"),
    ("e06", "Zx", "Zx",  1, "Z1 x1 x2"),
    ("e07", "Zx", "Zx",  1, "x1 Z2 x2"),
    ("e08", "Zx", "Zy",  1, "Z1 Z2"),
    ("e09", "Zx", "Yx",  1, "Z1 x1 x2"),
    ("e10", "Zx", "Xx",  1, "Z1 x1 x2"),
    ("e11", "Yz", "Xz",  1, "z1 z2"),
    ("e12", "Yz", "Yz", -1, "Y1 Y2 z2"),
    ("e13", "Yz", "Yz", -1, "Y1 z1 Y2"),
    ("e14", "Yz", "Yy", -1, "Y1 z1 Y2"),
    ("e15", "Yz", "Yx", -1, "Y1 z1 Y2"),
    ("e16", "Zy", "Zx",  1, "Z1 Z2"),
    ("e17", "Zy", "Zy", -1, "Z1 y1 y2"),
    ("e18", "Zy", "Zy", -1, "y1 Z2 y2"),
    ("e19", "Zy", "Yy", -1, "Z1 y1 y2"),
    ("e20", "Zy", "Xy", -1, "Z1 y1 y2"),
    ("e21", "Xx", "Xz",  1, "X1 X2 z2"),
    ("e22", "Xx", "Zx",  1, "x1 Z2 x2"),
    ("e23", "Xx", "Yy",  1, "X1 x1 Y2 y2"),
    ("e24", "Xy", "Xz",  1, "X1 X2 z2"),
    ("e25", "Xy", "Zy", -1, "y1 Z2 y2"),
    ("e26", "Xy", "Yx",  1, "X1 y1 Y2 x2"),
    ("e27", "Yx", "Zx",  1, "x1 Z2 x2"),
    ("e28", "Yx", "Yz", -1, "Y1 Y2 z2"),
    ("e29", "Yx", "Xy",  1, "Y1 x1 X2 y2"),
    ("e30", "Yy", "Yz", -1, "Y1 Y2 z2"),
    ("e31", "Yy", "Zy", -1, "y1 Z2 y2"),
    ("e32", "Yy", "Xx",  1, "Y1 y1 X2 x2"),
];

const SIMPLE_IDS: [&str; 16] = [
    "e01", "e02", "e03", "e04", "e11", "e12", "e13", "e14", "e19", "e20", "e21", "e22", "e23",
    "e27", "e28", "e29",
];

/// Eight questions per player, 28 allowed pairs, 32 predicates.
pub fn builtin_full_game() -> Game {
    build(
        "full",
        &FULL_QUESTIONS,
        &FULL_QUESTIONS,
        EQUATIONS.iter().collect(),
    )
}

/// Five questions per player, 14 allowed pairs, 16 predicates, all taken
/// from the full game.
pub fn builtin_simple_game() -> Game {
    build(
        "simple",
        &SIMPLE_ALICE,
        &SIMPLE_BOB,
        EQUATIONS
            .iter()
            .filter(|row| SIMPLE_IDS.contains(&row.0))
            .collect(),
    )
}

pub fn builtin_game(name: &str) -> Option<Game> {
    match name {
        "full" => Some(builtin_full_game()),
        "simple" => Some(builtin_simple_game()),
        _ => None,
    }
}

fn split_question(q: &str) -> (&str, &str) {
    q.split_at(1)
}

fn parse_factor(f: &str) -> ObservableId {
    let (label, digit) = f.split_at(1);
    let party = match digit {
        "1" => Party::Alice,
        "2" => Party::Bob,
        _ => unreachable!("bad built-in factor {f}"),
    };
    ObservableId::new(party, label)
}

fn build(name: &str, alice_qs: &[&str], bob_qs: &[&str], rows: Vec<&Row>) -> Game {
    let observables = Party::BOTH
        .iter()
        .flat_map(|&p| LABELS.iter().map(move |l| ObservableId::new(p, *l)))
        .collect();
    let mut questions = Vec::new();
    for (party, qs) in [(Party::Alice, alice_qs), (Party::Bob, bob_qs)] {
        for q in qs {
            let (a, b) = split_question(q);
            questions.push(Question::new(party, a, b));
        }
    }
    let index = |party: Party, name: &str| {
        questions
            .iter()
            .position(|q: &Question| q.party == party && q.name() == name)
            .expect("built-in question")
    };

    let mut pairs: Vec<QuestionPair> = Vec::new();
    for &&(id, aq, bq, sign, factors) in &rows {
        let alice = index(Party::Alice, aq);
        let bob = index(Party::Bob, bq);
        let pred = Predicate::new(
            id,
            Sign::from_value(sign as i64).expect("built-in sign"),
            factors.split_whitespace().map(parse_factor).collect(),
        );
        match pairs.iter_mut().find(|p| p.alice == alice && p.bob == bob) {
            Some(p) => p.predicates.push(pred),
            None => pairs.push(QuestionPair {
                alice,
                bob,
                predicates: vec![pred],
                weight: Fraction::from_integer(0),
            }),
        }
    }
    pairs.sort_by_key(|p| (p.alice, p.bob));
    let w = Fraction::new(1, pairs.len() as u64);
    for p in &mut pairs {
        p.weight = w;
    }
    Game {
        name: name.to_string(),
        observables,
        questions,
        pairs,
    }
}
