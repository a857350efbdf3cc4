//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export takes a built-in game name and returns a JSON string. The
//! `*_json` functions hold the logic and also build natively for tests.

use ptlab_core::classical::{evaluate, DeterministicStrategy};
use ptlab_core::fraction::{common_denominator, format_over};
use ptlab_core::games::{builtin_game, contextual_variables, Game, Party};
use ptlab_core::quantum::{builtin_setup, round_distribution};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct TableFactor {
    party: Party,
    observable: String,
    /// Index into that party's variable list.
    variable: usize,
}

#[derive(Serialize)]
struct TablePredicate {
    id: String,
    sign: i8,
    factors: Vec<TableFactor>,
}

#[derive(Serialize)]
struct TablePair {
    name: String,
    weight: String,
    predicates: Vec<TablePredicate>,
}

#[derive(Serialize)]
struct GameTable {
    name: String,
    alice: Vec<String>,
    bob: Vec<String>,
    pairs: Vec<TablePair>,
}

#[derive(Serialize)]
struct Evaluation {
    value: String,
    wins: usize,
    failed_predicates: Vec<String>,
    won_pairs: Vec<String>,
}

fn game(name: &str) -> Result<Game, String> {
    builtin_game(name).ok_or_else(|| format!("unknown game {name:?}"))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn game_table_json(name: &str) -> Result<String, String> {
    let g = game(name)?;
    let alice = contextual_variables(&g, Party::Alice);
    let bob = contextual_variables(&g, Party::Bob);
    let mut pairs = Vec::new();
    for pair in &g.pairs {
        let predicates = pair
            .predicates
            .iter()
            .map(|p| TablePredicate {
                id: p.id.clone(),
                sign: p.sign.value(),
                factors: p
                    .factors
                    .iter()
                    .map(|f| {
                        let v = g.variable_for(pair, f).expect("built-in games are valid");
                        let list = if f.party == Party::Alice { &alice } else { &bob };
                        TableFactor {
                            party: f.party,
                            observable: f.to_string(),
                            variable: list.iter().position(|x| *x == v).expect("listed"),
                        }
                    })
                    .collect(),
            })
            .collect();
        pairs.push(TablePair {
            name: g.pair_name(pair),
            weight: format!("{}/{}", pair.weight.numer(), pair.weight.denom()),
            predicates,
        });
    }
    to_json(&GameTable {
        name: g.name.clone(),
        alice: alice.iter().map(|v| v.to_string()).collect(),
        bob: bob.iter().map(|v| v.to_string()).collect(),
        pairs,
    })
}

pub fn evaluate_strategy_json(name: &str, alice_hex: &str, bob_hex: &str) -> Result<String, String> {
    let g = game(name)?;
    let alice = DeterministicStrategy::from_hex(&g, Party::Alice, alice_hex).map_err(|e| e.to_string())?;
    let bob = DeterministicStrategy::from_hex(&g, Party::Bob, bob_hex).map_err(|e| e.to_string())?;
    let report = evaluate(&g, &alice, &bob).map_err(|e| e.to_string())?;
    let den = common_denominator(g.pairs.iter().map(|p| &p.weight)).ok_or("weights overflow")?;
    to_json(&Evaluation {
        value: format_over(&report.value, den),
        wins: report.wins,
        failed_predicates: report.failed_predicates,
        won_pairs: report
            .pairs
            .into_iter()
            .filter(|p| p.satisfied)
            .map(|p| p.pair)
            .collect(),
    })
}

pub fn pair_distribution_json(name: &str, pair: &str) -> Result<String, String> {
    let g = game(name)?;
    let index = g.find_pair(pair).ok_or_else(|| format!("unknown pair {pair:?}"))?;
    let d = round_distribution(&builtin_setup(), &g, index).map_err(|e| e.to_string())?;
    to_json(&d)
}

/// Pairs, predicates and each party's contextual variables.
#[wasm_bindgen]
pub fn game_table(name: &str) -> Result<String, JsError> {
    game_table_json(name).map_err(|e| JsError::new(&e))
}

/// Scores a deterministic strategy given as hex bit vectors.
#[wasm_bindgen]
pub fn evaluate_strategy(name: &str, alice_hex: &str, bob_hex: &str) -> Result<String, JsError> {
    evaluate_strategy_json(name, alice_hex, bob_hex).map_err(|e| JsError::new(&e))
}

/// Outcome probabilities of the entangled strategy on one question pair.
#[wasm_bindgen]
pub fn pair_distribution(name: &str, pair: &str) -> Result<String, JsError> {
    pair_distribution_json(name, pair).map_err(|e| JsError::new(&e))
}
