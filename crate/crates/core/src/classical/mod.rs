//! Classical players: deterministic contextual strategies, perfect-play
//! feasibility over GF(2), and exact optimal values.
//!
//! A contextual strategy fixes, for each player, an answer `v(O|c)` for every
//! observable `O` and every companion `c` it can be asked with. Strategies
//! are stored as bit vectors in the canonical order of
//! [`contextual_variables`], bit `b` meaning the answer `(-1)^b`.
//!
//! Mixed strategies are never searched: a mixture's value is a weighted
//! average of deterministic values, so it cannot exceed the best of them.

mod gf2;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fraction::{serde_fraction, Fraction};
use crate::games::{contextual_variables, validate, ContextualVariable, Game, Party, Sign, Violation};

pub use gf2::{
    build_parity_system, implied_equality, perfect_feasibility, verify_certificate, Equation,
    Feasibility, InfeasibilityCertificate, ParitySystem,
};
pub use search::{
    best_response, noncontextual_optimal, optimal_value, optimal_value_with, Optimum,
    SolverConfig, MAX_EXHAUSTIVE_BITS, MAX_SEARCH_VARIABLES,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicalError {
    #[error("invalid game: {}", join_violations(.0))]
    InvalidGame(Vec<Violation>),
    #[error("strategy has no answer for {0}")]
    MissingVariable(String),
    #[error("strategy for {party} has {got} bits, game needs {expected}")]
    StrategyLength {
        party: Party,
        expected: usize,
        got: usize,
    },
    #[error("invalid hex bit vector {0:?}")]
    BadHex(String),
    #[error("unknown predicate id {0}")]
    UnknownPredicate(String),
    #[error("unknown contextual variable {0}")]
    UnknownVariable(String),
    #[error("variables {0} and {1} are not the same observable of the same party")]
    IncomparableVariables(String, String),
    #[error("subset itself infeasible")]
    SubsetInfeasible,
    #[error("variable budget exceeded: {needed} variables, limit {limit}")]
    VariableBudget { needed: usize, limit: usize },
    #[error("weights have no common denominator representable in 64 bits")]
    WeightOverflow,
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub(crate) fn ensure_valid(game: &Game) -> Result<(), ClassicalError> {
    validate(game).map_err(ClassicalError::InvalidGame)
}

/// One player's answers to all of their contextual variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicStrategy {
    party: Party,
    variables: Vec<ContextualVariable>,
    bits: Vec<bool>,
}

impl DeterministicStrategy {
    pub fn new(game: &Game, party: Party, bits: Vec<bool>) -> Result<Self, ClassicalError> {
        let variables = contextual_variables(game, party);
        if bits.len() != variables.len() {
            return Err(ClassicalError::StrategyLength {
                party,
                expected: variables.len(),
                got: bits.len(),
            });
        }
        Ok(DeterministicStrategy {
            party,
            variables,
            bits,
        })
    }

    /// Every answer `+1`.
    pub fn all_plus(game: &Game, party: Party) -> Self {
        Self::from_fn(game, party, |_| Sign::Plus)
    }

    pub fn from_fn(game: &Game, party: Party, mut f: impl FnMut(&ContextualVariable) -> Sign) -> Self {
        let variables = contextual_variables(game, party);
        let bits = variables.iter().map(|v| f(v) == Sign::Minus).collect();
        DeterministicStrategy {
            party,
            variables,
            bits,
        }
    }

    /// Parses a hex bit vector where bit `i` of the number is variable `i`.
    pub fn from_hex(game: &Game, party: Party, hex: &str) -> Result<Self, ClassicalError> {
        let n = contextual_variables(game, party).len();
        let bits = hex_to_bits(hex, n)?;
        Self::new(game, party, bits)
    }

    pub fn party(&self) -> Party {
        self.party
    }

    pub fn variables(&self) -> &[ContextualVariable] {
        &self.variables
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn answer(&self, var: &ContextualVariable) -> Option<Sign> {
        self.variables
            .binary_search(var)
            .ok()
            .map(|i| Sign::from_bit(self.bits[i]))
    }

    pub fn to_hex(&self) -> String {
        bits_to_hex(&self.bits)
    }
}

impl fmt::Display for DeterministicStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .variables
            .iter()
            .zip(&self.bits)
            .map(|(v, &b)| format!("{v}={}", if b { "-1" } else { "+1" }))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// `0x`-prefixed lowercase hex; bit `i` of the number is `bits[i]`.
pub fn bits_to_hex(bits: &[bool]) -> String {
    if bits.is_empty() {
        return "0x0".into();
    }
    let digits: String = bits
        .chunks(4)
        .rev()
        .map(|nib| {
            let v = nib
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, &b)| acc | ((b as u32) << i));
            char::from_digit(v, 16).expect("nibble")
        })
        .collect();
    let trimmed = digits.trim_start_matches('0');
    format!("0x{}", if trimmed.is_empty() { "0" } else { trimmed })
}

pub fn hex_to_bits(hex: &str, len: usize) -> Result<Vec<bool>, ClassicalError> {
    let bad = || ClassicalError::BadHex(hex.to_string());
    let body = hex
        .strip_prefix("0x")
        .or_else(|| hex.strip_prefix("0X"))
        .unwrap_or(hex);
    if body.is_empty() {
        return Err(bad());
    }
    let mut bits = vec![false; len];
    for (pos, c) in body.chars().rev().enumerate() {
        let v = c.to_digit(16).ok_or_else(bad)?;
        for i in 0..4 {
            if v >> i & 1 == 1 {
                let idx = pos * 4 + i;
                if idx >= len {
                    return Err(bad());
                }
                bits[idx] = true;
            }
        }
    }
    Ok(bits)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub pair: String,
    pub satisfied: bool,
    pub failed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub pairs: Vec<PairOutcome>,
    pub failed_predicates: Vec<String>,
    pub wins: usize,
    #[serde(with = "serde_fraction")]
    pub value: Fraction,
}

/// Plays every allowed pair once with both players answering from their
/// strategies and weighs the won pairs.
pub fn evaluate(
    game: &Game,
    alice: &DeterministicStrategy,
    bob: &DeterministicStrategy,
) -> Result<EvaluationReport, ClassicalError> {
    ensure_valid(game)?;
    let strategy = |p: Party| if p == Party::Alice { alice } else { bob };
    let mut pairs = Vec::with_capacity(game.pairs.len());
    let mut failed_predicates = Vec::new();
    let mut wins = 0;
    let mut value = Fraction::from_integer(0);
    for pair in &game.pairs {
        let mut failed = Vec::new();
        for pred in &pair.predicates {
            let mut product = 1i8;
            for f in &pred.factors {
                let var = game
                    .variable_for(pair, f)
                    .expect("validated games only reference asked observables");
                let s = strategy(f.party)
                    .answer(&var)
                    .ok_or_else(|| ClassicalError::MissingVariable(var.to_string()))?;
                product *= s.value();
            }
            if product != pred.sign.value() {
                failed.push(pred.id.clone());
            }
        }
        let satisfied = failed.is_empty();
        if satisfied {
            wins += 1;
            value += pair.weight;
        }
        failed_predicates.extend(failed.iter().cloned());
        pairs.push(PairOutcome {
            pair: game.pair_name(pair),
            satisfied,
            failed,
        });
    }
    Ok(EvaluationReport {
        pairs,
        failed_predicates,
        wins,
        value,
    })
}
