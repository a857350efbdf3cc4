//! The entangled strategy: two photons sharing a state entangled in
//! polarization and path, six ±1 observables per photon.
//!
//! Basis order of the 16-dimensional space is (photon 1 polarization,
//! photon 1 path, photon 2 polarization, photon 2 path) with `H = 0, V = 1`
//! and `u = 0, d = 1`. Alice holds photon 1, Bob photon 2. A joint
//! measurement of commuting observables is the product of their projectors.

mod sampling;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{apply, expectation, projector, tensor, AlgebraError, Complex, Matrix, StateVector, TOLERANCE};
use crate::games::{Game, ObservableId, Party, QuestionPair};

pub use sampling::{play_match, sample_round, MatchRng, MatchStrategy, MatchTally, PairTally, ROUNDS_PER_STREAM};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("no operator for {0}")]
    MissingOperator(String),
    #[error("operator for {observable} is {got}x{got}, expected {expected}x{expected}")]
    OperatorDimension {
        observable: String,
        expected: usize,
        got: usize,
    },
    #[error("state dimension {state} does not match operator dimensions {alice}x{bob}")]
    StateDimension { state: usize, alice: usize, bob: usize },
    #[error("observables {0} and {1} do not commute")]
    NonCommuting(String, String),
    #[error("no pair with index {0}")]
    UnknownPair(usize),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("strategy has no answer for {0}")]
    MissingAnswer(String),
}

/// Shared state plus one local operator per (party, observable label).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSetup {
    state: StateVector,
    operators: BTreeMap<(Party, String), Matrix>,
    alice_dim: usize,
    bob_dim: usize,
}

impl QuantumSetup {
    /// Checks that every operator is a Hermitian involution, all operators
    /// of one party share a dimension, and the state lives on their product.
    pub fn new(
        state: StateVector,
        operators: BTreeMap<(Party, String), Matrix>,
    ) -> Result<Self, QuantumError> {
        let mut dims = [None, None];
        for ((party, label), op) in &operators {
            let name = ObservableId::new(*party, label.clone()).to_string();
            op.check_observable()?;
            let slot = &mut dims[(*party == Party::Bob) as usize];
            match *slot {
                None => *slot = Some(op.rows()),
                Some(d) if d != op.rows() => {
                    return Err(QuantumError::OperatorDimension {
                        observable: name,
                        expected: d,
                        got: op.rows(),
                    })
                }
                Some(_) => {}
            }
        }
        let alice_dim = dims[0].unwrap_or(1);
        let bob_dim = dims[1].unwrap_or(1);
        if state.dim() != alice_dim * bob_dim {
            return Err(QuantumError::StateDimension {
                state: state.dim(),
                alice: alice_dim,
                bob: bob_dim,
            });
        }
        Ok(QuantumSetup {
            state,
            operators,
            alice_dim,
            bob_dim,
        })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn local(&self, obs: &ObservableId) -> Option<&Matrix> {
        self.operators.get(&(obs.party, obs.label.clone()))
    }

    /// The observable acting on the full space.
    pub fn lifted(&self, obs: &ObservableId) -> Result<Matrix, QuantumError> {
        let op = self
            .local(obs)
            .ok_or_else(|| QuantumError::MissingOperator(obs.to_string()))?;
        Ok(match obs.party {
            Party::Alice => tensor(op, &Matrix::identity(self.bob_dim)),
            Party::Bob => tensor(&Matrix::identity(self.alice_dim), op),
        })
    }

    /// Every question of `game` must ask two commuting observables that the
    /// setup defines.
    pub fn check_game(&self, game: &Game) -> Result<(), QuantumError> {
        for q in &game.questions {
            let a = ObservableId::new(q.party, q.first.clone());
            let b = ObservableId::new(q.party, q.second.clone());
            let oa = self.local(&a).ok_or_else(|| QuantumError::MissingOperator(a.to_string()))?;
            let ob = self.local(&b).ok_or_else(|| QuantumError::MissingOperator(b.to_string()))?;
            if oa.commutator_norm(ob)? > TOLERANCE {
                return Err(QuantumError::NonCommuting(a.to_string(), b.to_string()));
            }
        }
        Ok(())
    }
}

/// `½(|Hu,Hu⟩ + |Hd,Hd⟩ + |Vu,Vu⟩ − |Vd,Vd⟩)`.
pub fn bell_like_state() -> StateVector {
    let mut amps = vec![Complex::ZERO; 16];
    let index = |pol1: usize, path1: usize, pol2: usize, path2: usize| {
        pol1 * 8 + path1 * 4 + pol2 * 2 + path2
    };
    amps[index(0, 0, 0, 0)] = Complex::real(0.5);
    amps[index(0, 1, 0, 1)] = Complex::real(0.5);
    amps[index(1, 0, 1, 0)] = Complex::real(0.5);
    amps[index(1, 1, 1, 1)] = Complex::real(-0.5);
    StateVector::new(amps).expect("normalized")
}

/// Polarization observables `X, Y, Z` act on the first factor of a photon,
/// path observables `x, y, z` on the second; same definitions for both.
pub fn builtin_setup() -> QuantumSetup {
    let i2 = Matrix::identity(2);
    let paulis = [
        ("X", Matrix::pauli_x()),
        ("Y", Matrix::pauli_y()),
        ("Z", Matrix::pauli_z()),
    ];
    let mut operators = BTreeMap::new();
    for party in Party::BOTH {
        for (label, p) in &paulis {
            operators.insert((party, label.to_string()), tensor(p, &i2));
            operators.insert((party, label.to_lowercase()), tensor(&i2, p));
        }
    }
    QuantumSetup::new(bell_like_state(), operators).expect("built-in setup is valid")
}

/// (name, factors, eigenvalue) of the fourteen relations.
const STABILIZERS: [(&str, i8); 14] = [
    ("Z1 Z2", 1),
    ("z1 z2", 1),
    ("X1 X2 z2", 1),
    ("x1 Z2 x2", 1),
    ("X1 z1 X2", 1),
    ("Z1 x1 x2", 1),
    ("Y1 Y2 z2", -1),
    ("y1 Z2 y2", -1),
    ("Y1 z1 Y2", -1),
    ("Z1 y1 y2", -1),
    ("X1 x1 Y2 y2", 1),
    ("X1 y1 Y2 x2", 1),
    ("Y1 x1 X2 y2", 1),
    ("Y1 y1 X2 x2", 1),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerCheck {
    pub relation: String,
    pub eigenvalue: i8,
    /// Max-norm of `(product)|ψ⟩ − eigenvalue·|ψ⟩`; `None` if an operator is missing.
    pub residual: Option<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerReport {
    pub checks: Vec<StabilizerCheck>,
}

impl StabilizerReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn max_residual(&self) -> Option<f64> {
        self.checks
            .iter()
            .map(|c| c.residual)
            .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))
    }
}

fn parse_factor(f: &str) -> ObservableId {
    let (label, digit) = f.split_at(f.len() - 1);
    let party = if digit == "1" { Party::Alice } else { Party::Bob };
    ObservableId::new(party, label)
}

fn relation_residual(setup: &QuantumSetup, relation: &str, eigenvalue: i8) -> Result<f64, QuantumError> {
    let mut product = Matrix::identity(setup.state.dim());
    for f in relation.split_whitespace() {
        product = product.matmul(&setup.lifted(&parse_factor(f))?)?;
    }
    let image = apply(&product, &setup.state)?;
    Ok(image
        .iter()
        .zip(setup.state.amplitudes())
        .map(|(&w, &v)| (w - v.scale(eigenvalue as f64)).abs())
        .fold(0.0, f64::max))
}

/// Checks the fourteen operator relations that make the measured answers
/// satisfy every predicate of the built-in games.
pub fn verify_stabilizers(setup: &QuantumSetup) -> StabilizerReport {
    let checks = STABILIZERS
        .iter()
        .map(|&(relation, eigenvalue)| {
            let residual = relation_residual(setup, relation, eigenvalue).ok();
            StabilizerCheck {
                relation: relation.replace(' ', ""),
                eigenvalue,
                residual,
                holds: residual.is_some_and(|r| r <= TOLERANCE),
            }
        })
        .collect();
    StabilizerReport { checks }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// Alice's two answers then Bob's, in question order.
    pub answers: [i8; 4],
    pub probability: f64,
    pub wins: bool,
}

/// Joint answer distribution for one question pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundDistribution {
    pub pair: String,
    pub observables: [String; 4],
    /// Sixteen outcomes; index bits `a1 a2 b1 b2` with `+1 -> 0`, `-1 -> 1`.
    pub outcomes: Vec<Outcome>,
}

impl RoundDistribution {
    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    pub fn winning_mass(&self) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.wins)
            .map(|o| o.probability)
            .sum()
    }

    pub fn losing_mass(&self) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| !o.wins)
            .map(|o| o.probability)
            .sum()
    }

    /// Marginal probability that answer slot `slot` equals `value`.
    pub fn marginal(&self, slot: usize, value: i8) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.answers[slot] == value)
            .map(|o| o.probability)
            .sum()
    }
}

pub(crate) fn outcome_answers(index: usize) -> [i8; 4] {
    let sign = |bit: usize| if index >> bit & 1 == 1 { -1 } else { 1 };
    [sign(3), sign(2), sign(1), sign(0)]
}

fn asked_observables(game: &Game, pair: &QuestionPair) -> [ObservableId; 4] {
    let a = &game.questions[pair.alice];
    let b = &game.questions[pair.bob];
    [
        ObservableId::new(Party::Alice, a.first.clone()),
        ObservableId::new(Party::Alice, a.second.clone()),
        ObservableId::new(Party::Bob, b.first.clone()),
        ObservableId::new(Party::Bob, b.second.clone()),
    ]
}

/// Whether answers `[a1, a2, b1, b2]` satisfy every predicate of the pair.
pub fn answers_win(game: &Game, pair: &QuestionPair, answers: &[i8; 4]) -> bool {
    let asked = asked_observables(game, pair);
    pair.predicates.iter().all(|pred| {
        pred.is_satisfied_by(|f| {
            asked
                .iter()
                .position(|o| o == f)
                .map_or(0, |i| answers[i])
        })
    })
}

/// Distribution of `(a1, a2, b1, b2)` when both players measure the
/// observables they are asked: `⟨ψ|P(a1) P(a2) P(b1) P(b2)|ψ⟩`.
pub fn round_distribution(
    setup: &QuantumSetup,
    game: &Game,
    pair_index: usize,
) -> Result<RoundDistribution, QuantumError> {
    let pair = game
        .pairs
        .get(pair_index)
        .ok_or(QuantumError::UnknownPair(pair_index))?;
    let asked = asked_observables(game, pair);
    let lifted = asked
        .iter()
        .map(|o| setup.lifted(o))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, j) in [(0, 1), (2, 3)] {
        if lifted[i].commutator_norm(&lifted[j])? > TOLERANCE {
            return Err(QuantumError::NonCommuting(
                asked[i].to_string(),
                asked[j].to_string(),
            ));
        }
    }
    let mut projectors = Vec::with_capacity(4);
    for op in &lifted {
        projectors.push([projector(op, 1)?, projector(op, -1)?]);
    }
    let mut outcomes = Vec::with_capacity(16);
    for index in 0..16 {
        let answers = outcome_answers(index);
        let mut m = Matrix::identity(setup.state.dim());
        for (slot, &a) in answers.iter().enumerate() {
            m = m.matmul(&projectors[slot][(a < 0) as usize])?;
        }
        let p = expectation(&setup.state, &m)?.re;
        outcomes.push(Outcome {
            answers,
            probability: p,
            wins: answers_win(game, pair, &answers),
        });
    }
    Ok(RoundDistribution {
        pair: game.pair_name(pair),
        observables: asked.map(|o| o.to_string()),
        outcomes,
    })
}

/// Weighted probability of winning when both players measure.
pub fn quantum_value(setup: &QuantumSetup, game: &Game) -> Result<f64, QuantumError> {
    crate::games::validate(game).map_err(|v| {
        QuantumError::InvalidGame(v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))
    })?;
    let mut value = 0.0;
    for (i, pair) in game.pairs.iter().enumerate() {
        let w = *pair.weight.numer() as f64 / *pair.weight.denom() as f64;
        value += w * round_distribution(setup, game, i)?.winning_mass();
    }
    Ok(value)
}
