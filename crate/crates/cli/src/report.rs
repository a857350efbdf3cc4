//! JSON schemas printed by `--format json`. Every command wraps its payload
//! in a [`Report`].

use ptlab_core::classical::{EvaluationReport, InfeasibilityCertificate};
use ptlab_core::quantum::{MatchTally, RoundDistribution, StabilizerReport};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    /// Arguments after the program name, space-joined.
    pub command: String,
    pub game: Option<String>,
    pub version: String,
    pub wall_time_ms: f64,
    pub result: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSummary {
    pub name: String,
    pub pairs: usize,
    pub predicates: usize,
    pub alice_variables: usize,
    pub bob_variables: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub valid: bool,
    pub summary: GameSummary,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub alice: String,
    pub bob: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ClassicalResult {
    Optimal(OptimalResult),
    Noncontextual(OptimalResult),
    Feasibility(FeasibilityResult),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalResult {
    /// Over the common denominator of the weights, e.g. "26/28".
    pub value: String,
    /// Lowest terms.
    pub reduced: String,
    pub wins: usize,
    pub witness: Witness,
    pub evaluation: EvaluationReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum FeasibilityResult {
    Feasible { witness: Witness },
    Infeasible { certificate: InfeasibilityCertificate },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "lowercase")]
pub enum QuantumResult {
    Verify(StabilizerReport),
    Value { value: f64 },
    Distribution(RoundDistribution),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayResult {
    pub strategy: String,
    pub win_rate: Option<f64>,
    pub tally: MatchTally,
}
