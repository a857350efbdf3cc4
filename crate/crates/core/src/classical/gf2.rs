//! Perfect play as a linear system over GF(2).
//!
//! With answers encoded as bits (`+1 -> 0`, `-1 -> 1`) a predicate
//! `prod v = sign` becomes `xor v = bit(sign)`. Elimination tracks which
//! original equations were combined into each row, so an inconsistent row
//! `0 = 1` yields the subset of predicates whose product reads `1 = -1`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ensure_valid, ClassicalError, DeterministicStrategy};
use crate::games::{contextual_variables, ContextualVariable, Game, Party};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub(crate) struct BitRow(Vec<u64>);

impl BitRow {
    pub(crate) fn zeros(len: usize) -> Self {
        BitRow(vec![0; len.div_ceil(64)])
    }

    pub(crate) fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn toggle(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }

    pub(crate) fn xor_with(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub(crate) fn count_ones(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    pub(crate) fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| wi * 64 + b)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub predicate: String,
    pub(crate) row: BitRow,
    pub rhs: bool,
}

impl Equation {
    /// Indices of the variables in this equation.
    pub fn support(&self) -> Vec<usize> {
        self.row.ones().collect()
    }
}

/// One equation per predicate over the contextual variables of both
/// players (Alice's first, each in canonical order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParitySystem {
    pub variables: Vec<ContextualVariable>,
    pub equations: Vec<Equation>,
}

impl ParitySystem {
    pub fn variable_index(&self, var: &ContextualVariable) -> Option<usize> {
        self.variables.iter().position(|v| v == var)
    }

    fn subset(&self, ids: &[String]) -> Result<Vec<&Equation>, ClassicalError> {
        ids.iter()
            .map(|id| {
                self.equations
                    .iter()
                    .find(|e| &e.predicate == id)
                    .ok_or_else(|| ClassicalError::UnknownPredicate(id.clone()))
            })
            .collect()
    }
}

pub fn build_parity_system(game: &Game) -> Result<ParitySystem, ClassicalError> {
    ensure_valid(game)?;
    let mut variables = contextual_variables(game, Party::Alice);
    variables.extend(contextual_variables(game, Party::Bob));
    let index: HashMap<&ContextualVariable, usize> =
        variables.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut equations = Vec::with_capacity(game.predicate_count());
    for pair in &game.pairs {
        for pred in &pair.predicates {
            let mut row = BitRow::zeros(variables.len());
            for f in &pred.factors {
                let var = game
                    .variable_for(pair, f)
                    .expect("validated games only reference asked observables");
                row.toggle(index[&var]);
            }
            equations.push(Equation {
                predicate: pred.id.clone(),
                row,
                rhs: pred.sign.bit() == 1,
            });
        }
    }
    Ok(ParitySystem {
        variables,
        equations,
    })
}

/// Predicates whose product forces `+1 = -1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfeasibilityCertificate {
    pub predicates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible {
        alice: DeterministicStrategy,
        bob: DeterministicStrategy,
    },
    Infeasible(InfeasibilityCertificate),
}

enum Solved {
    Solution(Vec<bool>),
    /// Equation indices combining to `0 = 1`.
    Contradiction(Vec<usize>),
}

/// Gauss-Jordan elimination with combination tracking. Free variables are 0.
fn solve(nvars: usize, equations: &[(&BitRow, bool)]) -> Solved {
    let neq = equations.len();
    let mut rows: Vec<(BitRow, bool, BitRow)> = equations
        .iter()
        .enumerate()
        .map(|(i, (row, rhs))| {
            let mut combo = BitRow::zeros(neq);
            combo.toggle(i);
            ((*row).clone(), *rhs, combo)
        })
        .collect();

    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..nvars {
        let Some(found) = (next..rows.len()).find(|&r| rows[r].0.get(col)) else {
            continue;
        };
        rows.swap(next, found);
        let (prow, prhs, pcombo) = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.0.get(col) {
                row.0.xor_with(&prow);
                row.1 ^= prhs;
                row.2.xor_with(&pcombo);
            }
        }
        pivots.push((next, col));
        next += 1;
    }

    let contradiction = rows[next..]
        .iter()
        .filter(|(row, rhs, _)| *rhs && row.is_zero())
        .min_by_key(|(_, _, combo)| combo.count_ones());
    if let Some((_, _, combo)) = contradiction {
        return Solved::Contradiction(combo.ones().collect());
    }
    let mut solution = vec![false; nvars];
    for (r, col) in pivots {
        solution[col] = rows[r].1;
    }
    Solved::Solution(solution)
}

/// Decides whether some deterministic strategy pair wins every round.
pub fn perfect_feasibility(game: &Game) -> Result<Feasibility, ClassicalError> {
    let sys = build_parity_system(game)?;
    let eqs: Vec<(&BitRow, bool)> = sys.equations.iter().map(|e| (&e.row, e.rhs)).collect();
    match solve(sys.variables.len(), &eqs) {
        Solved::Solution(bits) => {
            let na = contextual_variables(game, Party::Alice).len();
            Ok(Feasibility::Feasible {
                alice: DeterministicStrategy::new(game, Party::Alice, bits[..na].to_vec())?,
                bob: DeterministicStrategy::new(game, Party::Bob, bits[na..].to_vec())?,
            })
        }
        Solved::Contradiction(idx) => Ok(Feasibility::Infeasible(InfeasibilityCertificate {
            predicates: idx
                .into_iter()
                .map(|i| sys.equations[i].predicate.clone())
                .collect(),
        })),
    }
}

/// Re-checks a certificate straight from the game's predicates: every
/// contextual variable must occur an even number of times across the listed
/// predicates and the number of `-1` signs must be odd.
pub fn verify_certificate(game: &Game, cert: &InfeasibilityCertificate) -> bool {
    if cert.predicates.is_empty() {
        return false;
    }
    let mut occurrences: HashMap<ContextualVariable, usize> = HashMap::new();
    let mut minus = 0usize;
    for id in &cert.predicates {
        if cert.predicates.iter().filter(|other| *other == id).count() != 1 {
            return false;
        }
        let Some((pi, pred)) = game.find_predicate(id) else {
            return false;
        };
        let pair = &game.pairs[pi];
        for f in &pred.factors {
            let Some(var) = game.variable_for(pair, f) else {
                return false;
            };
            *occurrences.entry(var).or_default() += 1;
        }
        if pred.sign.value() < 0 {
            minus += 1;
        }
    }
    occurrences.values().all(|n| n % 2 == 0) && minus % 2 == 1
}

/// Whether the listed predicates alone force `a` and `b` to carry the same
/// answer, tested by adding `a xor b = 1` and looking for a contradiction.
pub fn implied_equality(
    game: &Game,
    predicate_ids: &[String],
    a: &ContextualVariable,
    b: &ContextualVariable,
) -> Result<bool, ClassicalError> {
    let sys = build_parity_system(game)?;
    let ia = sys
        .variable_index(a)
        .ok_or_else(|| ClassicalError::UnknownVariable(a.to_string()))?;
    let ib = sys
        .variable_index(b)
        .ok_or_else(|| ClassicalError::UnknownVariable(b.to_string()))?;
    if a.party != b.party || a.observable != b.observable {
        return Err(ClassicalError::IncomparableVariables(
            a.to_string(),
            b.to_string(),
        ));
    }
    let subset = sys.subset(predicate_ids)?;
    let mut eqs: Vec<(&BitRow, bool)> = subset.iter().map(|e| (&e.row, e.rhs)).collect();
    if let Solved::Contradiction(_) = solve(sys.variables.len(), &eqs) {
        return Err(ClassicalError::SubsetInfeasible);
    }
    if ia == ib {
        return Ok(true);
    }
    let mut differ = BitRow::zeros(sys.variables.len());
    differ.toggle(ia);
    differ.toggle(ib);
    eqs.push((&differ, true));
    Ok(matches!(
        solve(sys.variables.len(), &eqs),
        Solved::Contradiction(_)
    ))
}
