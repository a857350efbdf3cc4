//! Exact optimal classical values.
//!
//! The joint strategy is a bit vector (Alice's variables, then Bob's). The
//! optimum is found by depth-first branch-and-bound with the bound
//! `won + undecided`, branching on variables in descending order of how many
//! predicates they touch. A second, canonical-order pass then finds the
//! lexicographically smallest strategy reaching that value, so the witness
//! does not depend on search order or thread count.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use super::{ensure_valid, ClassicalError, DeterministicStrategy};
use crate::fraction::{common_denominator, Fraction};
use crate::games::{contextual_variables, ContextualVariable, Game, Party};
use crate::parallel::run_tasks;

/// Largest joint variable count the branch-and-bound accepts.
pub const MAX_SEARCH_VARIABLES: usize = 64;
/// Largest bit count searched by plain enumeration.
pub const MAX_EXHAUSTIVE_BITS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            threads: crate::parallel::default_threads(),
        }
    }
}

impl SolverConfig {
    pub fn single_threaded() -> Self {
        SolverConfig { threads: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub value: Fraction,
    /// Number of won pairs under the witness.
    pub wins: usize,
    pub alice: DeterministicStrategy,
    pub bob: DeterministicStrategy,
}

struct CompiledPair {
    mask: u64,
    predicates: Vec<(u64, u32)>,
    weight: u64,
}

impl CompiledPair {
    fn wins(&self, bits: u64) -> bool {
        self.predicates
            .iter()
            .all(|&(m, rhs)| (bits & m).count_ones() & 1 == rhs)
    }
}

/// The game flattened to masks over the joint bit vector, weights scaled to
/// integers over a common denominator.
struct Compiled {
    nvars: usize,
    nalice: usize,
    pairs: Vec<CompiledPair>,
    denom: u64,
    total: u64,
}

impl Compiled {
    fn new(game: &Game, alice: &[ContextualVariable], bob: &[ContextualVariable]) -> Result<Self, ClassicalError> {
        let nvars = alice.len() + bob.len();
        if nvars > MAX_SEARCH_VARIABLES {
            return Err(ClassicalError::VariableBudget {
                needed: nvars,
                limit: MAX_SEARCH_VARIABLES,
            });
        }
        let denom = common_denominator(game.pairs.iter().map(|p| &p.weight))
            .ok_or(ClassicalError::WeightOverflow)?;
        let index = |v: &ContextualVariable| -> usize {
            match v.party {
                Party::Alice => alice.binary_search(v).expect("alice variable"),
                Party::Bob => alice.len() + bob.binary_search(v).expect("bob variable"),
            }
        };
        let mut pairs = Vec::with_capacity(game.pairs.len());
        let mut total = 0u64;
        for pair in &game.pairs {
            let mut mask = 0u64;
            let mut predicates = Vec::new();
            for pred in &pair.predicates {
                let mut m = 0u64;
                for f in &pred.factors {
                    let var = game
                        .variable_for(pair, f)
                        .expect("validated games only reference asked observables");
                    m ^= 1 << index(&var);
                    mask |= 1 << index(&var);
                }
                predicates.push((m, pred.sign.bit() as u32));
            }
            let weight = pair
                .weight
                .numer()
                .checked_mul(denom / pair.weight.denom())
                .ok_or(ClassicalError::WeightOverflow)?;
            total = total.checked_add(weight).ok_or(ClassicalError::WeightOverflow)?;
            pairs.push(CompiledPair {
                mask,
                predicates,
                weight,
            });
        }
        Ok(Compiled {
            nvars,
            nalice: alice.len(),
            pairs,
            denom,
            total,
        })
    }

    fn score(&self, bits: u64) -> u64 {
        self.pairs
            .iter()
            .filter(|p| p.wins(bits))
            .map(|p| p.weight)
            .sum()
    }

    fn wins(&self, bits: u64) -> usize {
        self.pairs.iter().filter(|p| p.wins(bits)).count()
    }

    fn fraction(&self, score: u64) -> Fraction {
        Fraction::new(score, self.denom)
    }
}

fn bits_of(word: u64, offset: usize, len: usize) -> Vec<bool> {
    (0..len).map(|i| word >> (offset + i) & 1 == 1).collect()
}

/// Search tree over a fixed branching order. `closing[d]` lists the pairs
/// whose last variable is fixed at depth `d`.
struct Tree<'a> {
    game: &'a Compiled,
    order: Vec<usize>,
    closing: Vec<Vec<usize>>,
    /// Weight of pairs touching no variable at all.
    free_won: u64,
}

impl<'a> Tree<'a> {
    fn new(game: &'a Compiled, order: Vec<usize>) -> Self {
        let mut position = vec![0usize; game.nvars];
        for (d, &v) in order.iter().enumerate() {
            position[v] = d;
        }
        let mut closing = vec![Vec::new(); order.len()];
        let mut free_won = 0;
        for (pi, p) in game.pairs.iter().enumerate() {
            if p.mask == 0 {
                if p.wins(0) {
                    free_won += p.weight;
                }
                continue;
            }
            let last = (0..game.nvars)
                .filter(|&v| p.mask >> v & 1 == 1)
                .map(|v| position[v])
                .max()
                .expect("nonempty mask");
            closing[last].push(pi);
        }
        Tree {
            game,
            order,
            closing,
            free_won,
        }
    }

    fn free_decided(&self) -> u64 {
        self.game
            .pairs
            .iter()
            .filter(|p| p.mask == 0)
            .map(|p| p.weight)
            .sum()
    }

    /// Fixes the variables at depths `0..prefix_len` from the bits of
    /// `prefix` (most significant first) and returns (bits, won, decided).
    fn descend(&self, prefix: u64, prefix_len: usize) -> (u64, u64, u64) {
        let mut bits = 0u64;
        let mut won = self.free_won;
        let mut decided = self.free_decided();
        for d in 0..prefix_len {
            if prefix >> (prefix_len - 1 - d) & 1 == 1 {
                bits |= 1 << self.order[d];
            }
            for &pi in &self.closing[d] {
                let p = &self.game.pairs[pi];
                decided += p.weight;
                if p.wins(bits) {
                    won += p.weight;
                }
            }
        }
        (bits, won, decided)
    }

    /// Best-score search; raises `incumbent` whenever a strictly better leaf
    /// is found. Prunes when the bound cannot beat the incumbent.
    fn maximize(&self, depth: usize, bits: u64, won: u64, decided: u64, incumbent: &AtomicU64) {
        if won + (self.game.total - decided) <= incumbent.load(Ordering::Relaxed) {
            return;
        }
        if depth == self.order.len() {
            incumbent.fetch_max(won, Ordering::Relaxed);
            return;
        }
        let var = self.order[depth];
        for b in [0u64, 1] {
            let next = bits | (b << var);
            let (mut w, mut dec) = (won, decided);
            for &pi in &self.closing[depth] {
                let p = &self.game.pairs[pi];
                dec += p.weight;
                if p.wins(next) {
                    w += p.weight;
                }
            }
            self.maximize(depth + 1, next, w, dec, incumbent);
        }
    }

    /// First leaf (0 before 1 at each depth) scoring exactly `target`.
    fn first_reaching(&self, depth: usize, bits: u64, won: u64, decided: u64, target: u64) -> Option<u64> {
        if won + (self.game.total - decided) < target {
            return None;
        }
        if depth == self.order.len() {
            return (won >= target).then_some(bits);
        }
        let var = self.order[depth];
        for b in [0u64, 1] {
            let next = bits | (b << var);
            let (mut w, mut dec) = (won, decided);
            for &pi in &self.closing[depth] {
                let p = &self.game.pairs[pi];
                dec += p.weight;
                if p.wins(next) {
                    w += p.weight;
                }
            }
            if let Some(found) = self.first_reaching(depth + 1, next, w, dec, target) {
                return Some(found);
            }
        }
        None
    }
}

fn split_depth(nvars: usize, threads: usize) -> usize {
    if threads <= 1 {
        0
    } else {
        nvars.min(8)
    }
}

fn best_score(compiled: &Compiled, threads: usize) -> u64 {
    let mut touches = vec![0usize; compiled.nvars];
    for p in &compiled.pairs {
        for &(m, _) in &p.predicates {
            for (v, t) in touches.iter_mut().enumerate() {
                if m >> v & 1 == 1 {
                    *t += 1;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..compiled.nvars).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(touches[v]), v));
    let tree = Tree::new(compiled, order);

    let incumbent = AtomicU64::new(compiled.score(0));
    let depth = split_depth(compiled.nvars, threads);
    run_tasks(threads, 1 << depth, |prefix| {
        let (bits, won, decided) = tree.descend(prefix as u64, depth);
        tree.maximize(depth, bits, won, decided, &incumbent);
    });
    incumbent.load(Ordering::Relaxed)
}

fn lexicographic_witness(compiled: &Compiled, target: u64, threads: usize) -> u64 {
    let tree = Tree::new(compiled, (0..compiled.nvars).collect());
    let depth = split_depth(compiled.nvars, threads);
    // Smallest prefix known to contain a witness; larger prefixes stop early.
    let found_at = AtomicUsize::new(usize::MAX);
    let results = run_tasks(threads, 1 << depth, |prefix| {
        if prefix > found_at.load(Ordering::Relaxed) {
            return None;
        }
        let (bits, won, decided) = tree.descend(prefix as u64, depth);
        let hit = tree.first_reaching(depth, bits, won, decided, target);
        if hit.is_some() {
            found_at.fetch_min(prefix, Ordering::Relaxed);
        }
        hit
    });
    results
        .into_iter()
        .flatten()
        .next()
        .expect("the optimum is reachable")
}

pub fn optimal_value(game: &Game) -> Result<Optimum, ClassicalError> {
    optimal_value_with(game, SolverConfig::default())
}

/// Maximum weighted win probability over all deterministic contextual
/// strategy pairs, with the lexicographically smallest witness.
pub fn optimal_value_with(game: &Game, config: SolverConfig) -> Result<Optimum, ClassicalError> {
    ensure_valid(game)?;
    let alice = contextual_variables(game, Party::Alice);
    let bob = contextual_variables(game, Party::Bob);
    let compiled = Compiled::new(game, &alice, &bob)?;
    let threads = config.threads.max(1);
    let score = best_score(&compiled, threads);
    let witness = lexicographic_witness(&compiled, score, threads);
    Ok(Optimum {
        value: compiled.fraction(score),
        wins: compiled.wins(witness),
        alice: DeterministicStrategy::new(game, Party::Alice, bits_of(witness, 0, compiled.nalice))?,
        bob: DeterministicStrategy::new(
            game,
            Party::Bob,
            bits_of(witness, compiled.nalice, bob.len()),
        )?,
    })
}

/// Enumerates `2^len` vectors in lexicographic order (position 0 most
/// significant) and maps each to a joint bit word.
fn enumerate_lex(len: usize, mut visit: impl FnMut(&[bool])) {
    let mut bits = vec![false; len];
    for k in 0u64..(1u64 << len) {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = k >> (len - 1 - i) & 1 == 1;
        }
        visit(&bits);
    }
}

/// Best answer for the other player against a fixed strategy, by exhaustive
/// enumeration; ties go to the lexicographically smallest bit vector.
pub fn best_response(
    game: &Game,
    fixed: &DeterministicStrategy,
) -> Result<(Fraction, DeterministicStrategy), ClassicalError> {
    ensure_valid(game)?;
    let alice = contextual_variables(game, Party::Alice);
    let bob = contextual_variables(game, Party::Bob);
    let own = match fixed.party() {
        Party::Alice => &alice,
        Party::Bob => &bob,
    };
    if fixed.variables() != own.as_slice() {
        let missing = own
            .iter()
            .find(|v| fixed.answer(v).is_none())
            .unwrap_or(&own[0]);
        return Err(ClassicalError::MissingVariable(missing.to_string()));
    }
    let other = fixed.party().other();
    let nother = match other {
        Party::Alice => alice.len(),
        Party::Bob => bob.len(),
    };
    if nother > MAX_EXHAUSTIVE_BITS {
        return Err(ClassicalError::VariableBudget {
            needed: nother,
            limit: MAX_EXHAUSTIVE_BITS,
        });
    }
    let compiled = Compiled::new(game, &alice, &bob)?;
    let (fixed_offset, other_offset) = match fixed.party() {
        Party::Alice => (0, alice.len()),
        Party::Bob => (alice.len(), 0),
    };
    let base = pack(fixed.bits(), fixed_offset);
    let mut best: Option<(u64, Vec<bool>)> = None;
    enumerate_lex(nother, |bits| {
        let s = compiled.score(base | pack(bits, other_offset));
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, bits.to_vec()));
        }
    });
    let (score, bits) = best.expect("at least one response");
    Ok((
        compiled.fraction(score),
        DeterministicStrategy::new(game, other, bits)?,
    ))
}

fn pack(bits: &[bool], offset: usize) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | ((b as u64) << (offset + i)))
}

/// Optimum over strategies that give each observable one answer regardless
/// of its companion. Exhaustive over one bit per observable (Alice's labels
/// then Bob's, sorted).
pub fn noncontextual_optimal(game: &Game) -> Result<Optimum, ClassicalError> {
    ensure_valid(game)?;
    let alice = contextual_variables(game, Party::Alice);
    let bob = contextual_variables(game, Party::Bob);
    let labels = |vars: &[ContextualVariable]| {
        let mut l: Vec<String> = vars.iter().map(|v| v.observable.clone()).collect();
        l.dedup();
        l
    };
    let alice_labels = labels(&alice);
    let bob_labels = labels(&bob);
    let nbits = alice_labels.len() + bob_labels.len();
    if nbits > MAX_EXHAUSTIVE_BITS {
        return Err(ClassicalError::VariableBudget {
            needed: nbits,
            limit: MAX_EXHAUSTIVE_BITS,
        });
    }
    let compiled = Compiled::new(game, &alice, &bob)?;
    let expand = |bits: &[bool]| -> u64 {
        let mut word = 0u64;
        for (i, v) in alice.iter().chain(&bob).enumerate() {
            let slot = match v.party {
                Party::Alice => alice_labels.iter().position(|l| *l == v.observable),
                Party::Bob => bob_labels
                    .iter()
                    .position(|l| *l == v.observable)
                    .map(|p| p + alice_labels.len()),
            }
            .expect("label present");
            if bits[slot] {
                word |= 1 << i;
            }
        }
        word
    };
    let mut best: Option<(u64, u64)> = None;
    enumerate_lex(nbits, |bits| {
        let word = expand(bits);
        let s = compiled.score(word);
        if best.is_none_or(|(b, _)| s > b) {
            best = Some((s, word));
        }
    });
    let (score, word) = best.expect("at least one strategy");
    Ok(Optimum {
        value: compiled.fraction(score),
        wins: compiled.wins(word),
        alice: DeterministicStrategy::new(game, Party::Alice, bits_of(word, 0, alice.len()))?,
        bob: DeterministicStrategy::new(game, Party::Bob, bits_of(word, alice.len(), bob.len()))?,
    })
}
