//! Seeded Monte Carlo matches.
//!
//! The generator is ChaCha8 seeded with `seed` through `SeedableRng::seed_from_u64`
//! and switched to stream `k` for the `k`-th block of [`ROUNDS_PER_STREAM`]
//! rounds. Blocks are independent, so tallies do not depend on how many
//! threads play them. Uniform reals use the top 53 bits of a `u64`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{answers_win, outcome_answers, round_distribution, QuantumError, QuantumSetup, RoundDistribution};
use crate::classical::DeterministicStrategy;
use crate::fraction::common_denominator;
use crate::games::{Game, ObservableId, Party};
use crate::parallel::run_tasks;

pub const ROUNDS_PER_STREAM: u64 = 4096;

pub struct MatchRng(ChaCha8Rng);

impl MatchRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        MatchRng(rng)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..n` by rejection; `n > 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }
}

impl RoundDistribution {
    /// Inverse-CDF draw over the canonical outcome order.
    pub fn sample(&self, rng: &mut MatchRng) -> [i8; 4] {
        let u = rng.next_f64() * self.total();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, o) in self.outcomes.iter().enumerate() {
            if o.probability > 0.0 {
                acc += o.probability;
                last = i;
                if u < acc {
                    return o.answers;
                }
            }
        }
        outcome_answers(last)
    }
}

/// One measured round of `pair`.
pub fn sample_round(
    setup: &QuantumSetup,
    game: &Game,
    pair_index: usize,
    rng: &mut MatchRng,
) -> Result<[i8; 4], QuantumError> {
    Ok(round_distribution(setup, game, pair_index)?.sample(rng))
}

pub enum MatchStrategy<'a> {
    Quantum(&'a QuantumSetup),
    Classical {
        alice: &'a DeterministicStrategy,
        bob: &'a DeterministicStrategy,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairTally {
    pub pair: String,
    pub rounds: u64,
    pub wins: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchTally {
    pub seed: u64,
    pub rounds: u64,
    pub wins: u64,
    pub pairs: Vec<PairTally>,
}

impl MatchTally {
    pub fn win_rate(&self) -> Option<f64> {
        (self.rounds > 0).then(|| self.wins as f64 / self.rounds as f64)
    }
}

enum Player<'a> {
    Quantum(Vec<RoundDistribution>),
    Classical(Vec<[i8; 4]>, &'a Game),
}

/// Plays `rounds` rounds, drawing question pairs by weight.
pub fn play_match(
    game: &Game,
    strategy: &MatchStrategy<'_>,
    rounds: u64,
    seed: u64,
    threads: usize,
) -> Result<MatchTally, QuantumError> {
    crate::games::validate(game).map_err(|v| {
        QuantumError::InvalidGame(v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))
    })?;
    let player = match strategy {
        MatchStrategy::Quantum(setup) => Player::Quantum(
            (0..game.pairs.len())
                .map(|i| round_distribution(setup, game, i))
                .collect::<Result<_, _>>()?,
        ),
        MatchStrategy::Classical { alice, bob } => {
            let mut table = Vec::with_capacity(game.pairs.len());
            for pair in &game.pairs {
                let mut answers = [0i8; 4];
                let qs = [&game.questions[pair.alice], &game.questions[pair.bob]];
                let labels = [&qs[0].first, &qs[0].second, &qs[1].first, &qs[1].second];
                for (slot, label) in labels.iter().enumerate() {
                    let (party, s) = if slot < 2 { (Party::Alice, alice) } else { (Party::Bob, bob) };
                    let obs = ObservableId::new(party, label.as_str());
                    let var = game.variable_for(pair, &obs).expect("asked observable");
                    answers[slot] = s
                        .answer(&var)
                        .ok_or_else(|| QuantumError::MissingAnswer(var.to_string()))?
                        .value();
                }
                table.push(answers);
            }
            Player::Classical(table, game)
        }
    };

    let denom = common_denominator(game.pairs.iter().map(|p| &p.weight))
        .ok_or_else(|| QuantumError::InvalidGame("weights overflow".into()))?;
    let cumulative: Vec<u64> = game
        .pairs
        .iter()
        .scan(0u64, |acc, p| {
            *acc += p.weight.numer() * (denom / p.weight.denom());
            Some(*acc)
        })
        .collect();
    let wins_table: Vec<Vec<bool>> = match &player {
        Player::Quantum(dists) => dists
            .iter()
            .map(|d| d.outcomes.iter().map(|o| o.wins).collect())
            .collect(),
        Player::Classical(..) => Vec::new(),
    };

    let blocks = rounds.div_ceil(ROUNDS_PER_STREAM);
    let per_block = run_tasks(threads.max(1), blocks as usize, |block| {
        let block = block as u64;
        let mut rng = MatchRng::new(seed, block);
        let n = ROUNDS_PER_STREAM.min(rounds - block * ROUNDS_PER_STREAM);
        let mut counts = vec![(0u64, 0u64); game.pairs.len()];
        for _ in 0..n {
            let r = rng.below(denom);
            let pi = cumulative.partition_point(|&c| c <= r);
            let won = match &player {
                Player::Quantum(dists) => {
                    let answers = dists[pi].sample(&mut rng);
                    let index = answers
                        .iter()
                        .fold(0usize, |acc, &a| acc << 1 | (a < 0) as usize);
                    wins_table[pi][index]
                }
                Player::Classical(table, g) => answers_win(g, &g.pairs[pi], &table[pi]),
            };
            counts[pi].0 += 1;
            counts[pi].1 += won as u64;
        }
        counts
    });

    let mut pairs: Vec<PairTally> = game
        .pairs
        .iter()
        .map(|p| PairTally {
            pair: game.pair_name(p),
            rounds: 0,
            wins: 0,
        })
        .collect();
    for counts in per_block {
        for (t, (r, w)) in pairs.iter_mut().zip(counts) {
            t.rounds += r;
            t.wins += w;
        }
    }
    Ok(MatchTally {
        seed,
        rounds,
        wins: pairs.iter().map(|p| p.wins).sum(),
        pairs,
    })
}
