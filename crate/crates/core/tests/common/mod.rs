#![allow(dead_code)]

use ptlab_core::classical::DeterministicStrategy;
use ptlab_core::fraction::Fraction;
use ptlab_core::games::{
    contextual_variables, ContextualVariable, Game, ObservableId, Party, Predicate, Question,
    QuestionPair, Sign,
};
use ptlab_core::quantum::MatchRng;

/// Brute-force referee: each pair as a list of predicates, each predicate as
/// (joint variable indices, sign). Joint order is Alice's variables then Bob's.
type OraclePair = (Fraction, Vec<(Vec<usize>, i8)>);

pub struct Oracle {
    pub nalice: usize,
    pub nbob: usize,
    pairs: Vec<OraclePair>,
}

impl Oracle {
    pub fn new(game: &Game) -> Self {
        let alice = contextual_variables(game, Party::Alice);
        let bob = contextual_variables(game, Party::Bob);
        let find = |v: &ContextualVariable| -> usize {
            match v.party {
                Party::Alice => alice.iter().position(|a| a == v).unwrap(),
                Party::Bob => alice.len() + bob.iter().position(|b| b == v).unwrap(),
            }
        };
        let pairs = game
            .pairs
            .iter()
            .map(|pair| {
                let preds = pair
                    .predicates
                    .iter()
                    .map(|pred| {
                        let idx = pred
                            .factors
                            .iter()
                            .map(|f| find(&game.variable_for(pair, f).unwrap()))
                            .collect();
                        (idx, pred.sign.value())
                    })
                    .collect();
                (pair.weight, preds)
            })
            .collect();
        Oracle {
            nalice: alice.len(),
            nbob: bob.len(),
            pairs,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nalice + self.nbob
    }

    /// Value of the joint assignment; `answers[i]` is ±1.
    pub fn value(&self, answers: &[i8]) -> Fraction {
        let mut v = Fraction::from_integer(0);
        for (w, preds) in &self.pairs {
            let won = preds
                .iter()
                .all(|(idx, sign)| idx.iter().map(|&i| answers[i]).product::<i8>() == *sign);
            if won {
                v += *w;
            }
        }
        v
    }

    /// Exhaustive maximum and the first (lexicographically smallest)
    /// assignment reaching it, as bits (`true` = -1).
    pub fn optimum(&self) -> (Fraction, Vec<bool>) {
        let n = self.nvars();
        let mut best: Option<(Fraction, Vec<bool>)> = None;
        let mut answers = vec![1i8; n];
        for k in 0u64..(1u64 << n) {
            for (i, a) in answers.iter_mut().enumerate() {
                *a = if k >> (n - 1 - i) & 1 == 1 { -1 } else { 1 };
            }
            let v = self.value(&answers);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, answers.iter().map(|&a| a < 0).collect()));
            }
        }
        best.unwrap()
    }
}

pub fn joint_bits(alice: &DeterministicStrategy, bob: &DeterministicStrategy) -> Vec<bool> {
    alice.bits().iter().chain(bob.bits()).copied().collect()
}

const LABELS: [&str; 4] = ["A", "B", "C", "D"];

/// A random valid game with at most `max_pairs` pairs and at most
/// `max_vars_per_party` contextual variables per party.
pub fn random_game(seed: u64, max_pairs: usize, max_vars_per_party: usize) -> Game {
    let mut rng = MatchRng::new(seed, 0);
    let mut observables = Vec::new();
    let mut questions = Vec::new();
    for party in Party::BOTH {
        let nlabels = 2 + rng.below(3) as usize;
        for l in &LABELS[..nlabels] {
            observables.push(ObservableId::new(party, *l));
        }
        let nq = 1 + rng.below(3) as usize;
        let mut vars = 0;
        let mut asked: Vec<(usize, usize)> = Vec::new();
        for _ in 0..nq {
            let a = rng.below(nlabels as u64) as usize;
            let mut b = rng.below(nlabels as u64 - 1) as usize;
            if b >= a {
                b += 1;
            }
            let key = (a.min(b), a.max(b));
            if asked.contains(&key) || vars + 2 > max_vars_per_party {
                continue;
            }
            asked.push(key);
            vars += 2;
            questions.push(Question::new(party, LABELS[a], LABELS[b]));
        }
    }
    let alice_qs: Vec<usize> = (0..questions.len())
        .filter(|&i| questions[i].party == Party::Alice)
        .collect();
    let bob_qs: Vec<usize> = (0..questions.len())
        .filter(|&i| questions[i].party == Party::Bob)
        .collect();
    let mut combos: Vec<(usize, usize)> = alice_qs
        .iter()
        .flat_map(|&a| bob_qs.iter().map(move |&b| (a, b)))
        .collect();
    // shuffle, then keep a prefix
    for i in (1..combos.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        combos.swap(i, j);
    }
    let npairs = 1 + rng.below(max_pairs.min(combos.len()) as u64) as usize;
    combos.truncate(npairs);
    combos.sort();

    let mut raw_weights = Vec::new();
    let mut pairs = Vec::new();
    let mut id = 0;
    for (a, b) in combos {
        let asked = [
            ObservableId::new(Party::Alice, questions[a].first.clone()),
            ObservableId::new(Party::Alice, questions[a].second.clone()),
            ObservableId::new(Party::Bob, questions[b].first.clone()),
            ObservableId::new(Party::Bob, questions[b].second.clone()),
        ];
        let npred = 1 + rng.below(2) as usize;
        let mut predicates = Vec::new();
        for _ in 0..npred {
            let mut mask = 0;
            while (mask as u32).count_ones() < 2 {
                mask = rng.below(16);
            }
            id += 1;
            predicates.push(Predicate::new(
                format!("p{id:02}"),
                if rng.below(2) == 0 { Sign::Plus } else { Sign::Minus },
                (0..4)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| asked[i].clone())
                    .collect(),
            ));
        }
        raw_weights.push(1 + rng.below(3));
        pairs.push(QuestionPair {
            alice: a,
            bob: b,
            predicates,
            weight: Fraction::from_integer(0),
        });
    }
    let total: u64 = raw_weights.iter().sum();
    for (p, w) in pairs.iter_mut().zip(raw_weights) {
        p.weight = Fraction::new(w, total);
    }
    Game {
        name: format!("random-{seed}"),
        observables,
        questions,
        pairs,
    }
}

pub fn uniform_reweight(game: &mut Game) {
    let n = game.pairs.len() as u64;
    for p in &mut game.pairs {
        p.weight = Fraction::new(1, n);
    }
}

pub fn var(party: Party, obs: &str, ctx: &str) -> ContextualVariable {
    ContextualVariable {
        party,
        observable: obs.into(),
        context: ctx.into(),
    }
}

pub fn ids(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// (party, observable, contexts, supporting predicates) for the twelve
/// context-independence derivations on the full game.
pub const FULL_DERIVATIONS: [(Party, &str, &[&str], &[&str]); 12] = [
    (Party::Alice, "X", &["z", "x", "y"], &["e01", "e21", "e24"]),
    (Party::Alice, "x", &["Z", "X", "Y"], &["e07", "e22", "e27"]),
    (Party::Alice, "Y", &["z", "x", "y"], &["e12", "e28", "e30"]),
    (Party::Alice, "y", &["Z", "X", "Y"], &["e18", "e25", "e31"]),
    (Party::Alice, "Z", &["x", "y"], &["e06", "e07", "e16"]),
    (Party::Alice, "z", &["X", "Y"], &["e01", "e02", "e11"]),
    (Party::Bob, "X", &["z", "y", "x"], &["e02", "e04", "e05"]),
    (Party::Bob, "x", &["Z", "Y", "X"], &["e06", "e09", "e10"]),
    (Party::Bob, "Y", &["z", "y", "x"], &["e13", "e14", "e15"]),
    (Party::Bob, "y", &["Z", "Y", "X"], &["e17", "e19", "e20"]),
    (Party::Bob, "Z", &["x", "y"], &["e06", "e07", "e08"]),
    (Party::Bob, "z", &["X", "Y"], &["e01", "e02", "e03"]),
];

/// Test-side certificate check: multiplying the named predicates must cancel
/// every contextual variable and leave `-1`.
pub fn certificate_contradicts(game: &Game, ids: &[String]) -> bool {
    let mut counts: std::collections::BTreeMap<ContextualVariable, usize> = Default::default();
    let mut minus = 0;
    for id in ids {
        let Some((pair, pred)) = game
            .pairs
            .iter()
            .flat_map(|p| p.predicates.iter().map(move |q| (p, q)))
            .find(|(_, q)| &q.id == id)
        else {
            return false;
        };
        minus += (pred.sign == Sign::Minus) as usize;
        for f in &pred.factors {
            *counts.entry(game.variable_for(pair, f).unwrap()).or_default() += 1;
        }
    }
    !ids.is_empty() && minus % 2 == 1 && counts.values().all(|c| c % 2 == 0)
}
