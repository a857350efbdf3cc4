use proptest::prelude::*;
use ptlab_core::algebra::{
    expectation, projector, tensor, Complex, Matrix, StateVector, TOLERANCE,
};
use ptlab_core::games::{builtin_full_game, builtin_simple_game, ObservableId, Party};
use ptlab_core::quantum::{builtin_setup, play_match, round_distribution, MatchStrategy};

fn observables() -> Vec<ObservableId> {
    Party::BOTH
        .iter()
        .flat_map(|&p| {
            ["X", "Y", "Z", "x", "y", "z"]
                .iter()
                .map(move |l| ObservableId::new(p, *l))
        })
        .collect()
}

#[test]
fn lifted_observables_are_involutions_with_pm1_spectrum() {
    let setup = builtin_setup();
    let id = Matrix::identity(16);
    for o in observables() {
        let op = setup.lifted(&o).unwrap();
        assert!(op.is_hermitian(), "{o}");
        assert!(op.matmul(&op).unwrap().approx_eq(&id), "{o}");
        for s in [1, -1] {
            let p = projector(&op, s).unwrap();
            assert!(p.matmul(&p).unwrap().approx_eq(&p));
            assert!(p.is_hermitian());
        }
        let sum = projector(&op, 1).unwrap().add(&projector(&op, -1).unwrap()).unwrap();
        assert!(sum.approx_eq(&id));
    }
}

#[test]
fn marginals_match_single_observable_expectations() {
    let setup = builtin_setup();
    for g in [builtin_full_game(), builtin_simple_game()] {
        for (i, pair) in g.pairs.iter().enumerate() {
            let d = round_distribution(&setup, &g, i).unwrap();
            let qa = &g.questions[pair.alice];
            let qb = &g.questions[pair.bob];
            let asked = [
                ObservableId::new(Party::Alice, qa.first.clone()),
                ObservableId::new(Party::Alice, qa.second.clone()),
                ObservableId::new(Party::Bob, qb.first.clone()),
                ObservableId::new(Party::Bob, qb.second.clone()),
            ];
            for (slot, o) in asked.iter().enumerate() {
                let op = setup.lifted(o).unwrap();
                for s in [1i8, -1] {
                    let direct = expectation(setup.state(), &projector(&op, s).unwrap()).unwrap().re;
                    assert!((d.marginal(slot, s) - direct).abs() <= TOLERANCE);
                }
            }
            assert!((d.total() - 1.0).abs() <= TOLERANCE);
            assert!(d.outcomes.iter().all(|o| o.probability >= -TOLERANCE));
            assert!(d.losing_mass() <= TOLERANCE, "{}", d.pair);
        }
    }
}

/// Brute-force joint probability with the projectors multiplied in `order`.
fn ordered_probability(ops: &[Matrix; 4], answers: [i8; 4], order: [usize; 4]) -> f64 {
    let setup = builtin_setup();
    let mut m = Matrix::identity(16);
    for &slot in &order {
        m = m.matmul(&projector(&ops[slot], answers[slot]).unwrap()).unwrap();
    }
    expectation(setup.state(), &m).unwrap().re
}

#[test]
fn projector_order_is_irrelevant() {
    let setup = builtin_setup();
    let g = builtin_full_game();
    let orders = [[0, 1, 2, 3], [3, 2, 1, 0], [1, 3, 0, 2], [2, 0, 3, 1]];
    for (i, pair) in g.pairs.iter().enumerate().step_by(3) {
        let d = round_distribution(&setup, &g, i).unwrap();
        let qa = &g.questions[pair.alice];
        let qb = &g.questions[pair.bob];
        let ops = [
            setup.lifted(&ObservableId::new(Party::Alice, qa.first.clone())).unwrap(),
            setup.lifted(&ObservableId::new(Party::Alice, qa.second.clone())).unwrap(),
            setup.lifted(&ObservableId::new(Party::Bob, qb.first.clone())).unwrap(),
            setup.lifted(&ObservableId::new(Party::Bob, qb.second.clone())).unwrap(),
        ];
        for o in &d.outcomes {
            for order in orders {
                let p = ordered_probability(&ops, o.answers, order);
                assert!((p - o.probability).abs() <= TOLERANCE);
            }
        }
    }
}

#[test]
fn xz_xz_distribution_from_direct_amplitudes() {
    // Oracle: the state is an equal mixture of branches Φ+⊗|uu⟩ and Φ−⊗|dd⟩
    // in (polarizations)⊗(paths); z answers are the path bits and X1 X2 = z2.
    let setup = builtin_setup();
    let g = builtin_full_game();
    let d = round_distribution(&setup, &g, g.find_pair("Xz:Xz").unwrap()).unwrap();
    for o in &d.outcomes {
        let [x1, z1, x2, z2] = o.answers;
        let expected = if z1 == z2 && x1 * x2 == z2 { 0.25 } else { 0.0 };
        assert!((o.probability - expected).abs() <= TOLERANCE, "{:?}", o.answers);
    }
}

#[test]
fn quantum_matches_never_lose() {
    let setup = builtin_setup();
    for g in [builtin_full_game(), builtin_simple_game()] {
        for seed in [0u64, 7, 0xdead_beef] {
            let t = play_match(&g, &MatchStrategy::Quantum(&setup), 20_000, seed, 2).unwrap();
            assert_eq!(t.wins, t.rounds);
        }
    }
}

fn arb_state() -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16).prop_filter_map("nonzero", |v| {
        let n: f64 = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        (n > 1e-3).then(|| {
            StateVector::new(
                v.iter()
                    .map(|&(a, b)| Complex::new(a / n, b / n).unwrap())
                    .collect(),
            )
            .unwrap()
        })
    })
}

fn arb_int_matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3i32..=3, n * n)
        .prop_map(move |v| Matrix::from_real(n, n, &v.iter().map(|&x| x as f64).collect::<Vec<_>>()).unwrap())
}

proptest! {
    #[test]
    fn projector_outcomes_sum_to_one(v in arb_state(), which in 0usize..12) {
        let setup = builtin_setup();
        let op = setup.lifted(&observables()[which]).unwrap();
        let p = expectation(&v, &projector(&op, 1).unwrap()).unwrap();
        let m = expectation(&v, &projector(&op, -1).unwrap()).unwrap();
        prop_assert!((p.re + m.re - 1.0).abs() <= TOLERANCE);
        prop_assert!(p.im.abs() <= TOLERANCE && m.im.abs() <= TOLERANCE);
    }

    #[test]
    fn tensor_is_associative_on_integers(a in arb_int_matrix(2), b in arb_int_matrix(2), c in arb_int_matrix(2)) {
        prop_assert_eq!(tensor(&tensor(&a, &b), &c), tensor(&a, &tensor(&b, &c)));
    }
}
