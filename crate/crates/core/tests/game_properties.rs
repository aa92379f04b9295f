use poptlab::catalog::Measurement;
use poptlab::distinguish::DISTINGUISH_TOL;
use poptlab::game::{exact_win_probability, simulate, GameSpec, GameStrategy, PairDecoder, Theory};
use poptlab::{sampling, HermitianOperator, SystemShape};
use proptest::prelude::*;

/// Random pure encodings, some messages sharing a state or an orthogonal
/// basis vector, decoded by projecting onto the first state of each pair.
fn strategy(seed: u64, n: usize, basis_only: bool) -> GameStrategy {
    let mut rng = sampling::rng(seed, 0);
    let shape = SystemShape::qubits(2);
    let encoder: Vec<HermitianOperator> = (0..n)
        .map(|k| {
            if basis_only {
                HermitianOperator::basis_projector(shape.clone(), k % 4)
            } else {
                sampling::pure_state(&mut rng, &shape)
            }
        })
        .collect();
    let mut s = GameStrategy::new("random", Theory::Quantum, encoder);
    for a in 0..n {
        for b in a + 1..n {
            let w = s.encoder[a].clone();
            let rest = HermitianOperator::identity(shape.clone()).sub(&w).unwrap();
            let m = Measurement::new(format!("proj[{a}]"), vec![w, rest]).unwrap();
            s.set_decoder(a, b, PairDecoder { measurement: m, answers: [a, b] }).unwrap();
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn win_probability_is_a_probability(seed in any::<u64>(), n in 2usize..=6, basis in any::<bool>()) {
        let s = strategy(seed, n, basis);
        let g = GameSpec::uniform(n).unwrap();
        let p = exact_win_probability(&s, &g).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let cert = s.certificate(n, DISTINGUISH_TOL).unwrap();
        // Perfect play and a complete pairwise certificate go together.
        prop_assert_eq!(cert.complete, (p - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn simulation_tracks_exact_value(seed in any::<u64>(), n in 2usize..=6) {
        let s = strategy(seed, n, false);
        let g = GameSpec::uniform(n).unwrap();
        let r = simulate(&s, &g, 4000, seed).unwrap();
        // 3 sigma is exceeded about 0.3% of the time; allow 5 sigma here.
        let sigma = (r.exact_win_prob * (1.0 - r.exact_win_prob) / 4000.0).sqrt();
        prop_assert!((r.empirical_win_rate.unwrap() - r.exact_win_prob).abs() <= 5.0 * sigma + 1e-12);
    }
}

#[test]
fn basis_encoding_reaches_four_but_not_five() {
    for (n, perfect) in [(4, true), (5, false)] {
        let s = strategy(0, n, true);
        let p = exact_win_probability(&s, &GameSpec::uniform(n).unwrap()).unwrap();
        assert_eq!(p == 1.0, perfect, "n={n}: {p}");
    }
}
