use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tanglebound::bounds::{
    BoundKind, CONC_WINDOW_LOWER, CONC_WINDOW_UPPER, SLACK_TOLERANCE, TAU_WINDOW_LOWER, TAU_WINDOW_UPPER,
};
use tanglebound::channels::{choi_of, random_channel};
use tanglebound::io::{ReportDocument, ReportMeta, StoredReport};
use tanglebound::measures::{concurrence_pure, eta_factors, pair_count, tau_lower, tau_upper};
use tanglebound::states::{random_local_unitaries, random_mixed, random_pure, state_from_schmidt_weights};
use tanglebound::verify::{derive_seed, replay_stored};
use tanglebound::{full_report, BoundReport, Channel, PureState};

fn pair(d: usize, k: usize, seed: u64) -> (Channel, PureState) {
    let k = 1 + (k - 1) % (d * d);
    (
        random_channel(d, k, seed).unwrap(),
        random_pure(d, d, derive_seed(seed, 1)).unwrap(),
    )
}

fn weights(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, d).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    })
}

fn rhs(r: &BoundReport, name: &str) -> Option<f64> {
    r.entry(name).filter(|e| e.applicable).and_then(|e| e.rhs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measures_are_local_unitary_invariant(d in 2usize..=4, rank in 1usize..=4, seed in any::<u64>()) {
        let rho = random_mixed::<f64>(d, d, rank, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let (u, v) = random_local_unitaries::<f64, _>(&mut rng, d, d);
        let rotated = rho.conjugate_local(&u, &v);
        prop_assert!((tau_lower(&rho) - tau_lower(&rotated)).abs() < 1e-10);
        prop_assert!((tau_upper(&rho) - tau_upper(&rotated)).abs() < 1e-10);

        let psi = random_pure::<f64>(d, d, seed).unwrap();
        let c = concurrence_pure(&psi).unwrap();
        prop_assert!((c - concurrence_pure(&psi.apply_local(&u, &v).unwrap()).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn tau_never_exceeds_tau_prime(d in 2usize..=4, rank in 1usize..=6, seed in any::<u64>()) {
        let rho = random_mixed::<f64>(d, d, rank, seed).unwrap();
        prop_assert!(tau_lower(&rho) <= tau_upper(&rho) + 1e-12);
    }

    #[test]
    fn pure_states_close_the_sandwich(d in 2usize..=4, seed in any::<u64>()) {
        let psi = random_pure::<f64>(d, d, seed).unwrap();
        let c2 = concurrence_pure(&psi).unwrap().powi(2);
        let rho = psi.density();
        prop_assert!((tau_lower(&rho) - c2).abs() < 1e-10);
        prop_assert!((tau_upper(&rho) - c2).abs() < 1e-10);
    }

    #[test]
    fn eta_relations(w in (2usize..=5).prop_flat_map(weights)) {
        let d = w.len();
        let f = eta_factors(&w).unwrap();
        let flat = 1.0 / pair_count(d) as f64;
        prop_assert!(f.eta_min <= flat + 1e-12 && flat <= f.eta_max + 1e-12);
        prop_assert!((f.eta - f.eta_min * f.pair_sum).abs() < 1e-14);
        prop_assert!(f.eta <= f.pair_sum);

        let mut reversed = w.clone();
        reversed.reverse();
        let g = eta_factors(&reversed).unwrap();
        prop_assert!((f.eta - g.eta).abs() < 1e-15 && (f.eta_max - g.eta_max).abs() < 1e-12);
        if d == 2 {
            prop_assert!((f.eta_min - 1.0).abs() < 1e-12 && (f.eta_max - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn entries_are_internally_consistent(d in 2usize..=4, k in 1usize..=16, seed in any::<u64>()) {
        let (e, psi) = pair(d, k, seed);
        let r = full_report(&e, &psi).unwrap();
        for entry in &r.entries {
            if !entry.applicable {
                prop_assert!(entry.slack.is_none());
                continue;
            }
            let (lhs, rhs, slack) = (entry.lhs.unwrap(), entry.rhs.unwrap(), entry.slack.unwrap());
            let expected = match entry.kind {
                BoundKind::Lower => lhs - rhs,
                BoundKind::Upper => rhs - lhs,
            };
            prop_assert_eq!(slack, expected);
            prop_assert_eq!(entry.satisfied, slack >= SLACK_TOLERANCE);
        }
        for (name, margin) in r.nesting_margins() {
            prop_assert!(margin >= -1e-10, "{} margin {}", name, margin);
        }
    }

    #[test]
    fn windows_are_ordered(d in 2usize..=4, k in 1usize..=16, seed in any::<u64>()) {
        let (e, psi) = pair(d, k, seed);
        let r = full_report(&e, &psi).unwrap();
        let (lo, hi) = (rhs(&r, TAU_WINDOW_LOWER).unwrap(), rhs(&r, TAU_WINDOW_UPPER).unwrap());
        if r.quantities.tau_choi >= 0.0 {
            prop_assert!(lo <= hi + 1e-12);
        }
        if let (Some(lo), Some(hi)) = (rhs(&r, CONC_WINDOW_LOWER), rhs(&r, CONC_WINDOW_UPPER)) {
            prop_assert!(lo <= hi + 1e-12);
        }
    }

    #[test]
    fn qubit_windows_collapse(k in 1usize..=4, seed in any::<u64>()) {
        let (e, psi) = pair(2, k, seed);
        let r = full_report(&e, &psi).unwrap();
        let (lo, hi) = (rhs(&r, TAU_WINDOW_LOWER).unwrap(), rhs(&r, TAU_WINDOW_UPPER).unwrap());
        prop_assert!((lo - hi).abs() < 1e-12);
    }

    #[test]
    fn choi_state_has_flat_input_marginal(d in 2usize..=4, k in 1usize..=16, seed in any::<u64>()) {
        let (e, _) = pair(d, k, seed);
        let j = choi_of(&e);
        prop_assert!(j.a_marginal_deviation() < 1e-10);
        prop_assert!(j.purity() <= 1.0 + 1e-10);
    }

    #[test]
    fn reports_survive_serialization(d in 2usize..=3, k in 1usize..=9, seed in any::<u64>()) {
        let (e, psi) = pair(d, k, seed);
        let doc = ReportDocument::evaluate(ReportMeta::default(), &e, &psi).unwrap();
        let stored: StoredReport = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        let out = replay_stored(&stored).unwrap();
        prop_assert_eq!(out.max_drift, 0.0);
    }

    #[test]
    fn schmidt_inputs_match_their_weights(w in (2usize..=4).prop_flat_map(weights)) {
        let d = w.len();
        let psi = state_from_schmidt_weights(&w, d).unwrap();
        let c = concurrence_pure(&psi).unwrap();
        let expected = (2.0 * (1.0 - w.iter().map(|x| x * x).sum::<f64>())).sqrt();
        prop_assert!((c - expected).abs() < 1e-12);
    }
}
